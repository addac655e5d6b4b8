#pragma once

#include <stdexcept>
#include <string>

namespace vgprod {

// Invalid parameters: the message names the violated invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a function (x <= 0 for K, |x| >= 1 for 2F1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation at a pole or at the integrable singularity of a density.
class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Meijer G instance outside the supported classes, or a contour that cannot be placed.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vgprod
