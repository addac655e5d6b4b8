#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace vgprod {

template <class T>
struct BasicEvalResult {
    T value{};
    double abs_err = 0.0;
    bool converged = false;
};

using EvalResult = BasicEvalResult<double>;
using ComplexEvalResult = BasicEvalResult<std::complex<double>>;

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-10;

    static Tolerance mixed(double tol) { return {tol, tol}; }
    bool met(double err, double magnitude) const { return err <= std::max(abs, rel * magnitude); }
};

// Absolute tolerance for |value| <= 1, relative above.
inline double tolerance_target(double tol, double magnitude) { return tol * std::max(1.0, magnitude); }

} // namespace vgprod
