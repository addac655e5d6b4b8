#pragma once

#include "vgprod/eval_result.hpp"

#include <complex>
#include <functional>

namespace vgprod::mb {

using cplx = std::complex<double>;

// Logarithm of a Mellin-Barnes integrand h(s); the real part may be -inf where h vanishes.
using LogIntegrand = std::function<cplx(cplx)>;

struct LineOptions {
    double abs_tol = 1e-13;      // on the returned value
    double rel_tol = 1e-12;
    bool conj_symmetric = false; // h(conj s) = conj h(s): integrate the upper half only
    double feature = 1.0;        // distance from the line to the nearest pole
    double frequency = 0.0;      // |d arg h / dy| from the x^s factor
};

// (1/2 pi i) * integral of h over the upward line Re s = c.
ComplexEvalResult integrate_line(const LogIntegrand& log_h, double c, const LineOptions& opt);

// Minimizer of a function convex on (lo, hi); lo may be -inf and hi may be +inf.
double minimize_on_strip(const std::function<double(double)>& phi, double lo, double hi);

} // namespace vgprod::mb
