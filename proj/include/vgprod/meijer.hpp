#pragma once

#include "vgprod/eval_result.hpp"

#include <complex>
#include <vector>

namespace vgprod::meijer {

using cplx = std::complex<double>;

inline constexpr double default_tol = 1e-10;

// G^{m,n}_{p,q}(x | a; b) with p = a.size(), q = b.size().
struct MeijerGSpec {
    int m = 0;
    int n = 0;
    std::vector<double> a;
    std::vector<double> b;

    int p() const { return static_cast<int>(a.size()); }
    int q() const { return static_cast<int>(b.size()); }
    bool operator==(const MeijerGSpec&) const = default;
};

enum class GClass { q0, cdf, cf, inverted_q0, inverted_cdf, inverted_cf };

// Throws ShapeError for instances outside the supported classes.
GClass classify(const MeijerGSpec& g);

MeijerGSpec make_q0(std::vector<double> b);

// A plain tol means absolute for |value| <= 1 and relative above.
EvalResult eval_g_q0(const MeijerGSpec& g, double x, Tolerance tol);
EvalResult eval_g_cdf_class(const MeijerGSpec& g, double x, Tolerance tol);
ComplexEvalResult eval_g_cf_class(const MeijerGSpec& g, cplx z, Tolerance tol);

inline EvalResult eval_g_q0(const MeijerGSpec& g, double x, double tol = default_tol)
{
    return eval_g_q0(g, x, Tolerance::mixed(tol));
}
inline EvalResult eval_g_cdf_class(const MeijerGSpec& g, double x, double tol = default_tol)
{
    return eval_g_cdf_class(g, x, Tolerance::mixed(tol));
}
inline ComplexEvalResult eval_g_cf_class(const MeijerGSpec& g, cplx z, double tol = default_tol)
{
    return eval_g_cf_class(g, z, Tolerance::mixed(tol));
}

// Any supported class (including inversions) at a real positive argument.
EvalResult evaluate(const MeijerGSpec& g, double x, double tol = default_tol);

// Contour quadrature only, with residue collection where the contour crosses poles.
ComplexEvalResult eval_quadrature(const MeijerGSpec& g, cplx z, Tolerance tol);

// Sum over the poles on the side that gives a convergent series.
ComplexEvalResult eval_residues(const MeijerGSpec& g, cplx z, Tolerance tol);

MeijerGSpec shift_argument(const MeijerGSpec& g, double alpha);
MeijerGSpec invert_argument(const MeijerGSpec& g);

double g_asymptotic_theta(const MeijerGSpec& g);
double g_asymptotic(const MeijerGSpec& g, double x);

} // namespace vgprod::meijer
