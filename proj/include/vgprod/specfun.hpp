#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace vgprod::specfun {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;
inline constexpr double ln_sqrt_2pi = 0.918938533204672741780329736405617639;

// Principal branch of log Gamma(z). Throws PoleError at nonpositive integers.
cplx log_gamma(cplx z);

// ln|Gamma(x)| and the sign of Gamma(x) for real x.
std::pair<double, int> log_abs_gamma(double x);

double digamma(double x);

// n-th derivative of the digamma function, n >= 0.
double polygamma(int n, double x);

// psi^{(k)}(x) for k = 0..kmax in one pass.
std::vector<double> polygamma_table(int kmax, double x);

// Riemann zeta at integer k >= 2.
double zeta_int(int k);

// Modified Bessel function of the second kind, real order, x > 0.
double bessel_k(double nu, double x);

// e^x K_nu(x).
double bessel_k_scaled(double nu, double x);

// Gauss hypergeometric 2F1(a, b; c; x) for |x| < 1.
double gauss_2f1(double a, double b, double c, double x);

} // namespace vgprod::specfun
