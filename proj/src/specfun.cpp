#include "vgprod/specfun.hpp"

#include "vgprod/errors.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace vgprod::specfun {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double ln_pi = 1.144729885849400174143427351353058712;

// B_{2k} / (2k (2k-1)), k = 1..12
constexpr std::array<double, 12> stirling_coef = {
    1.0 / 12.0,           -1.0 / 360.0,           1.0 / 1260.0,      -1.0 / 1680.0,
    1.0 / 1188.0,         -691.0 / 360360.0,      1.0 / 156.0,       -3617.0 / 122400.0,
    43867.0 / 244188.0,   -174611.0 / 125400.0,   77683.0 / 5796.0,  -236364091.0 / 1506960.0};

// B_{2k}, k = 1..12
constexpr std::array<double, 12> bernoulli_even = {
    1.0 / 6.0,         -1.0 / 30.0,         1.0 / 42.0,        -1.0 / 30.0,
    5.0 / 66.0,        -691.0 / 2730.0,     7.0 / 6.0,         -3617.0 / 510.0,
    43867.0 / 798.0,   -174611.0 / 330.0,   854513.0 / 138.0,  -236364091.0 / 2730.0};

// Taylor coefficients of 1/Gamma(1+x) about 0.
constexpr std::array<double, 25> rgamma_taylor = {
    1.0,
    0.5772156649015328606065121,
    -0.6558780715202538810770195,
    -0.04200263503409523552900393,
    0.1665386113822914895017008,
    -0.0421977345555443367482083,
    -0.009621971527876973562114922,
    0.00721894324666309954239501,
    -0.001165167591859065112113971,
    -0.00021524167411495097281573,
    0.0001280502823881161861531986,
    -0.00002013485478078823865568939,
    -0.000001250493482142670657345359,
    0.00000113302723198169588237413,
    -0.0000002056338416977607103450154,
    6.116095104481415817862499e-9,
    5.002007644469222930055665e-9,
    -1.181274570487020144588127e-9,
    1.04342671169110051049154e-10,
    7.782263439905071254049937e-12,
    -3.696805618642205708187816e-12,
    5.100370287454475979015481e-13,
    -2.05832605356650678322243e-14,
    -5.348122539423017982370017e-15,
    1.226778628238260790158894e-15};

constexpr double stirling_radius = 10.0;

bool near_nonpositive_integer(double re, double im)
{
    if (re > 0.5 || std::abs(im) > 1e-14) return false;
    return std::abs(re - std::round(re)) <= 1e-14 * std::max(1.0, std::abs(re));
}

cplx stirling(cplx z)
{
    cplx w = 1.0 / z;
    cplx w2 = w * w;
    cplx series = 0.0;
    for (int k = static_cast<int>(stirling_coef.size()) - 1; k >= 0; --k)
        series = series * w2 + stirling_coef[k];
    return (z - 0.5) * std::log(z) - z + ln_sqrt_2pi + series * w;
}

double stirling_real(double x)
{
    double w = 1.0 / x;
    double w2 = w * w;
    double series = 0.0;
    for (int k = static_cast<int>(stirling_coef.size()) - 1; k >= 0; --k)
        series = series * w2 + stirling_coef[k];
    return (x - 0.5) * std::log(x) - x + ln_sqrt_2pi + series * w;
}

// lnGamma for Re z >= 0.5 (or any z off the negative axis), by upward recurrence.
cplx log_gamma_right(cplx z)
{
    if (z.imag() < 0.0) return std::conj(log_gamma_right(std::conj(z)));
    if (z.imag() == 0.0) {
        cplx shift = 0.0;
        while (std::abs(z) < stirling_radius || z.real() < 0.5) {
            shift += std::log(z);
            z += 1.0;
        }
        return stirling(z) - shift;
    }
    // one logarithm of the running product; each factor turns it counterclockwise by less than pi,
    // so a sign change of the imaginary part from + to - marks one crossing of the branch cut
    cplx prod = 1.0;
    int winding = 0;
    while (std::norm(z) < stirling_radius * stirling_radius || z.real() < 0.5) {
        cplx next = prod * z;
        if (prod.imag() > 0.0 && next.imag() <= 0.0) ++winding;
        prod = next;
        z += 1.0;
    }
    return stirling(z) - std::log(prod) - cplx(0.0, 2.0 * pi * winding);
}

// An analytic logarithm of sin(pi z) on the closed upper half plane.
cplx log_sin_pi_upper(cplx z)
{
    const cplx i(0.0, 1.0);
    cplx e = std::exp(2.0 * pi * i * z);
    return -i * pi * z + std::log(1.0 - e) - std::log(2.0) + i * (pi / 2.0);
}

double sin_pi(double x)
{
    double r = std::round(x);
    double s = std::sin(pi * (x - r));
    return (static_cast<long long>(r) % 2 == 0) ? s : -s;
}

double cos_pi(double x)
{
    double r = std::round(x);
    double c = std::cos(pi * (x - r));
    return (static_cast<long long>(r) % 2 == 0) ? c : -c;
}

} // namespace

cplx log_gamma(cplx z)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("log_gamma: non-finite argument");
    if (near_nonpositive_integer(z.real(), z.imag()))
        throw PoleError("log_gamma: pole of Gamma at a nonpositive integer");
    if (z.real() >= -20.0) return log_gamma_right(z);
    if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
    return ln_pi - log_sin_pi_upper(z) - log_gamma_right(1.0 - z);
}

std::pair<double, int> log_abs_gamma(double x)
{
    if (near_nonpositive_integer(x, 0.0))
        throw PoleError("log_abs_gamma: pole of Gamma at a nonpositive integer");
    if (x < 0.5) {
        double s = sin_pi(x);
        auto [lg, sg] = log_abs_gamma(1.0 - x);
        return {ln_pi - std::log(std::abs(s)) - lg, (s > 0 ? 1 : -1) * sg};
    }
    double prod = 1.0;
    double shift = 0.0;
    while (x < stirling_radius) {
        prod *= x;
        if (prod > 1e280) {
            shift += std::log(prod);
            prod = 1.0;
        }
        x += 1.0;
    }
    shift += std::log(prod);
    return {stirling_real(x) - shift, 1};
}

double digamma(double x)
{
    if (near_nonpositive_integer(x, 0.0)) throw PoleError("digamma: pole at a nonpositive integer");
    if (x < 0.0) return digamma(1.0 - x) - pi * cos_pi(x) / sin_pi(x);
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double w2 = 1.0 / (x * x);
    double series = 0.0;
    for (int k = 8; k >= 1; --k) series = series * w2 + bernoulli_even[k - 1] / (2.0 * k);
    return acc + std::log(x) - 0.5 / x - series * w2;
}

std::vector<double> polygamma_table(int kmax, double x)
{
    if (kmax < 0) throw ValidationError("polygamma_table: kmax must be >= 0");
    if (near_nonpositive_integer(x, 0.0)) throw PoleError("polygamma: pole at a nonpositive integer");
    std::vector<double> out(kmax + 1, 0.0);
    out[0] = digamma(x);
    if (kmax == 0) return out;

    double ymin = std::max(15.0, 1.5 * kmax + 10.0);
    int steps = x < ymin ? static_cast<int>(std::ceil(ymin - x)) : 0;
    double y = x + steps;

    // recurrence part: psi^{(n)}(x) = psi^{(n)}(y) - (-1)^n n! sum_k (x+k)^{-(n+1)}
    std::vector<double> power_sum(kmax + 1, 0.0);
    for (int k = 0; k < steps; ++k) {
        double inv = 1.0 / (x + k);
        double pw = inv;
        for (int n = 1; n <= kmax; ++n) {
            pw *= inv;
            power_sum[n] += pw;
        }
    }

    double fact = 1.0; // n!
    double inv_y = 1.0 / y;
    for (int n = 1; n <= kmax; ++n) {
        double fact_nm1 = fact; // (n-1)!
        fact *= n;
        double yn = std::pow(inv_y, n);
        double asym = fact_nm1 * yn + fact * yn * inv_y / 2.0;
        // sum_j B_{2j} (2j+n-1)! / ((2j)! y^{2j+n})
        double ratio = fact_nm1; // (2j+n-1)!/(2j)! built incrementally
        double yp = yn;
        for (int j = 1; j <= 12; ++j) {
            ratio *= static_cast<double>(2 * j + n - 2) * (2 * j + n - 1) / ((2.0 * j - 1.0) * (2.0 * j));
            yp *= inv_y * inv_y;
            double term = bernoulli_even[j - 1] * ratio * yp;
            asym += term;
            if (std::abs(term) < 1e-18 * std::abs(asym)) break;
        }
        double sign = (n % 2 == 1) ? 1.0 : -1.0; // (-1)^{n+1}
        double at_y = sign * asym;
        double rec_sign = (n % 2 == 0) ? 1.0 : -1.0; // (-1)^n
        out[n] = at_y - rec_sign * fact * power_sum[n];
    }
    return out;
}

double polygamma(int n, double x)
{
    if (n < 0) throw ValidationError("polygamma: order must be >= 0");
    if (n == 0) return digamma(x);
    return polygamma_table(n, x)[n];
}

double zeta_int(int k)
{
    if (k < 2) throw DomainError("zeta_int: k must be >= 2");
    static const std::vector<double> table = [] {
        constexpr int kmax = 80;
        std::vector<double> t(kmax + 1, 0.0);
        std::vector<double> pg = polygamma_table(kmax - 1, 1.0);
        double fact = 1.0;
        for (int j = 2; j <= kmax; ++j) {
            fact *= (j - 1); // (j-1)!
            double v = ((j % 2 == 0) ? 1.0 : -1.0) * pg[j - 1] / fact;
            // high orders: direct sum is exact to double precision
            if (j > 40) v = 1.0 + std::pow(2.0, -j) + std::pow(3.0, -j);
            t[j] = v;
        }
        return t;
    }();
    if (k < static_cast<int>(table.size())) return table[k];
    return 1.0 + std::pow(2.0, -k);
}

namespace {

// K_mu(x), K_{mu+1}(x) for |mu| <= 1/2, optionally scaled by e^x.
std::pair<double, double> bessel_k_pair(double mu, double x, bool scaled)
{
    constexpr int max_iter = 100000;
    double rkmu, rk1;
    if (x <= 2.0) {
        double x2 = 0.5 * x;
        double pimu = pi * mu;
        double fact = std::abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2);
        double e = mu * d;
        double fact2 = std::abs(e) < eps ? 1.0 : std::sinh(e) / e;
        double mu2 = mu * mu;
        double gam1 = 0.0, gam2 = 0.0, pw = 1.0;
        for (std::size_t k = 0; k + 1 < rgamma_taylor.size(); k += 2) {
            gam2 += rgamma_taylor[k] * pw;
            gam1 -= rgamma_taylor[k + 1] * pw;
            pw *= mu2;
        }
        double gampl = gam2 - mu * gam1;
        double gammi = gam2 + mu * gam1;
        double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
        double sum = ff;
        double ee = std::exp(e);
        double p = 0.5 * ee / gampl;
        double q = 0.5 / (ee * gammi);
        double c = 1.0;
        double dd = x2 * x2;
        double sum1 = p;
        int i = 1;
        for (; i <= max_iter; ++i) {
            ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
            c *= dd / i;
            p /= (i - mu);
            q /= (i + mu);
            double del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if (std::abs(del) < std::abs(sum) * eps) break;
        }
        if (i > max_iter) throw ConvergenceError("bessel_k: series failed to converge");
        rkmu = sum;
        rk1 = sum1 * 2.0 / x;
        if (scaled) {
            double ex = std::exp(x);
            rkmu *= ex;
            rk1 *= ex;
        }
    } else {
        double b = 2.0 * (1.0 + x);
        double d = 1.0 / b;
        double h = d, delh = d;
        double q1 = 0.0, q2 = 1.0;
        double a1 = 0.25 - mu * mu;
        double q = a1, c = a1;
        double a = -a1;
        double s = 1.0 + q * delh;
        int i = 1;
        for (; i < max_iter; ++i) {
            a -= 2 * i;
            c = -a * c / (i + 1.0);
            double qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            double dels = q * delh;
            s += dels;
            if (std::abs(dels / s) < eps) break;
        }
        if (i >= max_iter) throw ConvergenceError("bessel_k: continued fraction failed to converge");
        h = a1 * h;
        rkmu = std::sqrt(pi / (2.0 * x)) / s;
        if (!scaled) rkmu *= std::exp(-x);
        rk1 = rkmu * (mu + x + 0.5 - h) / x;
    }
    return {rkmu, rk1};
}

double bessel_k_impl(double nu, double x, bool scaled)
{
    if (!(x > 0.0)) throw DomainError("bessel_k: requires x > 0");
    nu = std::abs(nu);
    int nl = static_cast<int>(nu + 0.5);
    double mu = nu - nl;
    auto [rkmu, rk1] = bessel_k_pair(mu, x, scaled);
    double xi2 = 2.0 / x;
    for (int i = 1; i <= nl; ++i) {
        double next = (mu + i) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = next;
    }
    return rkmu;
}

} // namespace

double bessel_k(double nu, double x) { return bessel_k_impl(nu, x, false); }

double bessel_k_scaled(double nu, double x) { return bessel_k_impl(nu, x, true); }

namespace {

double hyp2f1_series(double a, double b, double c, double x)
{
    constexpr int max_terms = 200000;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < max_terms; ++k) {
        double r = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        term *= r;
        sum += term;
        if (term == 0.0) return sum;
        double ar = std::abs(r);
        if (ar < 1.0 && std::abs(term) * ar / (1.0 - ar) <= 1e-17 * std::abs(sum)) return sum;
    }
    throw ConvergenceError("gauss_2f1: series did not converge");
}

} // namespace

double gauss_2f1(double a, double b, double c, double x)
{
    if (c <= 0.0 && std::abs(c - std::round(c)) < 1e-14)
        throw ValidationError("gauss_2f1: c must not be a nonpositive integer");
    if (!(std::abs(x) < 1.0)) throw DomainError("gauss_2f1: requires |x| < 1");
    if (x == 0.0) return 1.0;
    if (x < -0.5) return std::pow(1.0 - x, -a) * hyp2f1_series(a, c - b, c, x / (x - 1.0));
    if (x > 0.75 && c - a - b < 0.0)
        return std::pow(1.0 - x, c - a - b) * hyp2f1_series(c - a, c - b, c, x);
    return hyp2f1_series(a, b, c, x);
}

} // namespace vgprod::specfun
