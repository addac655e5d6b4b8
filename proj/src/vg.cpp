#include "vgprod/vg.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/quadrature.hpp"
#include "vgprod/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace vgprod {

using specfun::pi;
using cplx = std::complex<double>;

double VgParams::gamma() const { return std::sqrt(gamma2()); }

void validate(const VgParams& p)
{
    if (!std::isfinite(p.m) || !(p.m > -0.5))
        throw ValidationError("shape must satisfy m > -1/2, got m = " + std::to_string(p.m));
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !(std::abs(p.beta) < p.alpha))
        throw ValidationError("parameters must satisfy 0 ≤ |β| < α, got alpha = " + std::to_string(p.alpha) +
                              ", beta = " + std::to_string(p.beta));
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

double log_norm_const(const VgParams& p)
{
    return (2.0 * p.m + 1.0) * 0.5 * std::log(p.gamma2()) - 0.5 * std::log(pi) - p.m * std::log(2.0 * p.alpha) -
           std::lgamma(p.m + 0.5);
}

} // namespace

double vg_log_pdf(const VgParams& p, double x)
{
    validate(p);
    double ax = std::abs(x);
    if (ax == 0.0) {
        if (p.m <= 0.0) throw DomainError("vg_pdf is unbounded at x = 0 when m <= 0");
        // |x|^m K_m(alpha |x|) -> Gamma(m) 2^(m-1) alpha^(-m)
        return log_norm_const(p) + std::lgamma(p.m) + (p.m - 1.0) * std::log(2.0) - p.m * std::log(p.alpha);
    }
    double y = p.alpha * ax;
    double k = specfun::bessel_k_scaled(p.m, y);
    if (!std::isfinite(k)) {
        // K_nu(y) overflowed, so y is tiny and K_nu(y) = Gamma(|nu|) 2^(|nu|-1) y^(-|nu|) to working precision
        double nu = std::abs(p.m);
        return log_norm_const(p) + p.beta * x + p.m * std::log(ax) + std::lgamma(nu) + (nu - 1.0) * std::log(2.0) -
               nu * std::log(y);
    }
    return log_norm_const(p) + p.beta * x + p.m * std::log(ax) + std::log(k) - y;
}

double vg_pdf(const VgParams& p, double x) { return std::exp(vg_log_pdf(p, x)); }

namespace {

// Integral of g over [a, inf), g carrying the origin singularity of the density.
quad::Result<double> half_line_mass(const std::function<double(double)>& g, double a, double scale, double tol)
{
    quad::Options opt{tol * 1e-2, tol * 1e-2, 4000};
    quad::Result<double> out;
    double split = std::max(a, scale);
    if (a < split) {
        auto r = quad::integrate_near_origin(g, a, split, opt);
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.converged = r.converged;
    } else {
        out.converged = true;
    }
    auto t = quad::integrate_tail(g, split, 1.0, scale, opt);
    out.value += t.value;
    out.abs_err += t.abs_err;
    out.converged = out.converged && t.converged;
    return out;
}

} // namespace

EvalResult vg_cdf(const VgParams& p, double x, double tol)
{
    validate(p);
    double scale = 1.0 / (p.alpha - std::abs(p.beta));
    EvalResult out;
    if (x <= 0.0) {
        auto g = [&](double y) { return y == 0.0 ? 0.0 : vg_pdf(p, -y); };
        auto r = half_line_mass(g, -x, scale, tol);
        out = {r.value, r.abs_err, r.converged};
    } else {
        auto g = [&](double y) { return y == 0.0 ? 0.0 : vg_pdf(p, y); };
        auto r = half_line_mass(g, x, scale, tol);
        out = {1.0 - r.value, r.abs_err, r.converged};
    }
    out.converged = out.converged && out.abs_err <= tol;
    return out;
}

double vg_prob_nonpositive(const VgParams& p)
{
    validate(p);
    double r = p.beta / p.alpha;
    if (r == 0.0) return 0.5;
    double lead = r * std::exp(std::lgamma(p.m + 1.0) - std::lgamma(p.m + 0.5)) / std::sqrt(pi);
    return 0.5 - lead * std::pow(1.0 - r * r, p.m + 0.5) * specfun::gauss_2f1(1.0, p.m + 1.0, 1.5, r * r);
}

namespace {

cplx mellin_half(const VgParams& p, cplx s, double beta, int terms)
{
    validate(p);
    cplx h = 0.5 * (s + 1.0);
    if (!(h.real() > 0.0) || !(h.real() + p.m > 0.0))
        throw DomainError("Mellin transform needs Re(s) > max(0, -2m) - 1");
    double r = 2.0 * beta / p.alpha;
    double lc = (2.0 * p.m + 1.0) * std::log(p.gamma() / p.alpha) - std::log(2.0 * std::sqrt(pi)) -
                std::lgamma(p.m + 0.5);
    cplx lscale = lc + s * std::log(2.0 / p.alpha);
    cplx sum = 0.0;
    double prev = 0.0;
    for (int j = 0; j < terms; ++j) {
        if (j > 0 && r == 0.0) return std::exp(lscale) * sum;
        cplx lt = specfun::log_gamma(h + 0.5 * j) + specfun::log_gamma(h + p.m + 0.5 * j) - std::lgamma(j + 1.0);
        if (j > 0) lt += j * std::log(std::abs(r));
        cplx term = std::exp(lt);
        if (r < 0.0 && j % 2 == 1) term = -term;
        sum += term;
        double mag = std::abs(term);
        // the term ratio tends to |beta/alpha| from above once it starts to fall
        if (j > 2 && mag < prev) {
            double q = mag / prev;
            if (q < 1.0 && mag * q / (1.0 - q) <= 1e-13 * std::abs(sum)) return std::exp(lscale) * sum;
        }
        prev = mag;
    }
    throw ConvergenceError("Mellin series did not converge within the term cap");
}

} // namespace

cplx vg_mellin_pos(const VgParams& p, cplx s, int terms) { return mellin_half(p, s, p.beta, terms); }
cplx vg_mellin_neg(const VgParams& p, cplx s, int terms) { return mellin_half(p, s, -p.beta, terms); }

std::string digest(const std::vector<VgParams>& factors)
{
    std::ostringstream text;
    text.precision(17);
    for (const auto& f : factors) text << f.m << ',' << f.alpha << ',' << f.beta << ';';
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SampleBatch vg_sample(const VgParams& p, std::size_t n, std::uint64_t seed)
{
    validate(p);
    if (n == 0) throw ValidationError("sample size must be at least 1");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> mix(p.m + 0.5, 2.0 / p.gamma2());
    std::normal_distribution<double> normal;
    SampleBatch out;
    out.seed = seed;
    out.spec_digest = digest({p});
    out.values.resize(n);
    for (auto& v : out.values) {
        double w = mix(rng);
        v = p.beta * w + std::sqrt(w) * normal(rng);
    }
    return out;
}

} // namespace vgprod
