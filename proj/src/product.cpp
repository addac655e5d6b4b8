#include "vgprod/product.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/meijer.hpp"
#include "vgprod/mellin_barnes.hpp"
#include "vgprod/quadrature.hpp"
#include "vgprod/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace vgprod {

namespace {

using cplx = std::complex<double>;
using meijer::MeijerGSpec;
using specfun::pi;

constexpr double ln2 = 0.693147180559945309417232121458176568;
constexpr double inf = std::numeric_limits<double>::infinity();

void require_nonzero(double z)
{
    if (z == 0.0) throw PoleError("the product density is singular or undefined at z = 0 for N >= 2");
}

void require_symmetric(const ProductSpec& spec)
{
    if (!spec.symmetric()) throw ValidationError("this form needs every beta = 0");
}

void require_half_integer(const ProductSpec& spec)
{
    if (!spec.half_integer()) throw ValidationError("this form needs every m - 1/2 to be a nonnegative integer");
}

int half_index(double m) { return static_cast<int>(std::lround(m - 0.5)); }

double log_sum_exp(double a, double b)
{
    if (a == -inf) return b;
    if (b == -inf) return a;
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// log x with x = xi^2 z^2 / 4^N
double log_symmetric_arg(const ProductSpec& spec, double z)
{
    return 2.0 * std::log(spec.xi()) + 2.0 * std::log(std::abs(z)) - 2.0 * spec.n() * ln2;
}

Tolerance scaled(Tolerance tol, double scale, double count = 1.0)
{
    return {tol.abs / (scale * count), tol.rel};
}

// Odometer over 0 <= j_i <= top_i.
bool next_index(std::vector<int>& j, const std::vector<int>& top)
{
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] < top[i]) {
            ++j[i];
            return true;
        }
        j[i] = 0;
    }
    return false;
}

// ---- contour integral for general beta ----

// log 2F1(a, b; c; x) for 0 <= x < 1 by its power series
cplx log_hyp_series(double a, double b, cplx c, double x)
{
    cplx term = 1.0, sum = 1.0;
    for (int k = 0; k < 200000; ++k) {
        cplx ratio = (a + k) * (b + k) * x / ((c + static_cast<double>(k)) * (k + 1.0));
        term *= ratio;
        sum += term;
        if (term == 0.0) return std::log(sum);
        double rho = std::max(std::sqrt(std::norm(ratio)), x);
        double q = rho / (1.0 - rho);
        if (rho < 1.0 && std::norm(term) * q * q <= 1e-34 * std::norm(sum)) return std::log(sum);
    }
    throw ConvergenceError("hypergeometric series in the product density did not converge");
}

// Mellin transforms of one factor's density on each half-line:
// log of the integral of y^{w-1} f(y) (pos) or y^{w-1} f(-y) (neg) over y > 0.
struct HalfMellin {
    double m, log_lp, log_lm, x_pos, x_neg, base_pos, base_neg;
    bool symmetric;

    explicit HalfMellin(const VgParams& p) : m(p.m), symmetric(p.beta == 0.0)
    {
        log_lp = std::log(p.lambda_plus());
        log_lm = std::log(p.lambda_minus());
        x_pos = p.lambda_plus() / (2.0 * p.alpha);
        x_neg = p.lambda_minus() / (2.0 * p.alpha);
        double common = (2.0 * m + 1.0) * std::log(p.gamma()) - std::lgamma(m + 0.5) - (m + 0.5) * std::log(2.0 * p.alpha);
        base_pos = common + (m + 0.5) * log_lm;
        base_neg = common + (m + 0.5) * log_lp;
    }

    // lg_w = log Gamma(w), shared by all factors
    std::pair<cplx, cplx> operator()(cplx w, cplx lg_w) const
    {
        cplx core = lg_w + specfun::log_gamma(w + 2.0 * m) - specfun::log_gamma(w + m + 0.5);
        cplx c = w + m + 0.5;
        cplx f_pos = log_hyp_series(0.5 - m, m + 0.5, c, x_pos);
        cplx f_neg = symmetric ? f_pos : log_hyp_series(0.5 - m, m + 0.5, c, x_neg);
        return {base_pos + core - (w + 2.0 * m) * log_lm + f_pos, base_neg + core - (w + 2.0 * m) * log_lp + f_neg};
    }
};

// Sum over the sign patterns in S_N^+ or S_N^- of the products of half-line transforms, at w = -s.
// Every term is positive on the real axis, so the sum has no cancellation there.
struct SubsetIntegrand {
    std::vector<HalfMellin> factors;
    std::vector<unsigned> masks;
    double log_z;

    SubsetIntegrand(const ProductSpec& spec, int sign, double lz) : log_z(lz)
    {
        for (const auto& p : spec.factors()) factors.emplace_back(p);
        for (const auto& s : subset_weights(spec, sign)) masks.push_back(s.subset.members);
    }

    cplx log_transform(cplx s) const
    {
        cplx w = -s;
        cplx lg_w = specfun::log_gamma(w);
        const std::size_t n = factors.size();
        std::vector<cplx> lpos(n), lneg(n);
        for (std::size_t i = 0; i < n; ++i) std::tie(lpos[i], lneg[i]) = factors[i](w, lg_w);
        std::vector<cplx> terms;
        terms.reserve(masks.size());
        double top = -inf;
        for (unsigned mask : masks) {
            cplx l = 0.0;
            for (std::size_t i = 0; i < n; ++i) l += ((mask >> i) & 1u) ? lneg[i] : lpos[i];
            terms.push_back(l);
            top = std::max(top, l.real());
        }
        cplx sum = 0.0;
        for (const auto& l : terms) sum += std::exp(l - top);
        return top + std::log(sum);
    }

    cplx operator()(cplx s) const { return log_transform(s) + s * log_z; }
    double majorant(double c) const { return (*this)(cplx(c, 0.0)).real(); }
};

// log of the constant in front of the integral, including the 2^{N-1} of the parity split
double log_general_prefactor(const ProductSpec& spec)
{
    int N = spec.n();
    double v = spec.log_eta() - (2.0 * N - 1.0) * ln2 - 0.5 * N * std::log(pi) + (N - 1.0) * ln2;
    for (const auto& p : spec.factors()) v += (2.0 * p.m + 1.0) * std::log(p.gamma()) - 2.0 * p.m * std::log(p.alpha);
    return v;
}

// ---- origin form: coef |z|^p (c (-ln|z|))^n ----

struct OriginForm {
    double log_coef = 0.0;
    double power = 0.0;
    double log_factor = 1.0;
    int n = 0;

    double operator()(double z) const
    {
        double l = -std::log(std::abs(z));
        return std::exp(log_coef + power * std::log(std::abs(z))) * std::pow(log_factor * l, n);
    }

    // integral over (0, delta)
    double mass(double delta) const
    {
        double q = power + 1.0;
        double L = -std::log(delta);
        return std::exp(log_coef) * std::pow(log_factor, n) * boost::math::tgamma(n + 1.0, q * L) / std::pow(q, n + 1.0);
    }
};

OriginForm origin_form(const ProductSpec& spec)
{
    std::vector<VgParams> f = spec.factors();
    std::stable_sort(f.begin(), f.end(), [](const VgParams& a, const VgParams& b) { return a.m < b.m; });
    const int N = spec.n();
    const double eps = 1e-12;
    OriginForm out;
    const double m1 = f[0].m;
    if (m1 < -eps) {
        int t = 0;
        while (t < N && std::abs(f[t].m - m1) <= eps) ++t;
        double v = N * std::lgamma(-m1) + spec.log_eta() - N * (1.0 + 2.0 * m1) * ln2 - 0.5 * N * std::log(pi) -
                   std::lgamma(static_cast<double>(t));
        for (int i = 0; i < N; ++i) v += (2.0 * f[i].m + 1.0) * std::log(f[i].gamma());
        for (int i = t; i < N; ++i) {
            double q = f[i].beta / f[i].alpha;
            v += 2.0 * (m1 - f[i].m) * std::log(f[i].alpha) + std::lgamma(f[i].m - m1) +
                 std::log(specfun::gauss_2f1(-m1, f[i].m - m1, 0.5, q * q));
        }
        out.log_coef = v;
        out.power = 2.0 * m1;
        out.log_factor = 2.0;
        out.n = t - 1;
        return out;
    }
    int t = 0;
    while (t < N && std::abs(f[t].m) <= eps) ++t;
    double v = (t - 1.0) * ln2 + spec.log_eta() - std::lgamma(N + t + 0.0) - 0.5 * N * std::log(pi);
    for (int i = 0; i < t; ++i) v += std::log(f[i].gamma());
    for (int i = t; i < N; ++i)
        v += (2.0 * f[i].m + 1.0) * std::log(f[i].gamma()) - 2.0 * f[i].m * std::log(f[i].alpha) + std::lgamma(f[i].m);
    out.log_coef = v;
    out.power = 0.0;
    out.log_factor = 1.0;
    out.n = N + t - 1;
    return out;
}

// ---- half-line masses ----

double min_omega(const ProductSpec& spec, int sign)
{
    double w = inf;
    for (const auto& s : subset_weights(spec, sign)) w = std::min(w, s.omega);
    return w;
}

// Integral of f(sign * y) over y in [a, inf), a >= 0.
EvalResult half_mass(const ProductSpec& spec, double a, int sign, Tolerance tol)
{
    Tolerance inner{std::min(1e-15, tol.abs * 1e-3), std::min(1e-11, tol.rel * 1e-2)};
    auto f = [&](double y) {
        if (y <= 0.0) return 0.0;
        return product_pdf(spec, sign * y, inner).value;
    };
    quad::Options q;
    q.abs_tol = 0.25 * tol.abs;
    q.rel_tol = 0.25 * tol.rel;
    const double split = 1.0 / min_omega(spec, sign);

    EvalResult out;
    out.converged = true;
    auto add = [&](const quad::Result<double>& r) {
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.converged = out.converged && r.converged;
    };
    if (a < split) {
        double lo = a;
        if (a < 1e-10) {
            auto form = origin_form(spec);
            double delta = 1e-10;
            while (delta > 1e-30 && form.mass(delta) > 1e-3 * tol.abs) delta *= 1e-2;
            double m0 = form.mass(delta) - (a > 0.0 ? form.mass(std::min(a, delta)) : 0.0);
            if (a < delta) {
                out.value += m0;
                out.abs_err += 0.1 * m0;
            }
            lo = std::max(a, delta);
        }
        add(quad::integrate_near_origin(f, lo, split, q));
        add(quad::integrate_tail(f, split, 1.0, split, q));
    } else {
        add(quad::integrate_tail(f, a, 1.0, a, q));
    }
    out.converged = out.converged && tol.met(out.abs_err, out.value);
    return out;
}

// ---- tails ----

double log_tail_common(const ProductSpec& spec)
{
    int N = spec.n();
    double v = 0.5 * (N - 1.0) * std::log(2.0 * pi) + spec.log_eta() - 0.5 * std::log(static_cast<double>(N));
    for (const auto& p : spec.factors()) v += (2.0 * p.m + 1.0) * std::log(p.gamma()) - (p.m + 0.5) * std::log(2.0 * p.alpha);
    return v;
}

double log_lambda_weight(const ProductSpec& spec, SignedSubset s, double shift)
{
    double v = 0.0;
    for (int i = 0; i < spec.n(); ++i) {
        const auto& p = spec[i];
        double lam = s.contains(i) ? p.lambda_plus() : p.lambda_minus();
        v += (spec.mu_n() - p.m + shift) * std::log(lam);
    }
    return v;
}

int side_sign(double z, Side side)
{
    int sg = side == Side::upper ? 1 : -1;
    if (!(z * sg > 0.0)) throw DomainError("the upper tail needs z > 0 and the lower tail z < 0");
    return sg;
}

// shift is -(N+1)/(2N) for the CDF and (1-N)/(2N) for the PDF; power is the exponent of |z|
double tail_sum(const ProductSpec& spec, double w, int sign, TailForm form, double shift, double power, bool density)
{
    const int N = spec.n();
    const double rootN = 1.0 / N;
    if (form == TailForm::automatic) form = spec.symmetric() ? TailForm::symmetric : TailForm::subset_sum;
    if (form == TailForm::symmetric) {
        require_symmetric(spec);
        double lx = std::log(spec.xi() * w);
        double v = 0.5 * (N - 1.0) * std::log(pi) + spec.log_eta() - (N * (spec.mu_n() - 1.0) + 1.5) * ln2 -
                   0.5 * std::log(static_cast<double>(N)) + power * lx - N * std::exp(lx * rootN);
        if (density) v += std::log(spec.xi());
        return std::exp(v);
    }
    auto subsets = subset_weights(spec, sign);
    double common = log_tail_common(spec) + power * std::log(w);
    if (form == TailForm::dominant) {
        std::sort(subsets.begin(), subsets.end(), [](const SubsetWeight& a, const SubsetWeight& b) { return a.omega < b.omega; });
        if (subsets.size() > 1 && subsets[1].omega - subsets[0].omega <= 1e-12 * subsets[0].omega)
            throw DomainError("several subsets attain the minimal omega; use the full subset sum");
        subsets.resize(1);
    }
    double acc = -inf;
    for (const auto& s : subsets)
        acc = log_sum_exp(acc, log_lambda_weight(spec, s.subset, shift) - N * std::pow(s.omega * w, rootN));
    return std::exp(common + acc);
}

} // namespace

// ---- ProductSpec ----

ProductSpec::ProductSpec(std::vector<VgParams> factors) : factors_(std::move(factors))
{
    if (factors_.empty()) throw ValidationError("a product needs N >= 1 factors");
    if (n() > max_factors) throw ValidationError("at most 12 factors are supported (2^N subset enumeration)");
    double log_xi = 0.0, msum = 0.0;
    for (const auto& p : factors_) {
        validate(p);
        log_xi += std::log(p.alpha);
        log_eta_ -= std::lgamma(p.m + 0.5);
        msum += p.m;
    }
    xi_ = std::exp(log_xi);
    mu_n_ = msum / n();
}

double ProductSpec::eta() const { return std::exp(log_eta_); }

bool ProductSpec::symmetric() const
{
    return std::all_of(factors_.begin(), factors_.end(), [](const VgParams& p) { return p.beta == 0.0; });
}

bool ProductSpec::half_integer() const
{
    return std::all_of(factors_.begin(), factors_.end(), [](const VgParams& p) {
        double k = p.m - 0.5;
        return k >= -1e-12 && std::abs(k - std::round(k)) <= 1e-12;
    });
}

bool ProductSpec::identical() const
{
    const auto& f = factors_.front();
    return std::all_of(factors_.begin(), factors_.end(),
                       [&](const VgParams& p) { return p.m == f.m && p.alpha == f.alpha && p.beta == f.beta; });
}

// ---- subsets ----

int SignedSubset::size() const { return std::popcount(members); }

double omega(const ProductSpec& spec, SignedSubset s)
{
    double w = 1.0;
    for (int i = 0; i < spec.n(); ++i) w *= s.contains(i) ? spec[i].lambda_plus() : spec[i].lambda_minus();
    return w;
}

std::vector<SubsetWeight> subset_weights(const ProductSpec& spec, int sign)
{
    if (sign == 0) throw DomainError("subset family needs a nonzero sign");
    std::vector<SubsetWeight> out;
    const unsigned count = 1u << spec.n();
    for (unsigned mask = 0; mask < count; ++mask) {
        SignedSubset s{mask};
        if (s.odd() == (sign < 0)) out.push_back({s, omega(spec, s)});
    }
    return out;
}

int subset_coefficient(const std::vector<int>& j, int sign)
{
    if (j.empty()) throw ValidationError("a-coefficient needs N >= 1 indices");
    bool all_even = std::all_of(j.begin(), j.end(), [](int v) { return v % 2 == 0; });
    bool all_odd = std::all_of(j.begin(), j.end(), [](int v) { return v % 2 != 0; });
    int half = 1 << (j.size() - 1);
    if (all_even) return half;
    if (all_odd) return sign > 0 ? half : -half;
    return 0;
}

int subset_coefficient_enumerated(const std::vector<int>& j, int sign)
{
    const unsigned count = 1u << j.size();
    int total = 0;
    for (unsigned mask = 0; mask < count; ++mask) {
        SignedSubset s{mask};
        if (s.odd() != (sign < 0)) continue;
        int term = 1;
        for (std::size_t k = 0; k < j.size(); ++k)
            if (s.contains(static_cast<int>(k)) && j[k] % 2 != 0) term = -term;
        total += term;
    }
    return total;
}

// ---- densities ----

EvalResult product_pdf(const ProductSpec& spec, double z, Tolerance tol)
{
    if (spec.n() == 1) {
        EvalResult r;
        r.value = vg_pdf(spec[0], z);
        r.abs_err = 4e-15 * r.value;
        r.converged = true;
        return r;
    }
    require_nonzero(z);
    if (spec.half_integer()) return product_pdf_halfint(spec, z, tol);
    if (spec.symmetric()) return product_pdf_symmetric(spec, z, tol);
    return product_pdf_general(spec, z, tol);
}

EvalResult product_pdf_general(const ProductSpec& spec, double z, Tolerance tol)
{
    require_nonzero(z);
    const double log_z = std::log(std::abs(z));
    SubsetIntegrand h(spec, z > 0.0 ? 1 : -1, log_z);
    double c_max = 0.0;
    for (const auto& p : spec.factors()) c_max = std::min(c_max, 2.0 * p.m);
    double c = mb::minimize_on_strip([&](double s) { return h.majorant(s); }, -inf, c_max);
    mb::LineOptions opt;
    opt.abs_tol = tol.abs;
    opt.rel_tol = tol.rel;
    opt.conj_symmetric = true;
    opt.feature = c_max - c;
    opt.frequency = std::abs(log_z);
    auto r = mb::integrate_line([&](cplx s) { return h(s); }, c, opt);
    EvalResult out;
    out.value = r.value.real();
    out.abs_err = r.abs_err;
    if (out.value < 0.0 && -out.value <= out.abs_err) out.value = 0.0;
    out.converged = r.converged && std::isfinite(out.value);
    return out;
}

EvalResult product_pdf_series(const ProductSpec& spec, double z, Tolerance tol)
{
    require_nonzero(z);
    const int N = spec.n();
    const int sign = z > 0.0 ? 1 : -1;
    const double x = std::exp(log_symmetric_arg(spec, z));
    const double log_pref = log_general_prefactor(spec) - (N - 1.0) * ln2;
    std::vector<double> r(N);
    for (int i = 0; i < N; ++i) r[i] = 2.0 * spec[i].beta / spec[i].alpha;

    EvalResult out;
    out.converged = false;
    int quiet = 0;
    const int max_shell = 400;
    for (int J = 0; J <= max_shell && quiet < 2; ++J) {
        // compositions of J into N parts, skipping a = 0 and zero-r factors with j > 0
        std::vector<int> j(N, 0);
        double shell = 0.0, shell_err = 0.0;
        bool any = false;
        std::vector<int> top(N, J);
        do {
            if (std::accumulate(j.begin(), j.end(), 0) != J) continue;
            int a = subset_coefficient(j, sign);
            if (a == 0) continue;
            double lw = log_pref;
            double sg = a;
            bool zero = false;
            for (int i = 0; i < N; ++i) {
                if (j[i] == 0) continue;
                if (r[i] == 0.0) {
                    zero = true;
                    break;
                }
                lw += j[i] * std::log(std::abs(r[i])) - std::lgamma(j[i] + 1.0);
                if (r[i] < 0.0 && j[i] % 2 != 0) sg = -sg;
            }
            if (zero) continue;
            any = true;
            std::vector<double> b(2 * N);
            for (int i = 0; i < N; ++i) {
                b[i] = 0.5 * j[i];
                b[N + i] = spec[i].m + 0.5 * j[i];
            }
            double w = std::exp(lw);
            auto g = meijer::eval_g_q0(meijer::make_q0(b), x, Tolerance{1e-300, tol.rel * 1e-2});
            shell += sg * w * g.value;
            shell_err += w * g.abs_err;
        } while (next_index(j, top));
        out.value += shell;
        out.abs_err += shell_err;
        if (!any) continue;
        quiet = std::abs(shell) < 0.1 * std::max(tol.abs, tol.rel * std::abs(out.value)) ? quiet + 1 : 0;
    }
    out.converged = quiet >= 2;
    return out;
}

EvalResult product_pdf_symmetric(const ProductSpec& spec, double z, Tolerance tol)
{
    require_symmetric(spec);
    require_nonzero(z);
    const int N = spec.n();
    double scale = spec.xi() * spec.eta() / std::exp(N * ln2 + 0.5 * N * std::log(pi));
    std::vector<double> b(N, 0.0);
    for (const auto& p : spec.factors()) b.push_back(p.m);
    auto g = meijer::eval_g_q0(meijer::make_q0(b), std::exp(log_symmetric_arg(spec, z)), scaled(tol, scale));
    return {scale * g.value, scale * g.abs_err, g.converged};
}

EvalResult product_pdf_halfint(const ProductSpec& spec, double z, Tolerance tol)
{
    require_half_integer(spec);
    require_nonzero(z);
    const int N = spec.n();
    std::vector<int> top(N);
    double log_p = 0.0;
    for (int i = 0; i < N; ++i) {
        const auto& p = spec[i];
        top[i] = half_index(p.m);
        log_p += (2.0 * p.m + 1.0) * std::log(p.gamma()) - (p.m + 0.5) * std::log(2.0 * p.alpha) - std::lgamma(top[i] + 1.0);
    }
    auto subsets = subset_weights(spec, z > 0.0 ? 1 : -1);
    double count = static_cast<double>(subsets.size());
    for (int t : top) count *= t + 1;

    EvalResult out;
    out.converged = true;
    std::vector<int> j(N, 0);
    do {
        double lc = log_p;
        std::vector<double> b(N);
        for (int i = 0; i < N; ++i) {
            lc += std::lgamma(top[i] + j[i] + 1.0) - std::lgamma(top[i] - j[i] + 1.0) - std::lgamma(j[i] + 1.0);
            b[i] = top[i] - j[i];
        }
        auto g_spec = meijer::make_q0(b);
        for (const auto& s : subsets) {
            double lw = lc;
            for (int i = 0; i < N; ++i) {
                const auto& p = spec[i];
                double lam = s.subset.contains(i) ? p.lambda_plus() : p.lambda_minus();
                lw += (j[i] + 0.5 - p.m) * std::log(lam) - j[i] * std::log(2.0 * p.alpha);
            }
            double w = std::exp(lw);
            auto g = meijer::eval_g_q0(g_spec, s.omega * std::abs(z), scaled(tol, w, count));
            out.value += w * g.value;
            out.abs_err += w * g.abs_err;
            out.converged = out.converged && g.converged;
        }
    } while (next_index(j, top));
    return out;
}

// ---- distribution functions ----

EvalResult product_cdf_symmetric(const ProductSpec& spec, double z, Tolerance tol)
{
    require_symmetric(spec);
    if (z == 0.0) return {0.5, 0.0, true};
    const int N = spec.n();
    const double sg = z > 0.0 ? 0.5 : -0.5;
    EvalResult out;
    out.converged = true;
    if (spec.half_integer()) {
        std::vector<int> top(N);
        double log_p = 0.0;
        for (int i = 0; i < N; ++i) {
            top[i] = half_index(spec[i].m);
            log_p += (0.5 - spec[i].m) * ln2 - std::lgamma(top[i] + 1.0);
        }
        double count = 1.0;
        for (int t : top) count *= t + 1;
        std::vector<int> j(N, 0);
        double sum = 0.0;
        do {
            double lc = log_p;
            MeijerGSpec g{N, 1, {1.0}, {}};
            for (int i = 0; i < N; ++i) {
                lc += std::lgamma(top[i] + j[i] + 1.0) - std::lgamma(top[i] - j[i] + 1.0) - std::lgamma(j[i] + 1.0) -
                      j[i] * ln2;
                g.b.push_back(spec[i].m + 0.5 - j[i]);
            }
            g.b.push_back(0.0);
            double w = std::exp(lc);
            auto r = meijer::eval_g_cdf_class(g, spec.xi() * std::abs(z), scaled(tol, 0.5 * w, count));
            sum += w * r.value;
            out.abs_err += 0.5 * w * r.abs_err;
            out.converged = out.converged && r.converged;
        } while (next_index(j, top));
        out.value = 0.5 + sg * sum;
        return out;
    }
    MeijerGSpec g{2 * N, 1, {1.0}, std::vector<double>(N, 0.5)};
    for (const auto& p : spec.factors()) g.b.push_back(p.m + 0.5);
    g.b.push_back(0.0);
    double scale = spec.eta() / std::exp(0.5 * N * std::log(pi));
    auto r = meijer::eval_g_cdf_class(g, std::exp(log_symmetric_arg(spec, z)), scaled(tol, 0.5 * scale));
    out.value = 0.5 + sg * scale * r.value;
    out.abs_err = 0.5 * scale * r.abs_err;
    out.converged = r.converged;
    return out;
}

EvalResult product_cdf_numeric(const ProductSpec& spec, double z, Tolerance tol)
{
    if (z <= 0.0) return half_mass(spec, -z, -1, tol);
    auto r = half_mass(spec, z, 1, tol);
    r.value = 1.0 - r.value;
    return r;
}

EvalResult product_ccdf_numeric(const ProductSpec& spec, double z, Tolerance tol)
{
    if (z > 0.0) return half_mass(spec, z, 1, tol);
    auto r = half_mass(spec, -z, -1, tol);
    r.value = 1.0 - r.value;
    return r;
}

std::vector<EvalResult> product_cdf_table(const ProductSpec& spec, const std::vector<double>& grid, Tolerance tol)
{
    if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("the CDF grid must be ascending");
    std::vector<EvalResult> out(grid.size());
    if (grid.empty()) return out;
    const double cells = static_cast<double>(grid.size());
    Tolerance inner{std::min(1e-15, tol.abs * 1e-3), std::min(1e-11, tol.rel * 1e-2)};
    auto f = [&](double y) { return y == 0.0 ? 0.0 : product_pdf(spec, y, inner).value; };
    quad::Options q;
    q.abs_tol = 0.5 * tol.abs / cells;
    q.rel_tol = 0.5 * tol.rel;
    auto cell = [&](double a, double b) {
        auto r = quad::integrate(f, a, b, q);
        return EvalResult{r.value, r.abs_err, r.converged};
    };
    const auto first_pos = std::upper_bound(grid.begin(), grid.end(), 0.0) - grid.begin();
    const auto end_neg = std::lower_bound(grid.begin(), grid.end(), 0.0) - grid.begin();
    for (auto i = end_neg; i < first_pos; ++i) out[i] = {prob_nonpositive(spec), 1e-15, true};
    for (std::ptrdiff_t i = 0; i < end_neg; ++i) {
        if (i == 0) {
            out[i] = half_mass(spec, -grid[i], -1, tol);
            continue;
        }
        auto c = cell(grid[i - 1], grid[i]);
        out[i] = {out[i - 1].value + c.value, out[i - 1].abs_err + c.abs_err, out[i - 1].converged && c.converged};
    }
    const auto last = static_cast<std::ptrdiff_t>(grid.size()) - 1;
    for (std::ptrdiff_t i = last; i >= first_pos; --i) {
        if (i == last) {
            auto r = half_mass(spec, grid[i], 1, tol);
            out[i] = {1.0 - r.value, r.abs_err, r.converged};
            continue;
        }
        auto c = cell(grid[i], grid[i + 1]);
        out[i] = {out[i + 1].value - c.value, out[i + 1].abs_err + c.abs_err, out[i + 1].converged && c.converged};
    }
    return out;
}

double prob_nonpositive(const ProductSpec& spec)
{
    const int N = spec.n();
    std::vector<double> P(N);
    for (int i = 0; i < N; ++i) P[i] = vg_prob_nonpositive(spec[i]);
    double total = 0.0;
    for (unsigned mask = 1; mask < (1u << N); ++mask) {
        SignedSubset s{mask};
        double term = std::pow(-2.0, s.size() - 1);
        for (int i = 0; i < N; ++i)
            if (s.contains(i)) term *= P[i];
        total += term;
    }
    return total;
}

double prob_nonpositive_identical(const ProductSpec& spec)
{
    if (!spec.identical()) throw ValidationError("the shortcut needs identical factors");
    double P = vg_prob_nonpositive(spec[0]);
    return 0.5 - 0.5 * std::pow(1.0 - 2.0 * P, spec.n());
}

// ---- characteristic functions ----

ComplexEvalResult product_cf_symmetric(const ProductSpec& spec, double t, Tolerance tol)
{
    require_symmetric(spec);
    if (t == 0.0) return {1.0, 0.0, true};
    const int N = spec.n();
    MeijerGSpec g{2 * N - 1, 1, {0.5}, std::vector<double>(N - 1, 0.0)};
    for (const auto& p : spec.factors()) g.b.push_back(p.m);
    double scale = spec.xi() * spec.eta() / (std::exp((N - 1.0) * ln2 + 0.5 * (N - 1.0) * std::log(pi)) * std::abs(t));
    double x = std::exp(2.0 * std::log(spec.xi()) - 2.0 * (N - 1.0) * ln2 - 2.0 * std::log(std::abs(t)));
    auto r = meijer::eval_g_cf_class(g, cplx(x, 0.0), scaled(tol, scale));
    return {cplx(scale * r.value.real(), 0.0), scale * r.abs_err, r.converged};
}

ComplexEvalResult product_cf_halfint(const ProductSpec& spec, double t, Tolerance tol)
{
    require_half_integer(spec);
    if (t == 0.0) return {1.0, 0.0, true};
    const int N = spec.n();
    std::vector<int> top(N);
    double log_p = 0.0;
    for (int i = 0; i < N; ++i) {
        const auto& p = spec[i];
        top[i] = half_index(p.m);
        log_p += (2.0 * p.m + 1.0) * std::log(p.gamma()) - (p.m + 0.5) * std::log(2.0 * p.alpha) - std::lgamma(top[i] + 1.0);
    }
    double count = static_cast<double>(1u << N);
    for (int k : top) count *= k + 1;
    const double scale = 1.0 / std::abs(t);

    ComplexEvalResult out;
    out.converged = true;
    cplx sum = 0.0;
    std::vector<int> j(N, 0);
    do {
        double lc = log_p;
        MeijerGSpec g{N, 1, {0.0}, {}};
        for (int i = 0; i < N; ++i) {
            lc += std::lgamma(top[i] + j[i] + 1.0) - std::lgamma(top[i] - j[i] + 1.0) - std::lgamma(j[i] + 1.0);
            g.b.push_back(top[i] - j[i]);
        }
        for (int sign : {1, -1}) {
            for (const auto& s : subset_weights(spec, sign)) {
                double lw = lc;
                for (int i = 0; i < N; ++i) {
                    const auto& p = spec[i];
                    double lam = s.subset.contains(i) ? p.lambda_plus() : p.lambda_minus();
                    lw += (j[i] + 0.5 - p.m) * std::log(lam) - j[i] * std::log(2.0 * p.alpha);
                }
                double w = std::exp(lw);
                auto r = meijer::eval_g_cf_class(g, cplx(0.0, sign * s.omega / t), scaled(tol, w * scale, count));
                sum += static_cast<double>(sign) * w * r.value;
                out.abs_err += w * scale * r.abs_err;
                out.converged = out.converged && r.converged;
            }
        }
    } while (next_index(j, top));
    out.value = cplx(0.0, 1.0 / t) * sum;
    return out;
}

// ---- asymptotics ----

double pdf_origin_asymptotic(const ProductSpec& spec, double z)
{
    if (!(std::abs(z) > 0.0 && std::abs(z) < 1.0)) throw DomainError("the origin form needs 0 < |z| < 1");
    return origin_form(spec)(z);
}

double tail_asymptotic_cdf(const ProductSpec& spec, double z, Side side, TailForm form)
{
    int sg = side_sign(z, side);
    const int N = spec.n();
    return tail_sum(spec, std::abs(z), sg, form, -(N + 1.0) / (2.0 * N), spec.mu_n() - 1.0 / (2.0 * N), false);
}

double tail_asymptotic_pdf(const ProductSpec& spec, double z, Side side, TailForm form)
{
    int sg = side_sign(z, side);
    const int N = spec.n();
    return tail_sum(spec, std::abs(z), sg, form, (1.0 - N) / (2.0 * N), spec.mu_n() + 1.0 / (2.0 * N) - 1.0, true);
}

double quantile_asymptotic(const ProductSpec& spec, double p)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantiles need p in (0, 1)");
    const int N = spec.n();
    double nn = std::pow(static_cast<double>(N), N);
    if (p >= 0.5) return std::pow(-std::log1p(-p), N) / (nn * min_omega(spec, 1));
    return -std::pow(-std::log(p), N) / (nn * min_omega(spec, -1));
}

EvalResult quantile_numeric(const ProductSpec& spec, double p, double tol)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantiles need p in (0, 1)");
    const double p0 = spec.symmetric() ? 0.5 : prob_nonpositive(spec);
    if (p == p0) return {0.0, 0.0, true};
    const bool upper = p > p0;
    const int sign = upper ? 1 : -1;
    const double target = upper ? std::log1p(-p) : std::log(p);
    Tolerance inner{tol * 1e-2, 1e-10};

    // log of the mass beyond y on the relevant side, y >= 0
    auto beyond = [&](double y) {
        if (spec.symmetric()) return product_cdf_symmetric(spec, -y, inner).value;
        return half_mass(spec, y, sign, inner).value;
    };
    auto g = [&](double y) { return std::log(beyond(y)) - target; };

    double y0 = std::abs(quantile_asymptotic(spec, upper ? std::max(p, 0.5) : std::min(p, 0.5 - 1e-12)));
    if (!(y0 > 0.0) || !std::isfinite(y0)) y0 = 1.0 / min_omega(spec, sign);
    double lo = y0, hi = y0;
    double glo = g(y0), ghi = glo;
    if (glo > 0.0) {
        for (int k = 0; k < 200 && ghi > 0.0; ++k) {
            lo = hi;
            glo = ghi;
            hi *= 2.0;
            ghi = g(hi);
        }
    } else {
        for (int k = 0; k < 200 && glo <= 0.0; ++k) {
            hi = lo;
            ghi = glo;
            lo = k < 60 ? 0.5 * lo : 0.0;
            glo = g(lo);
            if (lo == 0.0) break;
        }
    }
    if (!(glo > 0.0 && ghi <= 0.0)) throw ConvergenceError("quantile bracket expansion failed");

    std::uintmax_t iters = 200;
    auto root = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(48), iters);
    double y = 0.5 * (root.first + root.second);
    EvalResult out;
    out.value = sign * y;
    double mass = beyond(y);
    double target_mass = upper ? 1.0 - p : p;
    out.abs_err = std::abs(mass - target_mass) + std::abs(root.second - root.first);
    out.converged = std::abs(mass - target_mass) <= std::max(tol, 1e-12);
    return out;
}

} // namespace vgprod
