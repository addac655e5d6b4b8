#include "vgprod/oracle.hpp"

#include "vgprod/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vgprod::oracle {

namespace {

using cplx = std::complex<double>;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
using GL = boost::math::quadrature::gauss<double, 12>;

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double pi = 3.141592653589793238462643383279502884;

struct Sum {
    double value = 0.0;
    double err = 0.0;
    double l1 = 0.0;

    template <class F>
    void add(F&& f, double a, double b, double tol)
    {
        double e = 0.0, l = 0.0;
        value += GK::integrate(f, a, b, 12, tol, &e, &l);
        err += e;
        l1 += l;
    }
};

double pdf_or_zero(const std::function<double(double)>& f, double x)
{
    if (x == 0.0 || !std::isfinite(x)) return 0.0;
    return f(x);
}

using LogDensity = std::function<double(double)>;

double log_or_minf(const LogDensity& lf, double x)
{
    if (x == 0.0 || !std::isfinite(x)) return -inf;
    return lf(x);
}

// int f(x) g(z/x) dx/|x| over x != 0, in u = ln|x|; densities enter as logs so that
// a singular factor never meets an underflowed one as inf * 0.
double convolve(const LogDensity& lf, double decay_f, const LogDensity& lg, double decay_g, double z, double tol)
{
    const double lz = std::log(std::abs(z));
    // beyond these the other factor is below e^{-60}
    double lo = lz - std::log(60.0 / decay_g), hi = std::log(60.0 / decay_f);
    if (lo > hi) std::swap(lo, hi);
    lo -= 1.0;
    hi += 1.0;
    Sum s;
    for (int sign : {1, -1}) {
        auto h = [&](double u) {
            double x = sign * std::exp(u);
            double a = log_or_minf(lf, x);
            if (a == -inf) return 0.0;
            return std::exp(a + log_or_minf(lg, z / x));
        };
        s.add(h, -inf, lo, tol);
        const int panels = 8;
        for (int k = 0; k < panels; ++k) s.add(h, lo + (hi - lo) * k / panels, lo + (hi - lo) * (k + 1) / panels, tol);
        s.add(h, hi, inf, tol);
    }
    if (!(s.err <= 1e3 * tol * s.l1 + 1e-300) || !std::isfinite(s.value))
        throw ConvergenceError("convolution_pdf: quadrature error estimate " + std::to_string(s.err) + " at z = " +
                               std::to_string(z));
    return s.value;
}

double decay(const VgParams& p) { return p.alpha - std::abs(p.beta); }

} // namespace

std::vector<ProductSpec> invariant_grid()
{
    const double ms[] = {-0.25, 0.0, 0.5, 2.0};
    const double rs[] = {0.0, 0.5, -0.5};
    std::vector<ProductSpec> out;
    for (int k = 0; k < 12; ++k) {
        std::vector<VgParams> f;
        for (int i = 0; i < 2 + k % 2; ++i) {
            double alpha = 1.0 + 0.25 * ((k + i) % 3);
            double r = k % 4 == 0 ? 0.0 : rs[(k + i) % 3];
            f.push_back({ms[(k / 2 + i) % 4], alpha, r * alpha});
        }
        out.emplace_back(f);
    }
    return out;
}

double convolution_pdf(const ProductSpec& spec, double z, double tol)
{
    const int N = spec.n();
    if (N < 2 || N > 3) throw ValidationError("convolution_pdf supports N = 2 or 3");
    if (z == 0.0) throw PoleError("convolution_pdf needs z != 0");
    auto factor = [&](int i) { return LogDensity([p = spec[i]](double x) { return vg_log_pdf(p, x); }); };
    if (N == 2) return convolve(factor(0), decay(spec[0]), factor(1), decay(spec[1]), z, tol);
    // the decay rate of a product is only used to place breakpoints
    double d23 = std::sqrt(decay(spec[1]) * decay(spec[2]));
    LogDensity rest = [&](double y) {
        return std::log(convolve(factor(1), decay(spec[1]), factor(2), decay(spec[2]), y, tol));
    };
    return convolve(factor(0), decay(spec[0]), rest, d23, z, tol);
}

SampleBatch mc_product_sample(const ProductSpec& spec, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw ValidationError("sample size must be at least 1");
    SampleBatch out;
    out.seed = seed;
    out.spec_digest = digest(spec.factors());
    out.values.assign(n, 1.0);
    for (int i = 0; i < spec.n(); ++i) {
        auto b = vg_sample(spec[i], n, seed ^ splitmix64(static_cast<std::uint64_t>(i)));
        for (std::size_t k = 0; k < n; ++k) out.values[k] *= b.values[k];
    }
    return out;
}

double ks_statistic(const SampleBatch& batch, const std::function<double(double)>& cdf)
{
    if (batch.n() < 10) throw ValidationError("ks_statistic needs at least 10 samples");
    std::vector<double> v = batch.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double F = cdf(v[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

KsBounds ks_statistic_grid(const SampleBatch& batch, const std::vector<double>& grid, const std::vector<double>& cdf,
                           double cdf_err)
{
    if (batch.n() < 10) throw ValidationError("ks_statistic needs at least 10 samples");
    if (grid.size() != cdf.size() || grid.empty()) throw ValidationError("grid and cdf values must match in size");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("the grid must be ascending");
    std::vector<double> v = batch.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    auto below = [&](double g) { return (std::lower_bound(v.begin(), v.end(), g) - v.begin()) / n; };
    auto at = [&](double g) { return (std::upper_bound(v.begin(), v.end(), g) - v.begin()) / n; };

    KsBounds out{0.0, 0.0};
    const std::size_t K = grid.size();
    for (std::size_t k = 0; k < K; ++k)
        out.lower = std::max({out.lower, std::abs(at(grid[k]) - cdf[k]), std::abs(below(grid[k]) - cdf[k])});
    // on [g_k, g_{k+1}) F and F_n are both monotone
    out.upper = std::max(below(grid[0]), cdf[0]);
    for (std::size_t k = 0; k + 1 < K; ++k)
        out.upper = std::max({out.upper, below(grid[k + 1]) - cdf[k], cdf[k + 1] - at(grid[k])});
    out.upper = std::max({out.upper, 1.0 - cdf[K - 1], 1.0 - at(grid[K - 1])});
    out.lower = std::clamp(out.lower - cdf_err, 0.0, 1.0);
    out.upper = std::clamp(out.upper + cdf_err, 0.0, 1.0);
    return out;
}

std::vector<double> ks_grid(const SampleBatch& batch, std::size_t cells)
{
    if (cells == 0 || batch.n() == 0) throw ValidationError("ks_grid needs samples and at least one cell");
    std::vector<double> v = batch.values;
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (std::size_t k = 0; k < cells; ++k) {
        auto i = static_cast<std::size_t>((k + 0.5) / cells * v.size());
        double g = v[std::min(i, v.size() - 1)];
        if (out.empty() || g > out.back()) out.push_back(g);
    }
    return out;
}

CfTable::CfTable(const ProductSpec& spec, double t_max, double tol, PdfSource source) : t_max_(std::abs(t_max))
{
    std::function<double(double)> f;
    if (source == PdfSource::convolution && spec.n() > 1)
        f = [&spec, tol](double z) { return convolution_pdf(spec, z, std::min(1e-10, tol * 1e-2)); };
    else
        f = [&spec, tol](double z) { return product_pdf(spec, z, std::min(1e-12, tol * 1e-3)).value; };

    double w_min = inf;
    for (int sign : {1, -1})
        for (const auto& s : subset_weights(spec, sign)) w_min = std::min(w_min, s.omega);
    const double a = spec.n() == 1 ? 1.0 / decay(spec[0]) : 1.0 / w_min;

    auto panel = [&](double lo, double hi, auto&& map, int sign) {
        double mass = 0.0;
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < GL::abscissa().size(); ++k) {
            for (double side : {-1.0, 1.0}) {
                if (k == 0 && side > 0.0 && GL::abscissa()[0] == 0.0) continue;
                auto [x, jac] = map(c + side * h * GL::abscissa()[k]);
                double fx = pdf_or_zero(f, sign * x);
                double w = h * GL::weights()[k] * jac;
                x_.push_back(sign * x);
                wf_.push_back(w * fx);
                mass += w * fx;
            }
        }
        return mass;
    };

    const bool symmetric = spec.symmetric();
    for (int sign : {1, -1}) {
        if (symmetric && sign < 0) break;
        // [0, a] in x = a v^4, with panels halving towards v = 0
        auto origin = [a](double v) { return std::pair{a * v * v * v * v, 4.0 * a * v * v * v}; };
        std::vector<double> vb{0.0};
        for (int k = 14; k >= 1; --k) vb.push_back(std::ldexp(1.0, -k));
        const int uniform = 2 + static_cast<int>(std::ceil(t_max_ * a / pi));
        for (int k = 1; k <= uniform; ++k) vb.push_back(0.5 + 0.5 * k / uniform);
        for (std::size_t k = 0; k + 1 < vb.size(); ++k) panel(vb[k], vb[k + 1], origin, sign);
        // [a, inf): panels no wider than one period, marching until the density is spent
        auto identity = [](double x) { return std::pair{x, 1.0}; };
        double lo = a;
        int quiet = 0;
        for (int k = 0; k < 200000 && quiet < 3; ++k) {
            double width = std::max(0.5 * a, 0.25 * lo);
            if (t_max_ > 0.0) width = std::min(width, 2.0 * pi / t_max_);
            double m = panel(lo, lo + width, identity, sign);
            quiet = m < 1e-3 * tol ? quiet + 1 : 0;
            lo += width;
        }
    }
    if (symmetric) {
        // mirror the half line; the e^{itz} + e^{-itz} pairing keeps the sum real
        const std::size_t half = x_.size();
        for (std::size_t k = 0; k < half; ++k) {
            x_.push_back(-x_[k]);
            wf_.push_back(wf_[k]);
        }
    }
}

cplx CfTable::operator()(double t) const
{
    if (std::abs(t) > t_max_ * (1.0 + 1e-12)) throw DomainError("CfTable: |t| exceeds the tabulated t_max");
    cplx sum = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) sum += wf_[k] * std::polar(1.0, t * x_[k]);
    return sum;
}

cplx cf_fourier(const ProductSpec& spec, double t, double tol, PdfSource source)
{
    if (t == 0.0) return CfTable(spec, 0.0, tol, source)(0.0);
    return CfTable(spec, std::abs(t), tol, source)(t);
}

} // namespace vgprod::oracle
