#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace vgprod::quad {

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 4000;
};

template <class T>
struct Result {
    T value{};
    double abs_err = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Segment {
    double a, b;
    T value;
    double err;
    bool at_floor;
    bool operator<(const Segment& o) const { return err < o.err; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b)
{
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    std::array<T, 15> fv;
    fv[7] = f(c);
    for (int j = 0; j < 7; ++j) {
        double dx = h * xgk[j];
        fv[j] = f(c - dx);
        fv[14 - j] = f(c + dx);
    }
    T resk = fv[7] * wgk[7];
    T resg = fv[7] * wg[3];
    double resabs = magnitude(fv[7]) * wgk[7];
    for (int j = 0; j < 7; ++j) {
        resk += (fv[j] + fv[14 - j]) * wgk[j];
        resabs += (magnitude(fv[j]) + magnitude(fv[14 - j])) * wgk[j];
        if (j % 2 == 1) resg += (fv[j] + fv[14 - j]) * wg[j / 2];
    }
    T mean = resk * 0.5;
    double resasc = magnitude(fv[7] - mean) * wgk[7];
    for (int j = 0; j < 7; ++j)
        resasc += (magnitude(fv[j] - mean) + magnitude(fv[14 - j] - mean)) * wgk[j];
    double ah = std::abs(h);
    double err = magnitude((resk - resg) * h);
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    bool at_floor = err <= floor;
    err = std::max(err, floor);
    return {a, b, resk * h, err, at_floor};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod over the given breakpoints.
template <class F>
auto integrate(F&& f, const std::vector<double>& breaks, const Options& opt = {})
    -> Result<decltype(f(0.0))>
{
    using T = decltype(f(0.0));
    Result<T> out;
    std::priority_queue<detail::Segment<T>> heap;
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] == breaks[i]) continue;
        auto s = detail::gk15<T>(f, breaks[i], breaks[i + 1]);
        total += s.value;
        err += s.err;
        heap.push(s);
        out.evaluations += 15;
    }
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
    while (err > target() && heap.size() < opt.max_intervals && !heap.empty()) {
        auto s = heap.top();
        if (s.at_floor) break;
        double mid = 0.5 * (s.a + s.b);
        if (!(mid > std::min(s.a, s.b) && mid < std::max(s.a, s.b))) break;
        heap.pop();
        auto l = detail::gk15<T>(f, s.a, mid);
        auto r = detail::gk15<T>(f, mid, s.b);
        out.evaluations += 30;
        total += (l.value + r.value) - s.value;
        err += (l.err + r.err) - s.err;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to remove drift from incremental updates
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().err;
        heap.pop();
    }
    out.value = sum;
    out.abs_err = esum;
    out.converged = esum <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(sum));
    return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) -> Result<decltype(f(0.0))>
{
    return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Integral over [a, a + dir * inf) for integrands that decay over a length scale.
template <class F>
Result<double> integrate_tail(F&& f, double a, double dir, double scale, const Options& opt = {})
{
    Result<double> out;
    out.converged = true;
    double lo = a, width = scale;
    int quiet = 0;
    // panels share one target: the tolerance against the running total
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value)); };
    for (int k = 0; k < 400 && quiet < 2; ++k) {
        double hi = lo + dir * width;
        Options po = opt;
        po.abs_tol = std::max(opt.abs_tol, 0.1 * opt.rel_tol * std::abs(out.value));
        auto r = integrate(f, std::min(lo, hi), std::max(lo, hi), po);
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
        quiet = (std::abs(r.value) <= 1e-3 * target() || (r.value == 0.0 && k > 4)) ? quiet + 1 : 0;
        lo = hi;
        width *= 1.5;
    }
    out.converged = out.converged && quiet >= 2;
    return out;
}

// Integral over [lo, hi], 0 <= lo < hi, after x = u^4, which tames power and log singularities at 0.
template <class F>
Result<double> integrate_near_origin(F&& f, double lo, double hi, const Options& opt = {})
{
    double u0 = std::pow(lo, 0.25), u1 = std::pow(hi, 0.25);
    auto g = [&](double u) {
        double u2 = u * u;
        return 4.0 * u2 * u * f(u2 * u2);
    };
    std::vector<double> breaks{u1};
    for (double u = 0.5 * u1; u > u0 && breaks.size() < 12; u *= 0.5) breaks.push_back(u);
    breaks.push_back(u0);
    std::reverse(breaks.begin(), breaks.end());
    return integrate(g, breaks, opt);
}

// Breakpoints splitting [a, b] into panels no wider than width.
inline std::vector<double> panels(double a, double b, double width)
{
    int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / width)));
    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = a + (b - a) * i / n;
    out[n] = b;
    return out;
}

} // namespace vgprod::quad
