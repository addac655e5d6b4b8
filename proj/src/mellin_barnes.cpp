#include "vgprod/mellin_barnes.hpp"

#include "vgprod/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace vgprod::mb {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double decay_nats = 46.0; // integrand below exp(-46) of its peak is dropped

double safe(double v) { return std::isnan(v) ? inf : v; }

double golden(const std::function<double(double)>& phi, double a, double b)
{
    const double g = 0.6180339887498949;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = safe(phi(x1)), f2 = safe(phi(x2));
    for (int it = 0; it < 200 && (b - a) > 1e-7 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = safe(phi(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = safe(phi(x2));
        }
    }
    return f1 < f2 ? x1 : x2;
}

// Scan |h| along one half-line; returns the extent beyond which h is negligible.
double scan_extent(const std::function<double(double)>& modulus, double direction, double feature, double& peak)
{
    double y = 0.0;
    int below = 0;
    while (std::abs(y) < 1e5) {
        double step = std::clamp(0.3 * std::hypot(feature, y), 0.02, 2.0);
        y += direction * step;
        double v = modulus(y);
        if (v > peak) peak = v;
        below = (v < peak - decay_nats) ? below + 1 : 0;
        if (below >= 3) return y;
    }
    return direction * inf;
}

std::vector<double> line_breaks(double y0, double y1, double feature, double frequency)
{
    // panels narrow near the real axis, where the poles sit, and widen with distance
    double osc = frequency > 0.0 ? pi / frequency : inf;
    std::vector<double> pos{0.0};
    double y = 0.0;
    double ymax = std::max(std::abs(y0), std::abs(y1));
    while (y < ymax) {
        double w = std::min({std::max(0.5 * std::hypot(feature, y), 0.01), osc, 1.0});
        y += w;
        pos.push_back(std::min(y, ymax));
    }
    std::vector<double> out;
    if (y0 < 0.0)
        for (auto it = pos.rbegin(); it != pos.rend(); ++it)
            if (*it > 0.0 && *it < -y0) out.push_back(-*it);
    out.insert(out.begin(), y0);
    for (double p : pos)
        if (p >= 0.0 && p < y1) out.push_back(p);
    out.push_back(y1);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

double minimize_on_strip(const std::function<double(double)>& phi, double lo, double hi)
{
    bool lo_inf = !std::isfinite(lo);
    bool hi_inf = !std::isfinite(hi);
    if (!lo_inf && !hi_inf) {
        double d = 1e-9 * (hi - lo);
        return golden(phi, lo + d, hi - d);
    }
    double anchor = lo_inf && hi_inf ? 0.0 : (lo_inf ? hi - 1e-9 * std::max(1.0, std::abs(hi)) : lo + 1e-9 * std::max(1.0, std::abs(lo)));
    double dir = lo_inf ? -1.0 : 1.0;
    // expand away from the finite end until phi turns upward
    double dist = 0.5;
    double prev_x = lo_inf && hi_inf ? 0.0 : anchor + dir * 1e-3;
    double prev = safe(phi(prev_x));
    double near = prev_x;
    for (int it = 0; it < 80; ++it) {
        double x = anchor + dir * dist;
        double v = safe(phi(x));
        if (v > prev) {
            double a = std::min(near, x), b = std::max(near, x);
            return golden(phi, a, b);
        }
        near = prev_x;
        prev_x = x;
        prev = v;
        dist *= 2.0;
    }
    return prev_x;
}

ComplexEvalResult integrate_line(const LogIntegrand& log_h, double c, const LineOptions& opt)
{
    auto modulus = [&](double y) {
        double v = log_h(cplx(c, y)).real();
        return std::isnan(v) ? -inf : v;
    };
    double peak = modulus(0.0);
    double y_hi = scan_extent(modulus, 1.0, opt.feature, peak);
    double y_lo = opt.conj_symmetric ? 0.0 : scan_extent(modulus, -1.0, opt.feature, peak);
    ComplexEvalResult out;
    if (!std::isfinite(y_hi) || !std::isfinite(y_lo) || !std::isfinite(peak)) {
        out.value = std::numeric_limits<double>::quiet_NaN();
        out.abs_err = inf;
        return out;
    }
    const double ref = peak;
    const double norm = opt.conj_symmetric ? pi : 2.0 * pi;
    auto f = [&](double y) -> cplx {
        cplx l = log_h(cplx(c, y)) - ref;
        if (!(l.real() > -745.0)) return 0.0;
        cplx v = std::exp(l);
        return opt.conj_symmetric ? cplx(v.real(), 0.0) : v;
    };
    double scale = std::exp(ref) / norm; // may be inf or 0 at extreme arguments
    quad::Options q;
    q.rel_tol = opt.rel_tol;
    q.abs_tol = (scale > 0.0 && std::isfinite(scale)) ? opt.abs_tol / scale : (scale == 0.0 ? inf : 0.0);
    q.max_intervals = 6000;
    auto r = quad::integrate(f, line_breaks(y_lo, y_hi, opt.feature, opt.frequency), q);
    double trunc = std::exp(-decay_nats) * (std::abs(y_hi) + std::abs(y_lo) + 1.0);
    out.value = r.value * scale;
    out.abs_err = (r.abs_err + trunc) * scale;
    if (scale == 0.0) {
        out.value = 0.0;
        out.abs_err = 0.0;
    }
    out.converged = out.abs_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value));
    return out;
}

} // namespace vgprod::mb
