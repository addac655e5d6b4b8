#include "vgprod/meijer.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/mellin_barnes.hpp"
#include "vgprod/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vgprod::meijer {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double collide = 1e-9;

// Gamma(shift + sign * s)^power
struct GammaTerm {
    double shift;
    int sign;
    int power;
};

bool nonpositive_integer(double w, long& k)
{
    double r = std::round(w);
    if (r > 0.0 || std::abs(w - r) > collide) return false;
    k = static_cast<long>(-r);
    return true;
}

struct Integrand {
    std::vector<GammaTerm> terms;

    void add(double shift, int sign, int power)
    {
        for (auto& t : terms)
            if (t.sign == sign && t.shift == shift) {
                t.power += power;
                return;
            }
        terms.push_back({shift, sign, power});
    }

    void prune()
    {
        terms.erase(std::remove_if(terms.begin(), terms.end(), [](const GammaTerm& t) { return t.power == 0; }),
                    terms.end());
    }

    cplx log_value(cplx s, cplx logx) const
    {
        cplx acc = s * logx;
        for (const auto& t : terms) acc += static_cast<double>(t.power) * specfun::log_gamma(t.shift + static_cast<double>(t.sign) * s);
        return acc;
    }

    double log_abs(double c, double log_abs_x) const
    {
        double acc = c * log_abs_x;
        for (const auto& t : terms) {
            long k;
            double w = t.shift + t.sign * c;
            if (nonpositive_integer(w, k)) return t.power > 0 ? inf : -inf;
            acc += t.power * specfun::log_abs_gamma(w).first;
        }
        return acc;
    }

    int order_at(double s0) const
    {
        int order = 0;
        long k;
        for (const auto& t : terms)
            if (nonpositive_integer(t.shift + t.sign * s0, k)) order += t.power;
        return order;
    }

    // First pole strictly beyond `from` in direction side (+1 right, -1 left), or +-inf.
    double next_pole(int side, double from) const
    {
        int fam_sign = side > 0 ? -1 : 1;
        double extreme = side > 0 ? -inf : inf;
        for (const auto& t : terms)
            if (t.sign == fam_sign) {
                double st = side > 0 ? t.shift : -t.shift;
                extreme = side > 0 ? std::max(extreme, st) : std::min(extreme, st);
            }
        if (!std::isfinite(extreme)) return side * inf;
        double cur = from;
        for (int guard = 0; guard < 100000; ++guard) {
            double best = side * inf;
            for (const auto& t : terms) {
                if (t.sign != fam_sign || t.power <= 0) continue;
                double st = side > 0 ? t.shift : -t.shift;
                double k = 0.0;
                if (std::isfinite(cur)) k = std::max(0.0, std::floor(side * (cur - st) + collide) + 1.0);
                double pos = st + side * k;
                if (side * (pos - best) < 0.0) best = pos;
            }
            if (!std::isfinite(best)) return best;
            if (order_at(best) > 0) return best;
            if (side * (best - extreme) > 2.0) return side * inf; // periodic regime without poles
            cur = best;
        }
        return side * inf;
    }

    cplx residue(double s0, cplx logx) const
    {
        int r = order_at(s0);
        if (r <= 0) return 0.0;
        std::vector<cplx> L(r, 0.0);
        cplx logc = s0 * logx;
        double sgn = 1.0;
        if (r > 1) L[1] += logx;
        for (const auto& t : terms) {
            double w0 = t.shift + t.sign * s0;
            long k;
            if (nonpositive_integer(w0, k)) {
                // Gamma(-k+u) = u^{-1} (-1)^k / k! exp(lnGamma(1+u) + sum_j sum_i u^i/(i j^i)), u = sign*eps
                logc -= t.power * std::lgamma(k + 1.0);
                if ((k * t.power) % 2 != 0) sgn = -sgn;
                if (t.sign < 0 && t.power % 2 != 0) sgn = -sgn;
                for (int i = 1; i < r; ++i) {
                    double lam = i == 1 ? -specfun::euler_gamma : ((i % 2 == 0) ? 1.0 : -1.0) * specfun::zeta_int(i) / i;
                    for (long j = 1; j <= k; ++j) lam += std::pow(static_cast<double>(j), -i) / i;
                    double us = (t.sign < 0 && i % 2 == 1) ? -1.0 : 1.0;
                    L[i] += static_cast<double>(t.power) * lam * us;
                }
            } else {
                auto [lg, sg] = specfun::log_abs_gamma(w0);
                logc += t.power * lg;
                if (sg < 0 && t.power % 2 != 0) sgn = -sgn;
                if (r > 1) {
                    auto pg = specfun::polygamma_table(r - 2, w0);
                    double fact = 1.0;
                    for (int i = 1; i < r; ++i) {
                        fact *= i;
                        double us = (t.sign < 0 && i % 2 == 1) ? -1.0 : 1.0;
                        L[i] += static_cast<double>(t.power) * pg[i - 1] / fact * us;
                    }
                }
            }
        }
        // exp of the power series: E_n = (1/n) sum_k k L_k E_{n-k}
        std::vector<cplx> E(r, 0.0);
        E[0] = 1.0;
        for (int n = 1; n < r; ++n) {
            cplx acc = 0.0;
            for (int k = 1; k <= n; ++k) acc += static_cast<double>(k) * L[k] * E[n - k];
            E[n] = acc / static_cast<double>(n);
        }
        return sgn * std::exp(logc) * E[r - 1];
    }
};

Integrand build(const MeijerGSpec& g)
{
    Integrand h;
    for (int j = 0; j < g.q(); ++j) {
        if (j < g.m) h.add(g.b[j], -1, 1);
        else h.add(1.0 - g.b[j], 1, -1);
    }
    for (int j = 0; j < g.p(); ++j) {
        if (j < g.n) h.add(1.0 - g.a[j], 1, 1);
        else h.add(g.a[j], -1, -1);
    }
    h.prune();
    return h;
}

constexpr double cluster_gap = 0.2;
constexpr double cluster_span = 0.9;

struct ClusterSum {
    cplx value;
    double err;
    double last;
};

// Distance from c0 to the nearest pole of h that is not one of the members.
double outside_distance(const Integrand& h, double c0, const std::vector<double>& members)
{
    double best = inf;
    for (const auto& t : h.terms) {
        if (t.power <= 0) continue;
        // poles of Gamma(shift + sign*s) sit at s = -(shift + k)/sign
        double side = -t.sign;
        double st = side > 0 ? t.shift : -t.shift;
        double k0 = std::round(side * (c0 - st));
        for (double k = std::max(0.0, k0 - 1.0); k <= std::max(0.0, k0 + 1.0); k += 1.0) {
            double pos = st + side * k;
            bool member = false;
            for (double mpos : members) member = member || std::abs(pos - mpos) <= collide;
            if (!member && h.order_at(pos) > 0) best = std::min(best, std::abs(pos - c0));
        }
    }
    return best;
}

// Sum of the residues in the run of nearby poles that starts at `first`.
ClusterSum cluster_residue(const Integrand& h, int side, double first, cplx logx)
{
    std::vector<double> members{first};
    double cur = first;
    for (;;) {
        double nx = h.next_pole(side, cur);
        if (!std::isfinite(nx) || std::abs(nx - cur) > cluster_gap || std::abs(nx - first) > cluster_span) break;
        members.push_back(nx);
        cur = nx;
    }
    if (members.size() == 1) {
        cplx r = h.residue(first, logx);
        return {r, 4e-15 * std::abs(r) * (1.0 + h.order_at(first)), first};
    }
    // trapezoidal rule on a circle around the cluster: (1/2 pi i) closed integral of h
    double c0 = 0.5 * (first + cur);
    double half = 0.5 * std::abs(cur - first);
    double out = outside_distance(h, c0, members);
    double radius = std::sqrt(half * out);
    radius = std::clamp(radius, half + 0.25 * (out - half), half + 0.75 * (out - half));
    auto circle = [&](int M) {
        std::vector<cplx> pts(M), logs(M);
        double ref = -inf;
        for (int k = 0; k < M; ++k) {
            pts[k] = std::polar(radius, 2.0 * specfun::pi * (k + 0.5) / M);
            logs[k] = h.log_value(c0 + pts[k], logx);
            ref = std::max(ref, logs[k].real());
        }
        cplx acc = 0.0;
        for (int k = 0; k < M; ++k) acc += std::exp(logs[k] - ref) * pts[k];
        return std::pair{acc / static_cast<double>(M), ref};
    };
    auto [prev, ref_prev] = circle(32);
    cplx value = prev * std::exp(ref_prev);
    double err = inf;
    for (int M = 64; M <= 1024; M *= 2) {
        auto [cur_v, ref_c] = circle(M);
        cplx v = cur_v * std::exp(ref_c);
        err = std::abs(v - value) + 1e-15 * std::exp(ref_c) * radius;
        value = v;
        if (err <= 1e-15 * std::exp(ref_c) * radius * 4.0) break;
    }
    return {value, err, cur};
}

struct Strip {
    double lo, hi;
};

Strip principal_strip(const Integrand& h)
{
    Strip s{h.next_pole(-1, inf), h.next_pole(1, -inf)};
    if (!(s.lo < s.hi))
        throw ShapeError("Meijer G: the contour cannot separate the pole families (pole collision)");
    return s;
}

bool real_argument(cplx z) { return z.imag() == 0.0 && z.real() > 0.0; }

std::string shape_name(const MeijerGSpec& g)
{
    return "G^{" + std::to_string(g.m) + "," + std::to_string(g.n) + "}_{" + std::to_string(g.p()) + "," +
           std::to_string(g.q()) + "}";
}

ComplexEvalResult combine(const ComplexEvalResult& a, cplx extra, double extra_err, Tolerance tol)
{
    ComplexEvalResult out;
    out.value = a.value + extra;
    out.abs_err = a.abs_err + extra_err;
    out.converged = std::isfinite(out.value.real()) && tol.met(out.abs_err, std::abs(out.value));
    return out;
}

EvalResult real_part(const ComplexEvalResult& r)
{
    return {r.value.real(), r.abs_err, r.converged};
}

} // namespace

GClass classify(const MeijerGSpec& g)
{
    int p = g.p(), q = g.q();
    bool ok_counts = g.m >= 0 && g.n >= 0 && g.m <= q && g.n <= p;
    if (ok_counts) {
        if (p == 0 && g.n == 0 && g.m == q && q >= 1) return GClass::q0;
        if (p == 1 && g.n == 1 && q >= 2 && g.m == q - 1) return GClass::cdf;
        if (p == 1 && g.n == 1 && q >= 1 && g.m == q) return GClass::cf;
        if (q == 0 && g.m == 0 && g.n == p && p >= 1) return GClass::inverted_q0;
        if (q == 1 && g.m == 1 && p >= 2 && g.n == p - 1) return GClass::inverted_cdf;
        if (q == 1 && g.m == 1 && p >= 1 && g.n == p) return GClass::inverted_cf;
    }
    throw ShapeError("Meijer G: unsupported shape " + shape_name(g) +
                     "; supported classes are G^{q,0}_{0,q}, G^{q-1,1}_{1,q}, G^{q,1}_{1,q} and their inversions");
}

MeijerGSpec make_q0(std::vector<double> b)
{
    MeijerGSpec g;
    g.m = static_cast<int>(b.size());
    g.b = std::move(b);
    return g;
}

ComplexEvalResult eval_quadrature(const MeijerGSpec& g, cplx z, Tolerance tol)
{
    classify(g);
    if (z == 0.0) throw DomainError("Meijer G: argument must be nonzero");
    Integrand h = build(g);
    cplx logx = std::log(z);
    double lax = logx.real();
    auto phi = [&](double c) { return h.log_abs(c, lax); };
    Strip st = principal_strip(h);
    double c = mb::minimize_on_strip(phi, st.lo, st.hi);
    double best = phi(c);

    cplx residues = 0.0;
    double residue_err = 0.0;
    constexpr int max_crossings = 400;
    for (int side : {-1, 1}) {
        int crossed = 0;
        while (crossed < max_crossings) {
            double edge = side < 0 ? st.lo : st.hi;
            if (!std::isfinite(edge)) break;
            ClusterSum cl = cluster_residue(h, side, edge, logx);
            double beyond = h.next_pole(side, cl.last);
            Strip next = side < 0 ? Strip{beyond, cl.last} : Strip{cl.last, beyond};
            double cand = mb::minimize_on_strip(phi, next.lo, next.hi);
            double v = phi(cand);
            if (!(v < best - 1e-6)) break;
            // moving left picks up +Res, moving right -Res
            residues += side < 0 ? cl.value : -cl.value;
            residue_err += cl.err;
            st = next;
            c = cand;
            best = v;
            ++crossed;
        }
        if (crossed > 0) break;
    }

    mb::LineOptions opt;
    opt.conj_symmetric = real_argument(z);
    opt.feature = std::min(c - st.lo, st.hi - c);
    opt.frequency = std::abs(lax);
    opt.abs_tol = 0.5 * tol.abs;
    opt.rel_tol = 0.5 * tol.rel;
    auto line = mb::integrate_line([&](cplx s) { return h.log_value(s, logx); }, c, opt);
    auto out = combine(line, residues, residue_err, tol);
    if (opt.conj_symmetric) out.value = out.value.real();
    return out;
}

ComplexEvalResult eval_residues(const MeijerGSpec& g, cplx z, Tolerance tol)
{
    GClass cls = classify(g);
    if (z == 0.0) throw DomainError("Meijer G: argument must be nonzero");
    Integrand h = build(g);
    cplx logx = std::log(z);
    bool right = cls == GClass::q0 || cls == GClass::cdf || cls == GClass::cf;
    int side = right ? 1 : -1;
    principal_strip(h);

    double extreme = -side * inf;
    for (const auto& t : h.terms) {
        double st = t.sign < 0 ? t.shift : -t.shift;
        if ((t.sign < 0) == right) extreme = right ? std::max(extreme, st) : std::min(extreme, st);
    }

    cplx sum = 0.0;
    double abs_sum = 0.0;
    double cluster_err = 0.0;
    double last = inf;
    int small = 0;
    double pos = -side * inf;
    ComplexEvalResult out;
    for (int count = 0; count < 4000; ++count) {
        pos = h.next_pole(side, pos);
        if (!std::isfinite(pos)) {
            out.converged = true;
            last = 0.0;
            break;
        }
        ClusterSum cl = cluster_residue(h, side, pos, logx);
        pos = cl.last;
        cplx term = right ? -cl.value : cl.value;
        sum += term;
        abs_sum += std::abs(term);
        cluster_err += cl.err;
        double mag = std::abs(term);
        bool past = side * (pos - extreme) > 1.0;
        small = (past && mag <= 1e-17 * std::abs(sum) && mag <= last) ? small + 1 : 0;
        if (past && mag == 0.0 && sum == 0.0) small = 3;
        last = mag;
        if (small >= 3) {
            out.converged = true;
            break;
        }
    }
    out.value = sum;
    out.abs_err = 4e-15 * abs_sum + cluster_err + (std::isfinite(last) ? last : inf);
    out.converged = out.converged && std::isfinite(sum.real()) && tol.met(out.abs_err, std::abs(sum));
    if (real_argument(z)) out.value = sum.real();
    return out;
}

MeijerGSpec shift_argument(const MeijerGSpec& g, double alpha)
{
    MeijerGSpec out = g;
    for (auto& v : out.a) v += alpha;
    for (auto& v : out.b) v += alpha;
    return out;
}

MeijerGSpec invert_argument(const MeijerGSpec& g)
{
    MeijerGSpec out;
    out.m = g.n;
    out.n = g.m;
    for (double v : g.b) out.a.push_back(1.0 - v);
    for (double v : g.a) out.b.push_back(1.0 - v);
    return out;
}

double g_asymptotic_theta(const MeijerGSpec& g)
{
    double sigma = g.q() - g.p();
    double sb = 0.0, sa = 0.0;
    for (double v : g.b) sb += v;
    for (double v : g.a) sa += v;
    return ((1.0 - sigma) / 2.0 + sb - sa) / sigma;
}

double g_asymptotic(const MeijerGSpec& g, double x)
{
    if (!(g.p() < g.q()) || g.n != 0 || g.m != g.q())
        throw ShapeError("g_asymptotic: requires p < q, n = 0 and m = q");
    if (!(x > 0.0)) throw DomainError("g_asymptotic: requires x > 0");
    double sigma = g.q() - g.p();
    double theta = g_asymptotic_theta(g);
    double log_v = 0.5 * (sigma - 1.0) * std::log(2.0 * specfun::pi) - 0.5 * std::log(sigma) + theta * std::log(x) -
                   sigma * std::pow(x, 1.0 / sigma);
    return std::exp(log_v);
}

namespace {

ComplexEvalResult better(const ComplexEvalResult& a, const ComplexEvalResult& b)
{
    if (a.converged != b.converged) return a.converged ? a : b;
    if (!std::isfinite(a.abs_err)) return b;
    return a.abs_err <= b.abs_err ? a : b;
}

ComplexEvalResult small_or_quadrature(const MeijerGSpec& g, cplx z, Tolerance tol)
{
    GClass cls = classify(g);
    bool inverted = cls == GClass::inverted_q0 || cls == GClass::inverted_cdf || cls == GClass::inverted_cf;
    // the residue series converges fastest near 0 (or near infinity for the inverted classes)
    double closeness = inverted ? 1.0 / std::abs(z) : std::abs(z);
    if (closeness < 1e-3) {
        auto r = eval_residues(g, z, tol);
        if (r.converged) return r;
        return better(r, eval_quadrature(g, z, tol));
    }
    auto q = eval_quadrature(g, z, tol);
    if (!q.converged && closeness < 1.0) q = better(q, eval_residues(g, z, tol));
    return q;
}

} // namespace

EvalResult eval_g_q0(const MeijerGSpec& g, double x, Tolerance tol)
{
    if (classify(g) != GClass::q0) throw ShapeError("eval_g_q0: expected G^{q,0}_{0,q}, got " + shape_name(g));
    if (!(x > 0.0)) throw DomainError("eval_g_q0: requires x > 0");
    auto r = real_part(small_or_quadrature(g, x, tol));
    if (std::pow(x, 1.0 / g.q()) > 40.0 && r.value != 0.0) {
        double ratio = r.value / g_asymptotic(g, x);
        if (!(ratio > 0.5 && ratio < 2.0)) r.converged = false;
    }
    return r;
}

EvalResult eval_g_cdf_class(const MeijerGSpec& g, double x, Tolerance tol)
{
    if (classify(g) != GClass::cdf)
        throw ShapeError("eval_g_cdf_class: expected G^{q-1,1}_{1,q}, got " + shape_name(g));
    if (x < 0.0 || std::isnan(x)) throw DomainError("eval_g_cdf_class: requires x >= 0");
    if (x == 0.0) return {0.0, 0.0, true};
    return real_part(small_or_quadrature(g, x, tol));
}

ComplexEvalResult eval_g_cf_class(const MeijerGSpec& g, cplx z, Tolerance tol)
{
    if (classify(g) != GClass::cf) throw ShapeError("eval_g_cf_class: expected G^{q,1}_{1,q}, got " + shape_name(g));
    if (z == 0.0) throw DomainError("eval_g_cf_class: requires z != 0");
    if (z.real() < 0.0 && std::abs(z.real()) > 1e-12 * std::abs(z))
        throw DomainError("eval_g_cf_class: requires |arg z| <= pi/2");
    if (z.real() < 0.0) z = cplx(0.0, z.imag());
    return small_or_quadrature(g, z, tol);
}

EvalResult evaluate(const MeijerGSpec& g, double x, double tol)
{
    switch (classify(g)) {
    case GClass::q0: return eval_g_q0(g, x, tol);
    case GClass::cdf: return eval_g_cdf_class(g, x, tol);
    case GClass::cf: return real_part(eval_g_cf_class(g, x, tol));
    default: break;
    }
    if (!(x > 0.0)) throw DomainError("Meijer G: requires x > 0");
    return real_part(small_or_quadrature(g, x, Tolerance::mixed(tol)));
}

} // namespace vgprod::meijer
