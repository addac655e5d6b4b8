#include "validation.hpp"

#include "vgprod/meijer.hpp"
#include "vgprod/oracle.hpp"
#include "vgprod/product.hpp"
#include "vgprod/quadrature.hpp"
#include "vgprod/special_cases.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

namespace vgprod::validation {

namespace {

using cplx = std::complex<double>;
using meijer::MeijerGSpec;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class... A>
std::string fmt(const char* f, A... a)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::string describe(const ProductSpec& s)
{
    std::string out;
    for (const auto& p : s.factors()) out += fmt("%s(%g,%g,%g)", out.empty() ? "" : " ", p.m, p.alpha, p.beta);
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

class Recorder {
public:
    explicit Recorder(Criterion& c) : c_(c) {}

    void at_most(const std::string& name, double measured, double limit, const std::string& detail = {})
    {
        c_.checks.push_back({name, measured <= limit, measured, limit, detail});
    }

    template <class F>
    void guard(const std::string& name, F&& f)
    {
        try {
            f();
        } catch (const std::exception& e) {
            c_.checks.push_back({name, false, nan, 0.0, std::string("threw: ") + e.what()});
        }
    }

private:
    Criterion& c_;
};

// worst value of err(x) over xs, with the x where it occurs
template <class F>
std::pair<double, double> worst(const std::vector<double>& xs, F&& err)
{
    std::pair<double, double> w{-1.0, nan};
    for (double x : xs) {
        double e = err(x);
        if (!(e <= w.first)) w = {e, x};
    }
    return w;
}

// ---- 1 ----

void oracle_equivalence(Recorder& r)
{
    const std::vector<double> zs{-5, -1, -0.2, 0.2, 1, 5};
    auto grid = oracle::invariant_grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& s = grid[k];
        std::string name = fmt("grid spec %zu: %s", k, describe(s).c_str());
        r.guard(name, [&] {
            auto [e, z] = worst(zs, [&](double z) {
                double v = product_pdf(s, z, 1e-11).value;
                return std::abs(v - oracle::convolution_pdf(s, z)) / std::max(1e-6, 1e-5 * std::abs(v));
            });
            r.at_most(name, e, 1.0, fmt("|f - f_conv| / max(1e-6, 1e-5 |f|), worst at z = %g", z));
        });
    }
}

// ---- 2 ----

double total_mass(const ProductSpec& s)
{
    quad::Options o{1e-10, 1e-10};
    double mass = 0.0;
    for (double dir : {1.0, -1.0}) {
        auto f = [&](double y) { return y <= 0.0 ? 0.0 : product_pdf(s, dir * y, Tolerance{1e-15, 1e-12}).value; };
        mass += quad::integrate_near_origin(f, 0.0, 1.0, o).value;
        mass += quad::integrate_tail(f, 1.0, 1.0, 2.0, o).value;
    }
    return mass;
}

void normalization(Recorder& r)
{
    auto grid = oracle::invariant_grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::string name = fmt("mass of grid spec %zu: %s", k, describe(grid[k]).c_str());
        r.guard(name, [&] {
            double m = total_mass(grid[k]);
            r.at_most(name, std::abs(m - 1.0), 1e-6, fmt("integral = %.12f", m));
        });
    }
}

// ---- 3 ----

void closed_form_pin(Recorder& r)
{
    ProductSpec s({{0.5, 1, 0}, {0.5, 1, 0}});
    LaplaceProductSpec l({{1, 0}, {1, 0}});
    for (double z : {0.1, 0.5, 2.0}) {
        double k0 = std::cyl_bessel_k(0.0, 2.0 * std::sqrt(z));
        r.guard(fmt("product_pdf at z = %g", z),
                [&] { r.at_most(fmt("product_pdf at z = %g", z), std::abs(product_pdf(s, z).value - k0), 1e-8); });
        r.guard(fmt("laplace_product_pdf at z = %g", z), [&] {
            double v = laplace_product_pdf(l, z, Tolerance::mixed(1e-12)).value;
            r.at_most(fmt("laplace_product_pdf at z = %g", z), std::abs(v - k0), 1e-8);
        });
    }
}

// ---- 4 ----

void cdf_pdf_consistency(Recorder& r)
{
    const double h = 1e-4;
    const Tolerance tol = Tolerance::mixed(1e-13);
    for (const auto& s : {ProductSpec({{0.3, 1, 0}, {1.2, 2, 0}}), ProductSpec({{0.5, 1, 0}, {1, 1.5, 0}, {0, 0.8, 0}})}) {
        std::string name = fmt("N=%d %s", s.n(), describe(s).c_str());
        r.guard(name, [&] {
            auto [e, z] = worst({-1.5, -0.3, 0.3, 1.5}, [&](double z) {
                double fd = (product_cdf_symmetric(s, z + h, tol).value - product_cdf_symmetric(s, z - h, tol).value) / (2 * h);
                return rel(fd, product_pdf_symmetric(s, z, tol).value);
            });
            r.at_most(name, e, 1e-5, fmt("relative, h = %g, worst at z = %g", h, z));
        });
    }
}

// ---- 5 ----

void sign_probability(Recorder& r)
{
    auto grid = oracle::invariant_grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::string name = fmt("P(Z <= 0) on grid spec %zu", k);
        r.guard(name, [&] {
            double p = prob_nonpositive(grid[k]);
            double c = product_cdf_numeric(grid[k], 0.0, 1e-10).value;
            r.at_most(name, std::abs(p - c), 1e-7, fmt("closed form %.12f", p));
        });
    }
    for (VgParams f : {VgParams{1, 1, 0.3}, VgParams{-0.25, 1.5, -0.5}, VgParams{2, 0.8, 0.6}})
        for (int N = 2; N <= 4; ++N) {
            std::string name = fmt("identical shortcut, N=%d (%g,%g,%g)", N, f.m, f.alpha, f.beta);
            r.guard(name, [&] {
                ProductSpec s(std::vector<VgParams>(N, f));
                r.at_most(name, std::abs(prob_nonpositive_identical(s) - prob_nonpositive(s)), 1e-12);
            });
        }
}

// ---- 6 ----

void characteristic_functions(Recorder& r)
{
    const std::vector<double> ts{0.1, 0.7, 2, 10};
    const std::vector<ProductSpec> specs{ProductSpec({{0.3, 1, 0}, {1.2, 2, 0}}),
                                         ProductSpec({{0.5, 1, 0}, {1, 1.5, 0}, {0, 0.8, 0}}),
                                         ProductSpec({{0.5, 1, 0.3}, {1.5, 2, -0.5}}),
                                         ProductSpec({{0.5, 1, 0.3}, {1.5, 2, -0.5}, {0.5, 1.2, 0.2}})};
    const Tolerance tol = Tolerance::mixed(1e-11);
    for (const auto& s : specs) {
        const bool sym = s.symmetric();
        auto phi = [&](double t) { return sym ? product_cf_symmetric(s, t, tol).value : product_cf_halfint(s, t, tol).value; };
        std::string tag = fmt("%s N=%d", sym ? "symmetric" : "half-integer", s.n());
        r.guard(tag + " vs Fourier oracle", [&] {
            oracle::CfTable table(s, 10.0);
            auto [e, t] = worst(ts, [&](double t) { return std::abs(phi(t) - table(t)); });
            r.at_most(tag + " vs Fourier oracle", e, 1e-5, fmt("worst at t = %g, %zu nodes", t, table.nodes()));
            if (sym) {
                auto [ei, ti] = worst(ts, [&](double t) { return std::max(std::abs(phi(t).imag()), std::abs(table(t).imag())); });
                r.at_most(tag + " imaginary part", ei, 1e-10, fmt("closed form and oracle, worst at t = %g", ti));
            }
        });
        r.guard(tag + " phi(0) = 1", [&] { r.at_most(tag + " phi(0) = 1", std::abs(phi(0.0) - 1.0), 1e-12); });
    }
}

// ---- 7 ----

void monte_carlo(Recorder& r, std::uint64_t seed)
{
    const std::size_t n = 1000000, cells = 1000;
    struct Family {
        std::string name;
        ProductSpec spec;
        std::function<SampleBatch()> draw;
    };
    LaplaceProductSpec al({{1.3, 0.4}, {0.8, -0.3}});
    MixedNormalLaplaceSpec mixed({0.7, 1.9}, {1.3});
    CorrelatedNormalSpec corr({{1.0, 1.3, 0.3}, {0.8, 1.0, -0.6}});
    ProductSpec generic({{1, 1, 0.3}, {-0.25, 1.2, 0.4}});
    std::vector<Family> families{
        {"asymmetric Laplace", al.product(), [&] { return oracle::mc_product_sample(al.product(), n, seed); }},
        {"normal-Laplace", mixed.product(), [&] { return mixed_product_sample(mixed, n, seed ^ 1); }},
        {"correlated normal", corr.product(), [&] { return correlated_normal_sample(corr, n, seed ^ 2); }},
        {"generic skewed", generic, [&] { return oracle::mc_product_sample(generic, n, seed ^ 3); }},
    };
    for (const auto& f : families) {
        std::string name = f.name + ": " + describe(f.spec);
        r.guard(name, [&] {
            auto batch = f.draw();
            auto grid = oracle::ks_grid(batch, cells);
            auto table = product_cdf_table(f.spec, grid, Tolerance::mixed(1e-9));
            std::vector<double> F;
            double err = 0.0;
            for (const auto& t : table) {
                F.push_back(t.value);
                err = std::max(err, t.abs_err);
            }
            auto b = oracle::ks_statistic_grid(batch, grid, F, err);
            r.at_most(name, b.upper, 0.005, fmt("KS upper bound; lower bound %.5f, n = %zu, %zu cdf nodes", b.lower, n, grid.size()));
        });
    }
}

// ---- 8 ----

void asymptotics(Recorder& r)
{
    for (const auto& s : {ProductSpec({{0.5, 1, 0}, {1, 1, 0}}), ProductSpec({{-0.25, 1, 0}, {0.5, 1, 0}})}) {
        std::string name = fmt("origin ratio at 1e-8, %s", describe(s).c_str());
        r.guard(name, [&] {
            double q = product_pdf(s, 1e-8).value / pdf_origin_asymptotic(s, 1e-8);
            r.at_most(name, std::abs(q - 1.0), 0.05, fmt("ratio %.6f", q));
        });
    }

    ProductSpec l2({{0.5, 1, 0}, {0.5, 1, 0}});
    r.guard("upper tail ratio, N=2 Laplace at z = 625", [&] {
        double z = 625.0;
        double q = product_ccdf_numeric(l2, z, Tolerance{1e-300, 1e-9}).value / tail_asymptotic_cdf(l2, z, Side::upper);
        r.at_most("upper tail ratio, N=2 Laplace at z = 625", std::abs(q - 1.0), 0.02, fmt("ratio %.6f, (xi z)^(1/2) = 25", q));
    });
    r.guard("N=1 Laplace tail", [&] {
        ProductSpec l1({{0.5, 2, 0}});
        auto [e, z] = worst({0.5, 3.0, 20.0}, [&](double z) {
            return std::max(rel(tail_asymptotic_cdf(l1, z, Side::upper), 0.5 * std::exp(-2 * z)),
                            rel(tail_asymptotic_cdf(l1, -z, Side::lower), 0.5 * std::exp(-2 * z)));
        });
        r.at_most("N=1 Laplace tail", e, 1e-12, fmt("relative to e^(-2z)/2, worst at |z| = %g", z));
    });

    r.guard("quantile ratios", [&] {
        double prev = std::numeric_limits<double>::infinity(), prev_e = 0.0;
        for (double e : {1e-4, 1e-5, 1e-6}) {
            double q = quantile_numeric(l2, 1 - e).value / quantile_asymptotic(l2, 1 - e);
            std::string name = fmt("quantile ratio at p = 1 - %g", e);
            if (std::isinf(prev))
                r.at_most(name, std::abs(q - 1.0), 1.0, fmt("ratio %.6f", q));
            else
                r.at_most(name, std::abs(q - 1.0), prev, fmt("ratio %.6f, must be closer to 1 than at 1 - %g", q, prev_e));
            prev = std::abs(q - 1.0);
            prev_e = e;
        }
    });
}

// ---- 9 ----

std::vector<MeijerGSpec> random_q0_grid(int count, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> bdist(-0.4, 3.0);
    const int qs[] = {2, 4, 6};
    std::vector<MeijerGSpec> out;
    for (int i = 0; i < count; ++i) {
        std::vector<double> b(qs[i % 3]);
        for (auto& v : b) v = bdist(rng);
        out.push_back(meijer::make_q0(b));
    }
    return out;
}

void identities(Recorder& r)
{
    using namespace meijer;
    const std::vector<double> xs{0.01, 0.5, 2.0, 10.0};
    auto grid = random_q0_grid(100, 2024);
    r.guard("shift identity", [&] {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> adist(-0.3, 1.5);
        double w = 0.0;
        for (const auto& s : grid) {
            double alpha = adist(rng);
            for (double x : xs)
                w = std::max(w, rel(std::pow(x, alpha) * eval_g_q0(s, x, 1e-13).value,
                                    eval_g_q0(shift_argument(s, alpha), x, 1e-13).value));
        }
        r.at_most("shift identity", w, 1e-10, "x^a G(x | b) = G(x | b + a), 100 specs x 4 arguments");
    });
    r.guard("inversion identity", [&] {
        double w = 0.0;
        for (const auto& s : grid)
            for (double x : xs) w = std::max(w, rel(eval_g_q0(s, x, 1e-13).value, evaluate(invert_argument(s), 1.0 / x, 1e-13).value));
        r.at_most("inversion identity", w, 1e-10, "G(x | b) = G(1/x | 1 - b), 100 specs x 4 arguments");
    });
    for (int N = 1; N <= 4; ++N) {
        MeijerGSpec k{N, 1, {1}, std::vector<double>(N, 1.0)};
        k.b.push_back(0.0);
        std::string tag = fmt("CDF kernel N=%d", N);
        r.guard(tag, [&] {
            r.at_most(tag + " at 0", std::abs(eval_g_cdf_class(k, 0.0).value), 0.0);
            r.at_most(tag + " at 1e4", std::abs(eval_g_cdf_class(k, 1e4).value - 1.0), 1e-10);
            r.at_most(tag + " inverted at 1e-6", std::abs(evaluate(invert_argument(k), 1e-6).value - 1.0), 1e-9);
        });
    }
}

// ---- 10 ----

void coefficients(Recorder& r)
{
    for (int N = 1; N <= 6; ++N) {
        std::string name = fmt("N=%d, j in {0..3}^N, both signs", N);
        r.guard(name, [&] {
            std::vector<int> j(N, 0);
            int patterns = 0, mismatches = 0;
            for (;;) {
                for (int sign : {1, -1}) mismatches += subset_coefficient(j, sign) != subset_coefficient_enumerated(j, sign);
                ++patterns;
                int i = 0;
                while (i < N && j[i] == 3) j[i++] = 0;
                if (i == N) break;
                ++j[i];
            }
            r.at_most(name, mismatches, 0.0, fmt("%d patterns", patterns));
        });
    }
}

// ---- 11 ----

double scaled(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void special_cases(Recorder& r)
{
    const Tolerance tight = Tolerance::mixed(1e-12);
    const std::vector<double> zs{-4.0, -0.3, 0.05, 1.5};
    const std::vector<double> ts{0.1, 0.7, 2.0, 10.0};
    auto each = [&](const std::string& name, const std::vector<double>& xs, auto&& err) {
        r.guard(name, [&] {
            auto [e, x] = worst(xs, err);
            r.at_most(name, e, 1e-9, fmt("worst at %g", x));
        });
    };

    LaplaceProductSpec al({{1.3, 0.4}, {0.8, -0.3}, {2.1, 0.5}});
    const auto& ap = al.product();
    each("AL pdf", zs, [&](double z) { return scaled(al_product_pdf(al, z, tight).value, product_pdf(ap, z, tight).value); });
    each("AL cdf", zs,
         [&](double z) { return scaled(al_product_cdf(al, z, tight).value, product_cdf_numeric(ap, z, 1e-12).value); });
    each("AL cf", ts, [&](double t) {
        return std::abs(al_product_cf(al, t, tight).value - product_cf_halfint(ap, t, tight).value);
    });

    LaplaceProductSpec lap({{1.3, 0}, {0.8, 0}, {2.1, 0}});
    const auto& lp = lap.product();
    each("Laplace pdf", zs,
         [&](double z) { return scaled(laplace_product_pdf(lap, z, tight).value, product_pdf_symmetric(lp, z, tight).value); });
    each("Laplace cdf", zs,
         [&](double z) { return scaled(laplace_product_cdf(lap, z, tight).value, product_cdf_symmetric(lp, z, tight).value); });
    each("Laplace cf", ts, [&](double t) {
        return std::abs(laplace_product_cf(lap, t, tight).value - product_cf_symmetric(lp, t, tight).value);
    });

    for (const auto& m : {MixedNormalLaplaceSpec({0.7, 1.9}, {1.3}), MixedNormalLaplaceSpec({1.2, 0.8, 0.5, 2.0}, {1.1})}) {
        const auto& mp = m.product();
        std::string tag = fmt("normal-Laplace %dM+%d", 2 * m.normal_pairs(), m.laplace_count());
        each(tag + " pdf", zs, [&](double z) { return scaled(mixed_product_pdf(m, z, tight).value, product_pdf(mp, z, tight).value); });
        each(tag + " cdf", zs,
             [&](double z) { return scaled(mixed_product_cdf(m, z, tight).value, product_cdf_symmetric(mp, z, tight).value); });
        each(tag + " cf", ts, [&](double t) {
            return std::abs(mixed_product_cf(m, t, tight).value - product_cf_symmetric(mp, t, tight).value);
        });
    }

    CorrelatedNormalSpec corr({{1.0, 1.3, 0.3}, {0.8, 1.0, -0.6}});
    each("correlated normal pdf", {-2.0, -0.2, 0.2, 1.0, 5.0}, [&](double z) {
        return scaled(correlated_normal_product_pdf(corr, z, tight).value, product_pdf(corr.product(), z, tight).value);
    });
    CorrelatedNormalSpec indep({{1.0, 2.0, 0.0}, {0.5, 1.5, 0.0}});
    each("rho = 0 vs independent normals", {-3.0, 0.1, 0.8}, [&](double z) {
        return scaled(correlated_normal_product_pdf(indep, z, tight).value,
                      independent_normal_product_pdf({1.0, 2.0, 0.5, 1.5}, z, tight).value);
    });
}

const char* titles[] = {
    "",
    "oracle equivalence: closed-form density vs convolution",
    "normalization of the density",
    "N=2 Laplace product equals K0(2 sqrt|z|)",
    "CDF/PDF consistency by finite differences",
    "sign probability",
    "characteristic functions vs Fourier oracle",
    "Monte Carlo KS distance",
    "origin, tail and quantile asymptotics",
    "Meijer G shift and inversion identities",
    "a-coefficient parity rule vs enumeration",
    "special-case evaluators vs generic forms",
};

} // namespace

bool Criterion::passed() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Criterion run_criterion(int id, std::uint64_t seed)
{
    if (id < 1 || id > 11) throw std::invalid_argument("criterion ids run from 1 to 11");
    Criterion c;
    c.id = id;
    c.title = titles[id];
    Recorder r(c);
    auto start = std::chrono::steady_clock::now();
    switch (id) {
    case 1: oracle_equivalence(r); break;
    case 2: normalization(r); break;
    case 3: closed_form_pin(r); break;
    case 4: cdf_pdf_consistency(r); break;
    case 5: sign_probability(r); break;
    case 6: characteristic_functions(r); break;
    case 7: monte_carlo(r, seed); break;
    case 8: asymptotics(r); break;
    case 9: identities(r); break;
    case 10: coefficients(r); break;
    case 11: special_cases(r); break;
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return c;
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"identities", "oracle-equivalence", "normalization", "asymptotics",
                                                "montecarlo"};
    return names;
}

std::vector<int> suite_criteria(const std::string& suite)
{
    if (suite == "identities") return {3, 9, 10, 11};
    if (suite == "oracle-equivalence") return {1, 6};
    if (suite == "normalization") return {2, 4, 5};
    if (suite == "asymptotics") return {8};
    if (suite == "montecarlo") return {7};
    throw std::invalid_argument("unknown suite '" + suite +
                                "'; expected identities, oracle-equivalence, normalization, asymptotics or montecarlo");
}

} // namespace vgprod::validation
