#include "job.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vgprod::cli {

namespace {

using json = nlohmann::json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double inf = std::numeric_limits<double>::infinity();

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

const ProductSpec& product(const Spec& s)
{
    return std::visit(overloaded{[](const ProductSpec& p) -> const ProductSpec& { return p; },
                                 [](const auto& p) -> const ProductSpec& { return p.product(); }},
                      s);
}

template <class T>
T get(const json& j, const char* key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Spec parse_spec(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "generic") {
        std::vector<VgParams> f;
        for (const auto& e : j.at("factors"))
            f.push_back({e.at("m").get<double>(), e.at("alpha").get<double>(), get(e, "beta", 0.0)});
        return ProductSpec(f);
    }
    if (kind == "laplace") {
        std::vector<AlFactor> f;
        for (const auto& e : j.at("factors")) f.push_back({e.at("alpha").get<double>(), get(e, "beta", 0.0)});
        return LaplaceProductSpec(f);
    }
    if (kind == "normal-laplace")
        return MixedNormalLaplaceSpec(get(j, "sigmas", std::vector<double>{}), get(j, "alphas", std::vector<double>{}));
    if (kind == "correlated-normal") {
        std::vector<NormalBlock> b;
        for (const auto& e : j.at("blocks"))
            b.push_back({e.at("sigma1").get<double>(), e.at("sigma2").get<double>(), get(e, "rho", 0.0)});
        return CorrelatedNormalSpec(b);
    }
    throw ValidationError("spec kind must be one of generic, laplace, normal-laplace, correlated-normal; got '" + kind + "'");
}

bool cf_supported(const Spec& s)
{
    if (!std::holds_alternative<ProductSpec>(s) && !std::holds_alternative<CorrelatedNormalSpec>(s)) return true;
    const auto& p = product(s);
    return p.symmetric() || p.half_integer();
}

EvalResult pdf(const Spec& s, double z, Tolerance tol)
{
    return std::visit(overloaded{[&](const ProductSpec& p) { return product_pdf(p, z, tol); },
                                 [&](const LaplaceProductSpec& p) { return al_product_pdf(p, z, tol); },
                                 [&](const MixedNormalLaplaceSpec& p) { return mixed_product_pdf(p, z, tol); },
                                 [&](const CorrelatedNormalSpec& p) { return correlated_normal_product_pdf(p, z, tol); }},
                      s);
}

EvalResult cdf(const Spec& s, double z, Tolerance tol)
{
    return std::visit(overloaded{[&](const ProductSpec& p) {
                                     return p.symmetric() ? product_cdf_symmetric(p, z, tol) : product_cdf_numeric(p, z, tol);
                                 },
                                 [&](const LaplaceProductSpec& p) {
                                     if (z == 0.0) return EvalResult{prob_nonpositive(p.product()), 0.0, true};
                                     return al_product_cdf(p, z, tol);
                                 },
                                 [&](const MixedNormalLaplaceSpec& p) { return mixed_product_cdf(p, z, tol); },
                                 [&](const CorrelatedNormalSpec& p) { return product_cdf_numeric(p.product(), z, tol); }},
                      s);
}

ComplexEvalResult cf(const Spec& s, double t, Tolerance tol)
{
    return std::visit(overloaded{[&](const LaplaceProductSpec& p) { return al_product_cf(p, t, tol); },
                                 [&](const MixedNormalLaplaceSpec& p) { return mixed_product_cf(p, t, tol); },
                                 [&](const auto&) {
                                     const auto& p = product(s);
                                     return p.symmetric() ? product_cf_symmetric(p, t, tol) : product_cf_halfint(p, t, tol);
                                 }},
                      s);
}

SampleBatch sample(const Spec& s, std::size_t n, std::uint64_t seed)
{
    return std::visit(overloaded{[&](const MixedNormalLaplaceSpec& p) { return mixed_product_sample(p, n, seed); },
                                 [&](const CorrelatedNormalSpec& p) { return correlated_normal_sample(p, n, seed); },
                                 [&](const auto&) { return oracle::mc_product_sample(product(s), n, seed); }},
                      s);
}

std::vector<double> real_row(double x, const EvalResult& r) { return {x, r.value, r.abs_err, r.converged ? 1.0 : 0.0}; }

// A density pole is a legitimate +inf; anything else the library refuses is a failed row.
template <class F>
std::vector<double> guarded(double x, std::size_t width, F&& f)
{
    try {
        return f();
    } catch (const PoleError&) {
        std::vector<double> row{x, inf};
        while (row.size() + 1 < width) row.push_back(0.0);
        row.push_back(1.0);
        return row;
    } catch (const std::exception&) {
        std::vector<double> row{x};
        while (row.size() + 1 < width) row.push_back(nan);
        row.push_back(0.0);
        return row;
    }
}

bool integral_column(const std::string& c) { return c == "converged" || c == "index"; }

} // namespace

double default_tol()
{
    const char* env = std::getenv("VGPROD_TOL");
    if (!env || !*env) return 1e-10;
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0') throw ValidationError(std::string("VGPROD_TOL is not a number: ") + env);
    return v;
}

Quantity parse_quantity(const std::string& s)
{
    if (s == "pdf") return Quantity::pdf;
    if (s == "cdf") return Quantity::cdf;
    if (s == "cf") return Quantity::cf;
    if (s == "tail") return Quantity::tail;
    if (s == "quantile") return Quantity::quantile;
    if (s == "prob-nonpositive") return Quantity::prob_nonpositive;
    if (s == "sample") return Quantity::sample;
    throw ValidationError("quantity must be one of pdf, cdf, cf, tail, quantile, prob-nonpositive, sample; got '" + s + "'");
}

Format parse_format(const std::string& s)
{
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ValidationError("format must be csv or json; got '" + s + "'");
}

JobConfig parse_config(const json& j)
{
    JobConfig c;
    c.tol = default_tol();
    try {
        if (j.contains("spec")) c.spec = parse_spec(j.at("spec"));
        if (j.contains("quantity")) c.quantity = parse_quantity(j.at("quantity").get<std::string>());
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.grid.start = get(g, "start", c.grid.start);
            c.grid.stop = get(g, "stop", c.grid.start);
            c.grid.count = get(g, "count", c.grid.count);
            auto sp = get<std::string>(g, "spacing", "linear");
            if (sp != "linear" && sp != "log") throw ValidationError("grid spacing must be linear or log; got '" + sp + "'");
            c.grid.spacing = sp == "log" ? Spacing::log : Spacing::linear;
        }
        c.tol = get(j, "tol", c.tol);
        c.seed = get(j, "seed", c.seed);
        c.samples = get(j, "samples", c.samples);
        if (j.contains("output")) {
            c.out = get<std::string>(j.at("output"), "path", "");
            c.format = parse_format(get<std::string>(j.at("output"), "format", "csv"));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    return c;
}

void check(const JobConfig& c)
{
    if (!c.spec) throw ValidationError("the config needs a spec");
    if (!(c.tol >= 1e-14 && c.tol <= 1e-2)) throw ValidationError("tol must lie in [1e-14, 1e-2], got " + std::to_string(c.tol));
    if (c.quantity == Quantity::sample) {
        if (c.samples < 1) throw ValidationError("sample size must be at least 1");
        return;
    }
    if (c.quantity == Quantity::prob_nonpositive) return;
    const auto& g = c.grid;
    if (g.count < 1) throw ValidationError("grid count must be at least 1");
    if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ValidationError("grid bounds must be finite");
    if (g.spacing == Spacing::log && !(g.start * g.stop > 0.0))
        throw ValidationError("a log grid needs start and stop nonzero and of one sign");
    auto pts = grid_points(g);
    if (c.quantity == Quantity::quantile)
        for (double p : pts)
            if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile grid points must lie in (0, 1)");
    if (c.quantity == Quantity::tail)
        for (double z : pts)
            if (z == 0.0) throw ValidationError("tail grid points must be nonzero");
    if (c.quantity == Quantity::cf && !cf_supported(*c.spec))
        throw ValidationError("cf needs every beta = 0 or every m - 1/2 a nonnegative integer");
}

std::vector<double> grid_points(const Grid& g)
{
    std::vector<double> out;
    if (g.count == 1) return {g.start};
    for (int k = 0; k < g.count; ++k) {
        double u = static_cast<double>(k) / (g.count - 1);
        if (k == 0 || k == g.count - 1)
            out.push_back(k == 0 ? g.start : g.stop);
        else if (g.spacing == Spacing::linear)
            out.push_back(g.start + u * (g.stop - g.start));
        else
            out.push_back(std::copysign(std::exp(std::log(std::abs(g.start)) * (1 - u) + std::log(std::abs(g.stop)) * u),
                                        g.start));
    }
    return out;
}

Table run_job(const JobConfig& c)
{
    check(c);
    const Spec& s = *c.spec;
    const Tolerance tol = Tolerance::mixed(c.tol);
    Table t;
    switch (c.quantity) {
    case Quantity::prob_nonpositive:
        t.columns = {"value"};
        t.rows.push_back({prob_nonpositive(product(s))});
        return t;
    case Quantity::sample: {
        t.columns = {"index", "value"};
        auto b = sample(s, c.samples, c.seed);
        for (std::size_t i = 0; i < b.n(); ++i) t.rows.push_back({static_cast<double>(i), b.values[i]});
        return t;
    }
    case Quantity::pdf:
    case Quantity::cdf: t.columns = {"x", "value", "abs_err", "converged"}; break;
    case Quantity::quantile: t.columns = {"p", "value", "abs_err", "converged"}; break;
    case Quantity::tail: t.columns = {"x", "value"}; break;
    case Quantity::cf: t.columns = {"t", "re", "im", "abs_err", "converged"}; break;
    }
    const std::size_t width = t.columns.size();
    for (double x : grid_points(c.grid)) {
        auto row = guarded(x, width, [&]() -> std::vector<double> {
            switch (c.quantity) {
            case Quantity::pdf: return real_row(x, pdf(s, x, tol));
            case Quantity::cdf: return real_row(x, cdf(s, x, tol));
            case Quantity::quantile: return real_row(x, quantile_numeric(product(s), x, c.tol));
            case Quantity::tail:
                return {x, tail_asymptotic_cdf(product(s), x, x > 0.0 ? Side::upper : Side::lower)};
            case Quantity::cf: {
                auto r = cf(s, x, tol);
                return {x, r.value.real(), r.value.imag(), r.abs_err, r.converged ? 1.0 : 0.0};
            }
            default: return {};
            }
        });
        if (t.columns.back() == "converged") t.all_converged = t.all_converged && row.back() == 1.0;
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(std::ostream& os, const Table& t)
{
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    char buf[64];
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (integral_column(t.columns[k]))
                std::snprintf(buf, sizeof buf, "%.0f", row[k]);
            else
                std::snprintf(buf, sizeof buf, "%.17g", row[k]);
            os << (k ? "," : "") << buf;
        }
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& t)
{
    json out = json::array();
    for (const auto& row : t.rows) {
        json o = json::object();
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto& c = t.columns[k];
            if (c == "converged")
                o[c] = row[k] == 1.0;
            else if (c == "index")
                o[c] = static_cast<std::uint64_t>(row[k]);
            else if (std::isfinite(row[k]))
                o[c] = row[k];
            else
                o[c] = nullptr;
        }
        out.push_back(std::move(o));
    }
    os << out.dump(2) << '\n';
}

Table read_csv(std::istream& is)
{
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty CSV");
    std::stringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) t.columns.push_back(c);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.columns.size()) throw ValidationError("CSV row width does not match the header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace vgprod::cli
