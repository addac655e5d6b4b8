// vgprod: evaluate, sample and validate products of variance-gamma variables.
//
// Exit status: 0 success, 1 bad config or parameters, 2 some row did not converge,
// 3 a validation check failed.

#include "job.hpp"
#include "validation.hpp"

#include "vgprod/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace vgprod;
using namespace vgprod::cli;
using json = nlohmann::json;

namespace {

struct Overrides {
    std::string config;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> quantity;
    std::optional<std::size_t> samples;
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("-c,--config", o.config, "JSON job file")->required()->check(CLI::ExistingFile);
    app->add_option("--tol", o.tol, "tolerance in [1e-14, 1e-2]; default $VGPROD_TOL or 1e-10");
    app->add_option("--seed", o.seed, "sampling seed");
    app->add_option("-o,--out", o.out, "output path; - for stdout");
    app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

JobConfig load(const Overrides& o)
{
    std::ifstream in(o.config);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    auto c = parse_config(j);
    if (o.tol) c.tol = *o.tol;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out == "-" ? "" : *o.out;
    if (o.format) c.format = parse_format(*o.format);
    if (o.quantity) c.quantity = parse_quantity(*o.quantity);
    if (o.samples) c.samples = *o.samples;
    return c;
}

void emit(const JobConfig& c, const Table& t)
{
    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) throw ValidationError("cannot open output file " + c.out);
    }
    std::ostream& os = c.out.empty() ? std::cout : file;
    if (c.format == Format::json)
        write_json(os, t);
    else
        write_csv(os, t);
}

int run_eval(const Overrides& o, bool sampling)
{
    auto c = load(o);
    if (sampling) c.quantity = Quantity::sample;
    auto t = run_job(c);
    emit(c, t);
    if (!t.all_converged) {
        std::fprintf(stderr, "vgprod: some rows did not converge (converged = 0)\n");
        return 2;
    }
    return 0;
}

int run_validate(const std::string& suite, std::uint64_t seed, const std::string& out)
{
    using namespace vgprod::validation;
    std::vector<int> ids;
    if (suite == "all")
        for (int id = 1; id <= 11; ++id) ids.push_back(id);
    else
        ids = suite_criteria(suite);
    json report = json::array();
    bool ok = true;
    for (int id : ids) {
        auto c = run_criterion(id, seed);
        ok = ok && c.passed();
        std::printf("%s  %2d  %s (%.1f s)\n", c.passed() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
        for (const auto& k : c.checks) {
            std::printf("        %s %s: %.3g (limit %.3g) %s\n", k.passed ? "ok  " : "FAIL", k.name.c_str(), k.measured,
                        k.limit, k.detail.c_str());
            report.push_back({{"criterion", c.id},
                              {"check", k.name},
                              {"passed", k.passed},
                              {"measured", std::isfinite(k.measured) ? json(k.measured) : json(nullptr)},
                              {"limit", k.limit},
                              {"detail", k.detail}});
        }
        std::fflush(stdout);
    }
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw ValidationError("cannot open output file " + out);
        f << report.dump(2) << '\n';
    }
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Products of independent variance-gamma random variables"};
    app.require_subcommand(1);

    Overrides eval_opts, sample_opts;
    auto* eval = app.add_subcommand("eval", "evaluate a quantity on a grid");
    add_common(eval, eval_opts);
    eval->add_option("--quantity", eval_opts.quantity, "pdf|cdf|cf|tail|quantile|prob-nonpositive|sample");

    auto* sample = app.add_subcommand("sample", "draw product samples");
    add_common(sample, sample_opts);
    sample->add_option("-n,--samples", sample_opts.samples, "sample size");

    std::string suite, report;
    std::uint64_t seed = validation::default_seed;
    auto* validate = app.add_subcommand("validate", "run a validation suite");
    validate->add_option("suite", suite, "identities|oracle-equivalence|normalization|asymptotics|montecarlo|all")
        ->required();
    validate->add_option("--seed", seed, "Monte Carlo seed");
    validate->add_option("-o,--out", report, "write the report as JSON");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*eval) return run_eval(eval_opts, false);
        if (*sample) return run_eval(sample_opts, true);
        return run_validate(suite, seed, report);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "vgprod: %s\n", e.what());
        return 1;
    }
}
