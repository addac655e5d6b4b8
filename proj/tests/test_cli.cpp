#include "test_main.hpp"

#include "job.hpp"
#include "validation.hpp"

#include "vgprod/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace vgprod;
using namespace vgprod::cli;
using json = nlohmann::json;

namespace {

json generic(std::vector<VgParams> f)
{
    json a = json::array();
    for (const auto& p : f) a.push_back({{"m", p.m}, {"alpha", p.alpha}, {"beta", p.beta}});
    return {{"kind", "generic"}, {"factors", a}};
}

JobConfig job(const json& spec, const std::string& q, double start = 0, double stop = 0, int count = 1)
{
    return parse_config({{"spec", spec}, {"quantity", q}, {"grid", {{"start", start}, {"stop", stop}, {"count", count}}}});
}

std::string bits(double v)
{
    std::ostringstream os;
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    os << std::hex << u;
    return os.str();
}

// Exit status of the CLI run on a config file.
int run_cli(const json& config, const std::string& args = "")
{
    auto dir = std::filesystem::temp_directory_path();
    auto path = dir / "vgprod_cli_test.json";
    std::ofstream(path) << config.dump();
    std::string cmd = std::string(VGPROD_CLI) + " eval -c " + path.string() + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("config parsing and validation")
{
    auto c = job(generic({{0.5, 1, 0}, {1.2, 2, 0}}), "cdf", -1, 1, 5);
    CHECK(c.quantity == Quantity::cdf);
    CHECK(c.grid.count == 5);
    CHECK_NOTHROW(check(c));

    c.tol = 1.0;
    CHECK_THROWS_WITH_AS(check(c), doctest::Contains("[1e-14, 1e-2]"), ValidationError);
    c.tol = 1e-10;
    c.grid.count = 0;
    CHECK_THROWS_WITH_AS(check(c), doctest::Contains("count"), ValidationError);

    CHECK_THROWS_WITH_AS(job(generic({{0.5, 1, 1}}), "pdf"), doctest::Contains("0 ≤ |β| < α"), ValidationError);
    CHECK_THROWS_AS(job({{"kind", "stable"}}, "pdf"), ValidationError);
    CHECK_THROWS_AS(job(generic({{0.5, 1, 0}}), "median"), ValidationError);
    CHECK_THROWS_AS(parse_config({{"spec", {{"kind", "generic"}, {"factors", "x"}}}}), ValidationError);
    CHECK_THROWS_WITH_AS(check(job(generic({{1, 1, 0.3}}), "cf")), doctest::Contains("beta = 0"), ValidationError);
    CHECK_THROWS_AS(check(job(generic({{1, 1, 0.3}}), "quantile", 0, 1, 3)), ValidationError);

    auto nl = job({{"kind", "normal-laplace"}, {"sigmas", {1.0, 2.0}}, {"alphas", {1.5}}}, "pdf");
    CHECK(std::get<MixedNormalLaplaceSpec>(*nl.spec).nu() == doctest::Approx(0.75));
    CHECK_THROWS_WITH_AS(job({{"kind", "normal-laplace"}, {"sigmas", {1.0}}}, "pdf"), doctest::Contains("even"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(job({{"kind", "correlated-normal"}, {"blocks", {{{"sigma1", 1}, {"sigma2", 1}, {"rho", 1}}}}}, "pdf"),
                         doctest::Contains("-1 < rho < 1"), ValidationError);
}

TEST_CASE("grid points")
{
    auto lin = grid_points({-1, 1, 5, Spacing::linear});
    CHECK(lin == std::vector<double>{-1, -0.5, 0, 0.5, 1});
    auto lg = grid_points({1e-3, 10, 5, Spacing::log});
    CHECK(lg.front() == 1e-3);
    CHECK(lg.back() == 10);
    CHECK(lg[2] == doctest::Approx(0.1));
    auto neg = grid_points({-100, -1, 3, Spacing::log});
    CHECK(neg[1] == doctest::Approx(-10));
    CHECK(grid_points({2, 5, 1, Spacing::linear}) == std::vector<double>{2});
}

TEST_CASE("jobs")
{
    // a symmetric CDF is 1/2 at zero
    auto t = run_job(job(generic({{0.5, 1, 0}, {1.2, 2, 0}}), "cdf", -1, 1, 5));
    REQUIRE(t.rows.size() == 5u);
    CHECK(t.columns == std::vector<std::string>{"x", "value", "abs_err", "converged"});
    CHECK(t.rows[2][0] == 0.0);
    CHECK(t.rows[2][1] == 0.5);
    CHECK(t.all_converged);
    for (std::size_t k = 1; k < t.rows.size(); ++k) CHECK(t.rows[k][1] > t.rows[k - 1][1]);

    ProductSpec skew({{1, 1, 0.3}, {0.5, 2, -0.5}});
    auto p = run_job(job(generic(skew.factors()), "prob-nonpositive"));
    CHECK(p.rows.at(0).at(0) == prob_nonpositive(skew));

    // each special family goes through its own evaluator
    auto lap = run_job(job({{"kind", "laplace"}, {"factors", {{{"alpha", 1}}, {{"alpha", 1}}}}}, "pdf", 0.5, 0.5, 1));
    CHECK(lap.rows[0][1] == doctest::Approx(std::cyl_bessel_k(0.0, 2 * std::sqrt(0.5))).epsilon(1e-10));
    auto cf = run_job(job({{"kind", "normal-laplace"}, {"sigmas", {1.0, 1.0}}}, "cf", 2, 2, 1));
    CHECK(cf.columns.size() == 5u);
    CHECK(cf.rows[0][1] == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-10));
    auto corr = run_job(job({{"kind", "correlated-normal"}, {"blocks", {{{"sigma1", 1}, {"sigma2", 1.3}, {"rho", 0.3}}}}},
                            "cdf", -1, 1, 3));
    CHECK(corr.all_converged);

    // the density pole at zero is reported as +inf
    auto pole = run_job(job(generic({{0.5, 1, 0}, {0.5, 1, 0}}), "pdf", 0, 0, 1));
    CHECK(std::isinf(pole.rows[0][1]));

    auto s = run_job(parse_config({{"spec", generic(skew.factors())}, {"quantity", "sample"}, {"samples", 20}, {"seed", 3}}));
    CHECK(s.rows.size() == 20u);
    CHECK(s.columns[0] == "index");
}

TEST_CASE("CSV round trip is bit exact")
{
    auto c = job(generic({{1, 1, 0.3}, {0.5, 2, -0.5}}), "pdf", -3, 2, 7);
    c.grid.spacing = Spacing::linear;
    auto t = run_job(c);
    t.rows.push_back({1.0 / 3.0, std::numeric_limits<double>::infinity(), std::nan(""), 0.0});
    std::stringstream ss;
    write_csv(ss, t);
    auto back = read_csv(ss);
    REQUIRE(back.columns == t.columns);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t k = 0; k < t.columns.size(); ++k)
            if (!std::isnan(t.rows[i][k])) CHECK_MESSAGE(bits(back.rows[i][k]) == bits(t.rows[i][k]), i << "," << k);

    std::stringstream js;
    write_json(js, t);
    auto j = json::parse(js);
    CHECK(j.size() == t.rows.size());
    CHECK(j[0]["value"].get<double>() == t.rows[0][1]);
    CHECK(j.back()["value"].is_null());
    CHECK(j.back()["converged"] == false);
}

TEST_CASE("exit codes")
{
    json good = {{"spec", generic({{0.5, 1, 0}, {1.2, 2, 0}})}, {"quantity", "cdf"}, {"grid", {{"start", -1}, {"stop", 1}, {"count", 3}}}};
    CHECK(run_cli(good) == 0);
    CHECK(run_cli(good, "--tol 0.5") == 1);
    CHECK(run_cli({{"spec", generic({{0.5, 1, 1}})}}) == 1);
    // the tightest tolerance on a singular, skewed spec cannot be met at zero
    json hard = {{"spec", generic({{-0.25, 1, 0.5}, {2, 1.5, -0.75}})}, {"quantity", "cdf"}, {"tol", 1e-14}};
    CHECK(run_cli(hard) == 2);
    CHECK(run_cli(hard, "--tol 1e-8") == 0);
}

TEST_CASE("validation suites")
{
    CHECK(validation::suite_names().size() == 5u);
    CHECK(validation::suite_criteria("identities") == std::vector<int>{3, 9, 10, 11});
    CHECK_THROWS_AS(validation::suite_criteria("everything"), std::invalid_argument);
    auto c = validation::run_criterion(10);
    CHECK(c.passed());
    CHECK(c.checks.size() == 6u);
    CHECK_THROWS_AS(validation::run_criterion(12), std::invalid_argument);
}
