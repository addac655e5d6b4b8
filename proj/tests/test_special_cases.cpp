#include "test_main.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/product.hpp"
#include "vgprod/quadrature.hpp"
#include "vgprod/special_cases.hpp"
#include "vgprod/specfun.hpp"

#include <cmath>
#include <complex>
#include <cstdint>

using namespace vgprod;
using specfun::bessel_k;
using specfun::pi;
using cplx = std::complex<double>;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const Tolerance tight = Tolerance::mixed(1e-12);

struct Gen {
    std::uint64_t state;

    double uniform()
    {
        state = splitmix64(state);
        return (state >> 11) * 0x1.0p-53;
    }
    LaplaceProductSpec al(int n, bool skew = true)
    {
        std::vector<AlFactor> f;
        for (int i = 0; i < n; ++i) {
            double a = 0.5 + 2.0 * uniform();
            f.push_back({a, skew ? (2.0 * uniform() - 1.0) * 0.7 * a : 0.0});
        }
        return LaplaceProductSpec(f);
    }
};

} // namespace

TEST_CASE("validation")
{
    CHECK_THROWS_AS(LaplaceProductSpec({}), ValidationError);
    CHECK_THROWS_AS(LaplaceProductSpec({{1.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(MixedNormalLaplaceSpec({1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(MixedNormalLaplaceSpec({}, {}), ValidationError);
    CHECK_THROWS_AS(MixedNormalLaplaceSpec({1.0, -1.0}, {}), ValidationError);
    CHECK_THROWS_AS(CorrelatedNormalSpec({{1, 1, 1.0}}), ValidationError);
    CHECK_THROWS_AS(CorrelatedNormalSpec({{0, 1, 0.2}}), ValidationError);
    CHECK_THROWS_AS(al_product_pdf(LaplaceProductSpec({{1, 0}, {1, 0}}), 0.0, tight), PoleError);
    CHECK_THROWS_AS(laplace_product_pdf(LaplaceProductSpec({{1, 0.2}}), 0.3, tight), ValidationError);

    MixedNormalLaplaceSpec m({2.0, 0.5}, {1.5});
    CHECK(rel(m.nu(), 1.5) < 1e-15);
    CHECK(m.product().n() == 2);
    CHECK(m.product()[0].m == 0.0);
    CHECK(m.product()[1].m == 0.5);
    CorrelatedNormalSpec c({{1, 2, 0.5}, {0.5, 1, -0.2}});
    CHECK(rel(c.s(), 1.0) < 1e-15);
    CHECK(rel(c.tau(), 0.75 * 0.96) < 1e-15);
    CHECK(rel(c.product()[0].alpha, 1.0 / 1.5) < 1e-15);
    CHECK(rel(c.product()[0].beta, 0.5 / 1.5) < 1e-15);
}

TEST_CASE("asymmetric Laplace density")
{
    // N = 1: (alpha^2 - beta^2) exp(beta z - alpha |z|) / (2 alpha)
    for (double z : {-2.0, -0.1, 0.4, 3.0}) {
        double a = 1.7, b = -0.6;
        double exact = (a * a - b * b) * std::exp(b * z - a * std::abs(z)) / (2 * a);
        CHECK(rel(al_product_pdf(LaplaceProductSpec({{a, b}}), z, tight).value, exact) < 1e-13);
    }
    CHECK(rel(al_product_pdf(LaplaceProductSpec({{1, 0}, {1, 0}}), 0.5, tight).value, bessel_k(0.0, 2 * std::sqrt(0.5))) <
          1e-12);

    Gen gen{11};
    for (int N = 2; N <= 4; ++N)
        for (int k = 0; k < 3; ++k) {
            auto s = gen.al(N);
            for (double z : {-4.0, -0.3, 0.05, 1.2, 9.0}) {
                double v = al_product_pdf(s, z, tight).value;
                double ref = product_pdf_halfint(s.product(), z, tight).value;
                CHECK_MESSAGE(std::abs(v - ref) <= 1e-10 * std::max(1.0, ref), N << " " << z);
                // and the contour path for general beta
                if (N <= 3) CHECK(std::abs(v - product_pdf_general(s.product(), z, tight).value) <= 1e-9 * std::max(1.0, v));
            }
        }
}

TEST_CASE("asymmetric Laplace distribution function")
{
    auto s = LaplaceProductSpec({{1.3, 0.4}, {0.8, -0.3}});
    CHECK(std::abs(al_product_cdf(s, 1e5, tight).value - 1.0) < 1e-10);
    CHECK(std::abs(al_product_cdf(s, -1e5, tight).value) < 1e-10);
    // the mass left of zero is the sign probability
    CHECK(std::abs(al_product_cdf(s, -1e-14, tight).value - prob_nonpositive(s.product())) < 1e-8);
    CHECK(std::abs(al_product_cdf(s, 1e-14, tight).value - prob_nonpositive(s.product())) < 1e-8);
    for (double z : {-0.8, 0.8}) {
        double h = 1e-4;
        double fd = (al_product_cdf(s, z + h, tight).value - al_product_cdf(s, z - h, tight).value) / (2 * h);
        CHECK(rel(fd, al_product_pdf(s, z, tight).value) < 1e-5);
    }
    for (double z : {-3.0, -0.2, 0.6, 4.0})
        CHECK(std::abs(al_product_cdf(s, z, tight).value - product_cdf_numeric(s.product(), z, 1e-10).value) < 1e-8);

    // beta = 0 reduces to the Laplace form
    Gen gen{5};
    for (int N = 1; N <= 4; ++N) {
        auto l = gen.al(N, false);
        for (double z : {-5.0, -0.4, 0.01, 2.0})
            CHECK(std::abs(al_product_cdf(l, z, tight).value - laplace_product_cdf(l, z, tight).value) < 1e-10);
    }
}

TEST_CASE("asymmetric Laplace characteristic function")
{
    CHECK(std::abs(al_product_cf(LaplaceProductSpec({{2, 0}}), 1.0, tight).value - 0.8) < 1e-12);
    // N = 1: gamma^2 / ((alpha - beta - i t)(alpha + beta + i t))
    double a = 1.4, b = 0.5;
    for (double t : {-3.0, 0.2, 1.0, 7.0}) {
        cplx exact = (a * a - b * b) / ((cplx(a - b, -t)) * cplx(a + b, t));
        CHECK(std::abs(al_product_cf(LaplaceProductSpec({{a, b}}), t, tight).value - exact) < 1e-11);
    }
    Gen gen{21};
    for (int N = 2; N <= 3; ++N) {
        auto s = gen.al(N);
        for (double t : {-2.0, 0.1, 0.7, 10.0}) {
            cplx v = al_product_cf(s, t, tight).value;
            CHECK(std::abs(v - product_cf_halfint(s.product(), t, tight).value) < 1e-9);
            CHECK(std::abs(v) <= 1.0 + 1e-12);
            CHECK(std::abs(v - std::conj(al_product_cf(s, -t, tight).value)) < 1e-10);
        }
    }
}

TEST_CASE("Laplace forms against the symmetric product forms")
{
    Gen gen{77};
    for (int N = 1; N <= 4; ++N) {
        auto s = gen.al(N, false);
        for (double z : {-3.0, -0.05, 0.5, 12.0}) {
            if (N > 1) CHECK(rel(laplace_product_pdf(s, z, tight).value, product_pdf_symmetric(s.product(), z, tight).value) < 1e-9);
            CHECK(std::abs(laplace_product_cdf(s, z, tight).value - product_cdf_symmetric(s.product(), z, tight).value) < 1e-9);
        }
        for (double t : {0.1, 0.7, 2.0, 10.0}) {
            auto v = laplace_product_cf(s, t, tight).value;
            CHECK(std::abs(v - product_cf_symmetric(s.product(), t, tight).value) < 1e-9);
            CHECK(std::abs(v - al_product_cf(s, t, tight).value) < 1e-9);
        }
    }
    for (double z : {0.1, 0.5, 2.0})
        CHECK(rel(laplace_product_pdf(LaplaceProductSpec({{1, 0}, {1, 0}}), z, tight).value,
                  bessel_k(0.0, 2 * std::sqrt(z))) < 1e-12);
}

TEST_CASE("mixed normal and Laplace products")
{
    // two standard normals: K0(|z|)/pi, and CF (1 + t^2)^(-1/2)
    MixedNormalLaplaceSpec nn({1.0, 1.0}, {});
    for (double z : {-2.0, 0.3, 5.0}) CHECK(rel(mixed_product_pdf(nn, z, tight).value, bessel_k(0.0, std::abs(z)) / pi) < 1e-12);
    for (double t : {0.3, 2.0}) CHECK(std::abs(mixed_product_cf(nn, t, tight).value - 1.0 / std::sqrt(1 + t * t)) < 1e-11);

    std::vector<MixedNormalLaplaceSpec> specs{nn,
                                              MixedNormalLaplaceSpec({0.7, 1.9}, {1.3}),
                                              MixedNormalLaplaceSpec({}, {0.6, 2.0}),
                                              MixedNormalLaplaceSpec({1.2, 0.8, 0.5, 2.0}, {1.1}),
                                              MixedNormalLaplaceSpec({1.5, 0.4}, {0.9, 1.7})};
    for (const auto& s : specs) {
        CHECK(mixed_product_cdf(s, 0.0, tight).value == 0.5);
        CHECK(mixed_product_cf(s, 0.0, tight).value == cplx(1.0));
        for (double z : {-4.0, -0.3, 0.02, 1.5}) {
            CHECK(rel(mixed_product_pdf(s, z, tight).value, product_pdf(s.product(), z, tight).value) < 1e-9);
            CHECK(std::abs(mixed_product_cdf(s, z, tight).value - product_cdf_symmetric(s.product(), z, tight).value) <
                  1e-9);
        }
        for (double t : {0.1, 0.7, 2.0, 10.0})
            CHECK(std::abs(mixed_product_cf(s, t, tight).value - product_cf_symmetric(s.product(), t, tight).value) < 1e-9);
    }
}

TEST_CASE("correlated normal products")
{
    // rho = 0 collapses to the single G form of independent normals
    CorrelatedNormalSpec indep({{1.0, 2.0, 0.0}, {0.5, 1.5, 0.0}});
    for (double z : {-3.0, 0.1, 0.8})
        CHECK(rel(correlated_normal_product_pdf(indep, z, tight).value,
                  independent_normal_product_pdf({1.0, 2.0, 0.5, 1.5}, z, tight).value) < 1e-9);
    // one normal is the Gaussian density; two are K0(|z|/s)/(pi s)
    CHECK(rel(independent_normal_product_pdf({1.5}, 0.7, tight).value,
              std::exp(-0.7 * 0.7 / (2 * 2.25)) / (1.5 * std::sqrt(2 * pi))) < 1e-12);
    CHECK(rel(independent_normal_product_pdf({2.0, 0.5}, 0.4, tight).value, bessel_k(0.0, 0.4) / pi) < 1e-12);

    CorrelatedNormalSpec one({{1.0, 1.0, 0.5}});
    VgParams p{0.0, 1.0 / 0.75, 0.5 / 0.75};
    for (double z : {-1.0, 0.3, 2.5}) CHECK(rel(correlated_normal_product_pdf(one, z, tight).value, vg_pdf(p, z)) < 1e-10);

    CorrelatedNormalSpec two({{1.0, 1.3, 0.3}, {0.8, 1.0, -0.6}});
    for (double z : {-2.0, -0.2, 0.2, 1.0, 5.0}) {
        auto r = correlated_normal_product_pdf(two, z, tight);
        CHECK(r.converged);
        CHECK(rel(r.value, product_pdf(two.product(), z, tight).value) < 1e-9);
    }

    // the series integrates to one
    auto f = [&](double z) { return correlated_normal_product_pdf(two, z, Tolerance::mixed(1e-9)).value; };
    quad::Options o{1e-8, 1e-8};
    double mass = 0.0;
    for (double dir : {1.0, -1.0}) {
        auto g = [&](double y) { return f(dir * y); };
        mass += quad::integrate_near_origin(g, 0.0, 1.0, o).value;
        mass += quad::integrate_tail(g, 1.0, 1.0, 2.0, o).value;
    }
    CHECK(std::abs(mass - 1.0) < 1e-6);
}

TEST_CASE("samplers")
{
    CorrelatedNormalSpec two({{1.0, 1.3, 0.3}, {0.8, 1.0, -0.6}});
    auto a = correlated_normal_sample(two, 50000, 42);
    auto b = correlated_normal_sample(two, 50000, 42);
    CHECK(a.values == b.values);
    CHECK(a.spec_digest == digest(two.product().factors()));
    CHECK(correlated_normal_sample(two, 10, 43).values != std::vector<double>(a.values.begin(), a.values.begin() + 10));

    auto frac_nonpos = [](const SampleBatch& s) {
        double k = 0;
        for (double v : s.values) k += v <= 0.0;
        return k / s.n();
    };
    double p = prob_nonpositive(two.product());
    CHECK(std::abs(frac_nonpos(a) - p) < 4.0 * std::sqrt(p * (1 - p) / a.n()));

    // E[X1 X2] = rho s1 s2 per block, so E[Z] = product over blocks
    double mean = 0.0;
    for (double v : a.values) mean += v;
    mean /= a.n();
    CHECK(std::abs(mean - 0.3 * 1.3 * (-0.6) * 0.8) < 0.03);

    MixedNormalLaplaceSpec m({0.7, 1.9}, {1.3});
    auto ms = mixed_product_sample(m, 50000, 9);
    CHECK(std::abs(frac_nonpos(ms) - 0.5) < 4.0 * std::sqrt(0.25 / ms.n()));
    // E|Z| = (2/pi) s1 s2 / alpha
    double abs_mean = 0.0;
    for (double v : ms.values) abs_mean += std::abs(v);
    abs_mean /= ms.n();
    CHECK(rel(abs_mean, 2.0 / pi * 0.7 * 1.9 / 1.3) < 0.04);
}
