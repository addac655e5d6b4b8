#include "test_main.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/product.hpp"
#include "vgprod/specfun.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

using namespace vgprod;
using specfun::bessel_k;
using specfun::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double inf_value() { return std::numeric_limits<double>::infinity(); }

// Deterministic spec generator for property checks.
struct SpecGen {
    std::uint64_t state;

    double uniform()
    {
        state = splitmix64(state);
        return (state >> 11) * 0x1.0p-53;
    }
    VgParams factor()
    {
        double m = -0.3 + 2.5 * uniform();
        double alpha = 0.5 + 2.0 * uniform();
        double beta = (2.0 * uniform() - 1.0) * 0.6 * alpha;
        return {m, alpha, beta};
    }
    ProductSpec spec(int n)
    {
        std::vector<VgParams> f;
        for (int i = 0; i < n; ++i) f.push_back(factor());
        return ProductSpec(f);
    }
};

ProductSpec laplace2() { return ProductSpec({{0.5, 1, 0}, {0.5, 1, 0}}); }
ProductSpec skew_halfint() { return ProductSpec({{0.5, 1, 0.3}, {1.5, 2, -0.5}}); }
ProductSpec skew_generic() { return ProductSpec({{1, 1, 0.3}, {0.5, 2, -0.5}}); }

} // namespace

TEST_CASE("spec validation and derived quantities")
{
    CHECK_THROWS_AS(ProductSpec({}), ValidationError);
    CHECK_THROWS_AS(ProductSpec(std::vector<VgParams>(13)), ValidationError);
    CHECK_THROWS_AS(ProductSpec({{0.5, 1, 1}}), ValidationError);
    ProductSpec s({{0.5, 2, 0}, {1.5, 3, 0.5}});
    CHECK(s.xi() == doctest::Approx(6.0));
    CHECK(rel(s.eta(), 1.0 / (std::tgamma(1.0) * std::tgamma(2.0))) < 1e-14);
    CHECK(s.mu_n() == doctest::Approx(1.0));
    CHECK(s.half_integer());
    CHECK(!s.symmetric());
    CHECK(!ProductSpec({{0.7, 1, 0}}).half_integer());
}

TEST_CASE("subset weights")
{
    auto s = skew_halfint();
    auto plus = subset_weights(s, 1), minus = subset_weights(s, -1);
    REQUIRE(plus.size() == 2);
    REQUIRE(minus.size() == 2);
    CHECK(plus[0].subset.members == 0u);
    CHECK(plus[0].omega == doctest::Approx(0.7 * 2.5));
    CHECK(plus[1].omega == doctest::Approx(1.3 * 1.5));
    for (const auto& w : minus) CHECK(w.subset.odd());
    ProductSpec big(std::vector<VgParams>(12, VgParams{0.5, 1, 0.2}));
    CHECK(subset_weights(big, 1).size() == 2048u);
}

TEST_CASE("a-coefficient closed form equals enumeration through N=6")
{
    for (int N = 1; N <= 6; ++N) {
        std::vector<int> j(N, 0), top(N, 3);
        int patterns = 0;
        for (;;) {
            for (int sign : {1, -1}) REQUIRE(subset_coefficient(j, sign) == subset_coefficient_enumerated(j, sign));
            ++patterns;
            int i = 0;
            while (i < N && j[i] == top[i]) j[i++] = 0;
            if (i == N) break;
            ++j[i];
        }
        CHECK(patterns == static_cast<int>(std::pow(4, N)));
    }
    CHECK(subset_coefficient({2, 4, 0}, 1) == 4);
    CHECK(subset_coefficient({1, 1, 3}, -1) == -4);
    CHECK(subset_coefficient({1, 0, 0}, 1) == 0);
    CHECK(subset_coefficient({2, 0, 0}, 1) == 4);
    // a_{j,0,...,0} = 2^{N-2}(1 + (-1)^j)
    for (int N = 2; N <= 6; ++N)
        for (int jj = 0; jj < 6; ++jj) {
            std::vector<int> j(N, 0);
            j[0] = jj;
            CHECK(subset_coefficient(j, 1) == (1 << (N - 2)) * (1 + (jj % 2 == 0 ? 1 : -1)));
        }
}

TEST_CASE("single factor collapses to the VG density")
{
    SpecGen gen{11};
    for (int k = 0; k < 10; ++k) {
        ProductSpec s({gen.factor()});
        for (double z : {0.8, -0.8, 0.05, 3.0}) CHECK(rel(product_pdf_general(s, z).value, vg_pdf(s[0], z)) < 1e-10);
    }
    ProductSpec al({{0.5, 2, 0.7}});
    for (double z : {0.4, -1.1})
        CHECK(rel(product_pdf_halfint(al, z).value, (4 - 0.49) * std::exp(0.7 * z - 2 * std::abs(z)) / 4.0) < 1e-12);
}

TEST_CASE("Laplace product is K0")
{
    auto s = laplace2();
    for (double z : {0.1, 0.5, 2.0, -0.5}) {
        double k0 = bessel_k(0.0, 2.0 * std::sqrt(std::abs(z)));
        CHECK(rel(product_pdf(s, z).value, k0) < 1e-10);
        CHECK(rel(product_pdf_symmetric(s, z).value, k0) < 1e-10);
        CHECK(rel(product_pdf_general(s, z).value, k0) < 1e-10);
    }
    CHECK_THROWS_AS(product_pdf(s, 0.0), PoleError);
}

TEST_CASE("half-integer and general paths agree")
{
    auto s = skew_halfint();
    for (double z : {0.7, -0.7}) CHECK(std::abs(product_pdf_halfint(s, z).value - product_pdf_general(s, z).value) < 1e-8);
    for (double z : {1e-6, 0.02, 5.0, 300.0, -3000.0})
        CHECK(rel(product_pdf_halfint(s, z, Tolerance{1e-300, 1e-12}).value,
                  product_pdf_general(s, z, Tolerance{1e-300, 1e-12}).value) < 1e-10);
    ProductSpec three({{0.5, 1, -0.2}, {1.5, 0.7, 0.3}, {0.5, 2, 0.5}});
    for (double z : {0.3, -2.0}) CHECK(rel(product_pdf_halfint(three, z).value, product_pdf_general(three, z).value) < 1e-9);
}

TEST_CASE("dispatch coherence on symmetric half-integer specs")
{
    for (auto s : {laplace2(), ProductSpec({{0.5, 1, 0}, {1.5, 2, 0}}), ProductSpec({{2.5, 0.5, 0}, {0.5, 3, 0}, {1.5, 1, 0}})})
        for (double z : {0.01, 0.6, -2.0, 15.0}) {
            double a = product_pdf_symmetric(s, z).value;
            double b = product_pdf_halfint(s, z).value;
            double c = product_pdf_general(s, z).value;
            CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, a));
            CHECK(std::abs(a - c) <= 1e-9 * std::max(1.0, a));
            CHECK(product_pdf(s, z).value == b);
        }
}

TEST_CASE("literal j-series agrees with the contour path")
{
    ProductSpec s({{0.3, 1, 0.2}, {1.2, 1.5, -0.4}});
    for (double z : {0.9, -0.9}) {
        auto a = product_pdf_series(s, z, 1e-12);
        CHECK(a.converged);
        CHECK(rel(a.value, product_pdf_general(s, z).value) < 1e-9);
    }
    auto h = skew_halfint();
    CHECK(rel(product_pdf_series(h, 0.7).value, product_pdf_halfint(h, 0.7).value) < 1e-9);
}

TEST_CASE("density is positive and unimodal at the origin")
{
    SpecGen gen{2025};
    for (int k = 0; k < 5; ++k) {
        auto s = gen.spec(2 + k % 2);
        for (int side : {1, -1}) {
            double prev = inf_value();
            for (double z = 1e-6; z <= 10.0; z *= 1.5) {
                double v = product_pdf(s, side * z).value;
                REQUIRE(v > 0.0);
                CHECK(v < prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("symmetric CDF")
{
    for (auto s : {laplace2(), ProductSpec({{0, 1, 0}, {1, 2, 0}}), ProductSpec({{0.3, 1, 0}, {0.5, 2, 0}, {2, 0.5, 0}})}) {
        CHECK(product_cdf_symmetric(s, 0.0).value == 0.5);
        for (double z : {0.3, -0.3, 0.8, 1.5, -1.5}) {
            const double h = 1e-4;
            double fd = (product_cdf_symmetric(s, z + h, 1e-13).value - product_cdf_symmetric(s, z - h, 1e-13).value) / (2 * h);
            CHECK(rel(fd, product_pdf_symmetric(s, z).value) < 1e-5);
        }
        double far = std::pow(45.0, s.n()) / s.xi();
        CHECK(std::abs(product_cdf_symmetric(s, far).value - 1.0) < 1e-8);
        CHECK(product_cdf_symmetric(s, -far).value < 1e-8);
    }
    // finite half-integer form against quadrature of the density
    ProductSpec hs({{0.5, 1, 0}, {1.5, 2, 0}});
    for (double z : {0.2, 1.0, -3.0}) CHECK(std::abs(product_cdf_symmetric(hs, z).value - product_cdf_numeric(hs, z).value) < 1e-8);
}

TEST_CASE("numeric CDF")
{
    for (auto s : {skew_halfint(), skew_generic(), ProductSpec({{-0.25, 1, 0.5}, {0, 2, -1}})}) {
        auto c0 = product_cdf_numeric(s, 0.0, 1e-9);
        CHECK(c0.converged);
        CHECK(std::abs(c0.value - prob_nonpositive(s)) < 1e-7);
        CHECK(std::abs(product_cdf_numeric(s, 1.0).value + product_ccdf_numeric(s, 1.0).value - 1.0) < 1e-9);
        CHECK(product_cdf_numeric(s, -1e4).value < 1e-9);
        CHECK(product_cdf_numeric(s, 1e4).value > 1.0 - 1e-9);
    }
    ProductSpec sym({{0, 1, 0}, {1, 2, 0}});
    for (double z : {-4.0, -0.5, 0.05, 1.0, 6.0})
        CHECK(std::abs(product_cdf_numeric(sym, z).value - product_cdf_symmetric(sym, z).value) < 1e-7);
}

TEST_CASE("sign probability")
{
    ProductSpec two({{1, 2, 0.8}, {0.3, 1, -0.4}});
    double p1 = vg_prob_nonpositive(two[0]), p2 = vg_prob_nonpositive(two[1]);
    CHECK(std::abs(prob_nonpositive(two) - (p1 + p2 - 2 * p1 * p2)) < 1e-15);
    CHECK(prob_nonpositive(ProductSpec({{1, 2, 0}, {0.3, 1, 0}, {4, 1, 0}})) == 0.5);
    for (int N = 2; N <= 4; ++N) {
        ProductSpec s(std::vector<VgParams>(N, VgParams{1, 2, 0.8}));
        CHECK(std::abs(prob_nonpositive(s) - prob_nonpositive_identical(s)) < 1e-12);
    }
    CHECK_THROWS_AS(prob_nonpositive_identical(two), ValidationError);
}

TEST_CASE("characteristic functions")
{
    ProductSpec lap({{0.5, 2, 0}});
    CHECK(std::abs(product_cf_symmetric(lap, 1.0).value - 0.8) < 1e-12);
    CHECK(product_cf_symmetric(laplace2(), 0.0).value == 1.0);
    CHECK(product_cf_halfint(skew_halfint(), 0.0).value == 1.0);

    // asymmetric Laplace: gamma^2 / ((lambda- - it)(lambda+ + it))
    ProductSpec al({{0.5, 1.5, 0.6}});
    for (double t : {0.3, -2.0, 7.0}) {
        std::complex<double> it(0, t);
        auto exact = (1.5 * 1.5 - 0.36) / ((0.9 - it) * (2.1 + it));
        CHECK(std::abs(product_cf_halfint(al, t).value - exact) < 1e-11);
    }
    auto s = skew_halfint();
    for (double t : {0.1, 0.7, 2.0, 10.0}) {
        auto a = product_cf_halfint(s, t).value, b = product_cf_halfint(s, -t).value;
        CHECK(std::abs(a - std::conj(b)) < 1e-12);
        CHECK(std::abs(a) <= 1.0);
    }
    for (auto sym : {laplace2(), ProductSpec({{0.5, 1, 0}, {1.5, 2, 0}, {0.5, 0.5, 0}})})
        for (double t : {0.1, 0.7, 2.0, 10.0}) {
            auto a = product_cf_symmetric(sym, t).value;
            auto b = product_cf_halfint(sym, t).value;
            CHECK(std::abs(a - b) < 1e-9);
            CHECK(std::abs(b.imag()) < 1e-10);
        }
}

TEST_CASE("origin behaviour")
{
    // case (i) and case (ii) with a single minimal shape
    for (auto s : {ProductSpec({{0.5, 1, 0}, {1, 1, 0}}), ProductSpec({{-0.25, 1, 0}, {0.5, 1, 0}})}) {
        double r = product_pdf(s, 1e-8).value / pdf_origin_asymptotic(s, 1e-8);
        CHECK(r > 0.95);
        CHECK(r < 1.05);
    }
    // factor ordering does not matter
    ProductSpec ab({{1, 1.3, 0}, {0.5, 2, 0}}), ba({{0.5, 2, 0}, {1, 1.3, 0}});
    CHECK(pdf_origin_asymptotic(ab, 1e-5) == pdf_origin_asymptotic(ba, 1e-5));
    // the explicit N=2 displays
    double z = 1e-3, L = std::log(z);
    ProductSpec i0({{0.7, 1.2, 0}, {1.3, 0.8, 0}});
    double e0 = -std::pow(1.2, 2.4) * std::pow(0.8, 3.6) / (2 * pi * std::pow(1.2, 1.4) * std::pow(0.8, 2.6)) *
                std::tgamma(0.7) * std::tgamma(1.3) / (std::tgamma(1.2) * std::tgamma(1.8)) * L;
    CHECK(rel(pdf_origin_asymptotic(i0, z), e0) < 1e-12);
    ProductSpec zz({{0, 1.2, 0.3}, {0, 0.8, -0.1}});
    double g1 = std::sqrt(1.44 - 0.09), g2 = std::sqrt(0.64 - 0.01);
    CHECK(rel(pdf_origin_asymptotic(zz, z), -g1 * g2 / (3 * pi * pi) * L * L * L) < 1e-12);
    ProductSpec neg({{-0.2, 1.2, 0}, {0.9, 0.8, 0}});
    double e2 = std::pow(1.2, 0.6) * std::pow(0.8, 2.8) / (std::pow(2.0, 4 * -0.2 + 2) * pi * std::pow(0.8, 2 * 1.1)) *
                std::pow(std::tgamma(0.2), 2) * std::tgamma(1.1) / (std::tgamma(0.3) * std::tgamma(1.4)) * std::pow(z, -0.4);
    CHECK(rel(pdf_origin_asymptotic(neg, z), e2) < 1e-12);
    // repeated negative shape: |z|^{-1/2}(-2 ln|z|) times a constant
    ProductSpec dup({{-0.25, 1, 0}, {-0.25, 2, 0}});
    double k1 = pdf_origin_asymptotic(dup, 1e-4) / (std::pow(1e-4, -0.5) * (-2 * std::log(1e-4)));
    double k2 = pdf_origin_asymptotic(dup, 1e-9) / (std::pow(1e-9, -0.5) * (-2 * std::log(1e-9)));
    CHECK(rel(k1, k2) < 1e-12);
    // skewed non-minimal factors carry their fractional moment
    ProductSpec skew({{1, 1, 0.3}, {-0.25, 2, -0.5}, {2, 1, 0}});
    double r = product_pdf(skew, 1e-12).value / pdf_origin_asymptotic(skew, 1e-12);
    CHECK(std::abs(r - 1.0) < 1e-3);
    CHECK_THROWS_AS(pdf_origin_asymptotic(skew, 1.5), DomainError);
}

TEST_CASE("tail behaviour")
{
    ProductSpec lap({{0.5, 2, 0}});
    for (double z : {0.5, 3.0, 20.0}) {
        CHECK(rel(tail_asymptotic_cdf(lap, z, Side::upper), 0.5 * std::exp(-2 * z)) < 1e-12);
        CHECK(rel(tail_asymptotic_pdf(lap, z, Side::upper), std::exp(-2 * z)) < 1e-12);
        CHECK(rel(tail_asymptotic_cdf(lap, -z, Side::lower), 0.5 * std::exp(-2 * z)) < 1e-12);
    }
    CHECK_THROWS_AS(tail_asymptotic_cdf(lap, -1.0, Side::upper), DomainError);

    auto s = laplace2();
    double z = 625.0;
    CHECK(rel(tail_asymptotic_cdf(s, z, Side::upper, TailForm::symmetric),
              tail_asymptotic_cdf(s, z, Side::upper, TailForm::subset_sum)) < 1e-12);
    CHECK(rel(tail_asymptotic_pdf(s, z, Side::upper, TailForm::symmetric),
              tail_asymptotic_pdf(s, z, Side::upper, TailForm::subset_sum)) < 1e-12);
    double rc = product_ccdf_numeric(s, z, Tolerance{1e-300, 1e-9}).value / tail_asymptotic_cdf(s, z, Side::upper);
    CHECK(rc > 0.98);
    CHECK(rc < 1.02);
    double rp = product_pdf(s, 1e4).value / tail_asymptotic_pdf(s, 1e4, Side::upper);
    CHECK(std::abs(rp - 1.0) < 0.02);
    CHECK_THROWS_AS(tail_asymptotic_cdf(s, z, Side::upper, TailForm::dominant), DomainError);

    auto g = skew_generic();
    CHECK(std::abs(tail_asymptotic_cdf(g, 5000, Side::upper, TailForm::dominant) / tail_asymptotic_cdf(g, 5000, Side::upper) - 1) < 0.01);
    CHECK_THROWS_AS(tail_asymptotic_cdf(g, 5000, Side::upper, TailForm::symmetric), ValidationError);
    double rg = product_ccdf_numeric(g, 5000, Tolerance{1e-300, 1e-8}).value / tail_asymptotic_cdf(g, 5000, Side::upper);
    CHECK(std::abs(rg - 1.0) < 0.02);

    // lower side equals upper side of the mirrored law
    ProductSpec mirrored({{1, 1, -0.3}, {0.5, 2, -0.5}});
    ProductSpec flipped({{1, 1, 0.3}, {0.5, 2, -0.5}});
    CHECK(rel(tail_asymptotic_cdf(mirrored, -300, Side::lower), tail_asymptotic_cdf(flipped, 300, Side::upper)) < 1e-12);
    CHECK(rel(tail_asymptotic_pdf(mirrored, -300, Side::lower), tail_asymptotic_pdf(flipped, 300, Side::upper)) < 1e-12);
}

TEST_CASE("quantiles")
{
    ProductSpec lap({{0.5, 2, 0}});
    for (double p : {0.995, 0.9999}) {
        CHECK(rel(quantile_asymptotic(lap, p), -std::log1p(-p) / 2.0) < 1e-14);
        CHECK(rel(quantile_numeric(lap, p).value, -std::log(2 * (1 - p)) / 2.0) < 1e-8);
    }
    CHECK(quantile_asymptotic(skew_generic(), 1e-3) < 0.0);
    CHECK_THROWS_AS(quantile_asymptotic(lap, 1.0), DomainError);

    auto s = laplace2();
    CHECK(std::abs(quantile_numeric(s, 0.5).value) < 1e-10);
    double prev = inf_value();
    for (double e : {1e-4, 1e-5, 1e-6}) {
        double r = quantile_numeric(s, 1 - e).value / quantile_asymptotic(s, 1 - e);
        CHECK(std::abs(r - 1.0) < prev);
        prev = std::abs(r - 1.0);
    }
    CHECK(prev < 0.15);

    auto g = skew_generic();
    double last = -inf_value();
    for (double p : {0.01, 0.3, 0.5, 0.9}) {
        auto q = quantile_numeric(g, p, 1e-9);
        CHECK(q.converged);
        CHECK(std::abs(product_cdf_numeric(g, q.value, 1e-11).value - p) < 1e-8);
        CHECK(q.value > last);
        last = q.value;
    }
}
