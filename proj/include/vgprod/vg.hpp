#pragma once

#include "vgprod/eval_result.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace vgprod {

// VG(m, alpha, beta, 0).
struct VgParams {
    double m = 0.5;
    double alpha = 1.0;
    double beta = 0.0;

    double gamma2() const { return alpha * alpha - beta * beta; }
    double gamma() const;
    double lambda_plus() const { return alpha + beta; }
    double lambda_minus() const { return alpha - beta; }
};

// Throws ValidationError naming the violated condition.
void validate(const VgParams& p);

struct SampleBatch {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string spec_digest;

    std::size_t n() const { return values.size(); }
};

std::uint64_t splitmix64(std::uint64_t x);

double vg_pdf(const VgParams& p, double x);
double vg_log_pdf(const VgParams& p, double x);

// P(X <= x) by quadrature of the density.
EvalResult vg_cdf(const VgParams& p, double x, double tol = 1e-10);

double vg_prob_nonpositive(const VgParams& p);

// Integral of x^s f(x) over x > 0, and of x^s f(-x) over x > 0.
std::complex<double> vg_mellin_pos(const VgParams& p, std::complex<double> s, int terms = 500);
std::complex<double> vg_mellin_neg(const VgParams& p, std::complex<double> s, int terms = 500);

std::string digest(const std::vector<VgParams>& factors);

// X = beta W + sqrt(W) Z, W ~ Gamma(m + 1/2, rate gamma^2 / 2), Z ~ N(0, 1).
SampleBatch vg_sample(const VgParams& p, std::size_t n, std::uint64_t seed);

} // namespace vgprod
