#pragma once

#include "vgprod/eval_result.hpp"
#include "vgprod/product.hpp"
#include "vgprod/vg.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace vgprod {

// AL(alpha, beta) = VG(1/2, alpha, beta, 0); beta = 0 is Laplace(alpha).
struct AlFactor {
    double alpha = 1.0;
    double beta = 0.0;
};

class LaplaceProductSpec {
public:
    explicit LaplaceProductSpec(std::vector<AlFactor> factors);

    int n() const { return static_cast<int>(factors_.size()); }
    const std::vector<AlFactor>& factors() const { return factors_; }
    const ProductSpec& product() const { return product_; }

private:
    std::vector<AlFactor> factors_;
    ProductSpec product_;
};

EvalResult al_product_pdf(const LaplaceProductSpec& spec, double z, Tolerance tol);
EvalResult al_product_cdf(const LaplaceProductSpec& spec, double z, Tolerance tol);
ComplexEvalResult al_product_cf(const LaplaceProductSpec& spec, double t, Tolerance tol);

// Reduced forms for every beta = 0.
EvalResult laplace_product_pdf(const LaplaceProductSpec& spec, double z, Tolerance tol);
EvalResult laplace_product_cdf(const LaplaceProductSpec& spec, double z, Tolerance tol);
ComplexEvalResult laplace_product_cf(const LaplaceProductSpec& spec, double t, Tolerance tol);

// Product of 2M normals N(0, sigma_i^2) and N Laplace(alpha_j) variables.
class MixedNormalLaplaceSpec {
public:
    MixedNormalLaplaceSpec(std::vector<double> sigmas, std::vector<double> alphas);

    int normal_pairs() const { return static_cast<int>(sigmas_.size() / 2); }
    int laplace_count() const { return static_cast<int>(alphas_.size()); }
    const std::vector<double>& sigmas() const { return sigmas_; }
    const std::vector<double>& alphas() const { return alphas_; }
    double nu() const { return nu_; }
    // One m = 0 factor per normal pair, then one m = 1/2 factor per Laplace.
    const ProductSpec& product() const { return product_; }

private:
    std::vector<double> sigmas_;
    std::vector<double> alphas_;
    double nu_ = 1.0;
    ProductSpec product_;
};

EvalResult mixed_product_pdf(const MixedNormalLaplaceSpec& spec, double z, Tolerance tol);
EvalResult mixed_product_cdf(const MixedNormalLaplaceSpec& spec, double z, Tolerance tol);
ComplexEvalResult mixed_product_cf(const MixedNormalLaplaceSpec& spec, double t, Tolerance tol);

struct NormalBlock {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
};

// Product of 2N jointly normal variables with a block-diagonal covariance.
class CorrelatedNormalSpec {
public:
    explicit CorrelatedNormalSpec(std::vector<NormalBlock> blocks);

    int n() const { return static_cast<int>(blocks_.size()); }
    const std::vector<NormalBlock>& blocks() const { return blocks_; }
    double s() const { return s_; }
    double tau() const { return tau_; }
    // Block i becomes VG(0, 1/(s_i (1 - rho_i^2)), rho_i/(s_i (1 - rho_i^2)), 0).
    const ProductSpec& product() const { return product_; }

private:
    std::vector<NormalBlock> blocks_;
    double s_ = 1.0;
    double tau_ = 1.0;
    ProductSpec product_;
};

VgParams normal_pair_factor(const NormalBlock& block);

EvalResult correlated_normal_product_pdf(const CorrelatedNormalSpec& spec, double z, Tolerance tol);

// Density of a product of independent N(0, sigma_i^2) variables, any count.
EvalResult independent_normal_product_pdf(const std::vector<double>& sigmas, double z, Tolerance tol);

// Block i draws from mt19937_64 seeded with seed ^ splitmix64(i).
SampleBatch correlated_normal_sample(const CorrelatedNormalSpec& spec, std::size_t n, std::uint64_t seed);
// Normal i uses sub-seed index i, Laplace j uses index 2M + j.
SampleBatch mixed_product_sample(const MixedNormalLaplaceSpec& spec, std::size_t n, std::uint64_t seed);

} // namespace vgprod
