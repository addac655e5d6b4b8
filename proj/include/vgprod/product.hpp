#pragma once

#include "vgprod/eval_result.hpp"
#include "vgprod/vg.hpp"

#include <complex>
#include <vector>

namespace vgprod {

inline constexpr int max_factors = 12;

// Z = X_1 ... X_N with independent X_i ~ VG(m_i, alpha_i, beta_i, 0).
class ProductSpec {
public:
    explicit ProductSpec(std::vector<VgParams> factors);

    int n() const { return static_cast<int>(factors_.size()); }
    const std::vector<VgParams>& factors() const { return factors_; }
    const VgParams& operator[](int i) const { return factors_[i]; }

    double xi() const { return xi_; }
    double log_eta() const { return log_eta_; }
    double eta() const;
    double mu_n() const { return mu_n_; }

    bool symmetric() const;
    bool half_integer() const;
    bool identical() const;

private:
    std::vector<VgParams> factors_;
    double xi_ = 1.0;
    double log_eta_ = 0.0;
    double mu_n_ = 0.0;
};

// Subset sigma of {0..N-1}: the factors taken on their negative half-line.
struct SignedSubset {
    unsigned members = 0;

    bool contains(int i) const { return (members >> i) & 1u; }
    int size() const;
    bool odd() const { return size() % 2 == 1; }
};

struct SubsetWeight {
    SignedSubset subset;
    double omega = 0.0;
};

double omega(const ProductSpec& spec, SignedSubset s);

// Even subsets for sign > 0, odd subsets for sign < 0.
std::vector<SubsetWeight> subset_weights(const ProductSpec& spec, int sign);

int subset_coefficient(const std::vector<int>& j, int sign);
int subset_coefficient_enumerated(const std::vector<int>& j, int sign);

EvalResult product_pdf(const ProductSpec& spec, double z, Tolerance tol);
EvalResult product_pdf_general(const ProductSpec& spec, double z, Tolerance tol);
EvalResult product_pdf_series(const ProductSpec& spec, double z, Tolerance tol);
EvalResult product_pdf_symmetric(const ProductSpec& spec, double z, Tolerance tol);
EvalResult product_pdf_halfint(const ProductSpec& spec, double z, Tolerance tol);

EvalResult product_cdf_symmetric(const ProductSpec& spec, double z, Tolerance tol);
EvalResult product_cdf_numeric(const ProductSpec& spec, double z, Tolerance tol);
// P(Z > z), accurate deep in the upper tail.
EvalResult product_ccdf_numeric(const ProductSpec& spec, double z, Tolerance tol);

// product_cdf_numeric on an ascending grid: tail masses at the two ends, then the density
// integrated cell by cell towards zero.
std::vector<EvalResult> product_cdf_table(const ProductSpec& spec, const std::vector<double>& grid, Tolerance tol);

double prob_nonpositive(const ProductSpec& spec);
// The shortcut for identical factors; throws ValidationError otherwise.
double prob_nonpositive_identical(const ProductSpec& spec);

ComplexEvalResult product_cf_symmetric(const ProductSpec& spec, double t, Tolerance tol);
ComplexEvalResult product_cf_halfint(const ProductSpec& spec, double t, Tolerance tol);

#define VGPROD_PLAIN_TOL(name, R)                                                                                      \
    inline R name(const ProductSpec& spec, double z, double tol = 1e-10) { return name(spec, z, Tolerance::mixed(tol)); }
VGPROD_PLAIN_TOL(product_pdf, EvalResult)
VGPROD_PLAIN_TOL(product_pdf_general, EvalResult)
VGPROD_PLAIN_TOL(product_pdf_series, EvalResult)
VGPROD_PLAIN_TOL(product_pdf_symmetric, EvalResult)
VGPROD_PLAIN_TOL(product_pdf_halfint, EvalResult)
VGPROD_PLAIN_TOL(product_cdf_symmetric, EvalResult)
VGPROD_PLAIN_TOL(product_cdf_numeric, EvalResult)
VGPROD_PLAIN_TOL(product_ccdf_numeric, EvalResult)
VGPROD_PLAIN_TOL(product_cf_symmetric, ComplexEvalResult)
VGPROD_PLAIN_TOL(product_cf_halfint, ComplexEvalResult)
#undef VGPROD_PLAIN_TOL

// Leading behaviour as z -> 0; requires 0 < |z| < 1.
double pdf_origin_asymptotic(const ProductSpec& spec, double z);

enum class Side { upper, lower };
enum class TailForm { automatic, subset_sum, symmetric, dominant };

// Upper: P(Z > z) for z > 0. Lower: P(Z <= z) for z < 0.
// Meaningful once (omega |z|)^(1/N) exceeds about 10.
double tail_asymptotic_cdf(const ProductSpec& spec, double z, Side side, TailForm form = TailForm::automatic);
double tail_asymptotic_pdf(const ProductSpec& spec, double z, Side side, TailForm form = TailForm::automatic);

// Leading quantile for p -> 1 (p >= 1/2) or p -> 0 (p < 1/2); intended for p > 0.99 or p < 0.01.
double quantile_asymptotic(const ProductSpec& spec, double p);
EvalResult quantile_numeric(const ProductSpec& spec, double p, double tol = 1e-10);

} // namespace vgprod
