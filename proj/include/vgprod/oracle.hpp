#pragma once

// Brute-force checks that share no Meijer G code with the closed forms.

#include "vgprod/eval_result.hpp"
#include "vgprod/product.hpp"
#include "vgprod/vg.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace vgprod::oracle {

// Twelve specs: N in {2, 3}, m from {-0.25, 0, 1/2, 2}, beta/alpha from {0, 0.5, -0.5}.
std::vector<ProductSpec> invariant_grid();

// f_Z(z) = int f_1(x) f_rest(z/x) dx/|x| for N in {2, 3}, from vg_pdf alone.
// Throws ConvergenceError when the quadrature error estimate is gross.
double convolution_pdf(const ProductSpec& spec, double z, double tol = 1e-10);

// Factor i is vg_sample(spec[i], n, seed ^ splitmix64(i)); the batch is their product.
SampleBatch mc_product_sample(const ProductSpec& spec, std::size_t n, std::uint64_t seed);

// Exact sup |F_n - F|, one cdf call per sample.
double ks_statistic(const SampleBatch& batch, const std::function<double(double)>& cdf);

struct KsBounds {
    double lower = 0.0;
    double upper = 1.0;
};

// Bounds on sup |F_n - F| from cdf values on an ascending grid, using only that F is monotone.
// cdf_err is added to both sides.
KsBounds ks_statistic_grid(const SampleBatch& batch, const std::vector<double>& grid, const std::vector<double>& cdf,
                           double cdf_err = 0.0);

// Empirical quantiles at (k + 1/2)/cells: a grid with about 1/cells mass per cell.
std::vector<double> ks_grid(const SampleBatch& batch, std::size_t cells);

enum class PdfSource { formula, convolution };

// Fixed quadrature rule for int e^{itz} f(z) dz, valid for |t| <= t_max.
// The density is tabulated once; each t costs one weighted sum.
class CfTable {
public:
    CfTable(const ProductSpec& spec, double t_max, double tol = 1e-8, PdfSource source = PdfSource::formula);

    std::complex<double> operator()(double t) const;
    std::size_t nodes() const { return x_.size(); }

private:
    double t_max_;
    std::vector<double> x_;
    std::vector<double> wf_;
};

std::complex<double> cf_fourier(const ProductSpec& spec, double t, double tol = 1e-8,
                                PdfSource source = PdfSource::formula);

} // namespace vgprod::oracle
