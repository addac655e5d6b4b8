#include "vgprod/special_cases.hpp"

#include "vgprod/errors.hpp"
#include "vgprod/meijer.hpp"
#include "vgprod/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace vgprod {

namespace {

using cplx = std::complex<double>;
using meijer::MeijerGSpec;
using specfun::pi;

constexpr double ln2 = 0.693147180559945309417232121458176568;

void require_nonzero(double z)
{
    if (z == 0.0) throw PoleError("the product density is evaluated only at z != 0");
}

Tolerance share(Tolerance tol, double weight, double count = 1.0)
{
    return {tol.abs / (weight * count), tol.rel};
}

void require_positive(const std::vector<double>& v, const char* what)
{
    for (double x : v)
        if (!std::isfinite(x) || !(x > 0.0)) throw ValidationError(std::string(what) + " must be positive and finite");
}

std::vector<VgParams> al_factors(const std::vector<AlFactor>& f)
{
    if (f.empty()) throw ValidationError("a product needs N >= 1 factors");
    std::vector<VgParams> out;
    for (const auto& a : f) out.push_back({0.5, a.alpha, a.beta});
    return out;
}

std::vector<VgParams> mixed_factors(const std::vector<double>& sigmas, const std::vector<double>& alphas)
{
    if (sigmas.size() % 2 != 0) throw ValidationError("a mixed product needs an even number of normal factors");
    if (sigmas.empty() && alphas.empty()) throw ValidationError("a product needs N >= 1 factors");
    require_positive(sigmas, "normal standard deviations");
    require_positive(alphas, "Laplace scales");
    std::vector<VgParams> out;
    for (std::size_t i = 0; i < sigmas.size(); i += 2) out.push_back({0.0, 1.0 / (sigmas[i] * sigmas[i + 1]), 0.0});
    for (double a : alphas) out.push_back({0.5, a, 0.0});
    return out;
}

std::vector<VgParams> block_factors(const std::vector<NormalBlock>& blocks)
{
    if (blocks.empty()) throw ValidationError("a product needs N >= 1 factors");
    std::vector<VgParams> out;
    for (const auto& b : blocks) out.push_back(normal_pair_factor(b));
    return out;
}

double log_gamma2_sum(const ProductSpec& spec)
{
    double s = 0.0;
    for (const auto& p : spec.factors()) s += std::log(p.gamma2());
    return s;
}

// 1 - G^{N,1}_{1,N+1}(x | 1; 1,...,1, 0): the mass of G^{N,0}_{0,N}(u | 0,...,0) beyond x.
EvalResult laplace_kernel_tail(int N, double x, Tolerance tol)
{
    MeijerGSpec g{N, 1, {1.0}, std::vector<double>(N, 1.0)};
    g.b.push_back(0.0);
    auto r = meijer::eval_g_cdf_class(g, x, tol);
    return {1.0 - r.value, r.abs_err, r.converged};
}

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t index) { return std::mt19937_64(seed ^ splitmix64(index)); }

} // namespace

// ---- asymmetric Laplace ----

LaplaceProductSpec::LaplaceProductSpec(std::vector<AlFactor> factors)
    : factors_(std::move(factors)), product_(al_factors(factors_))
{
}

EvalResult al_product_pdf(const LaplaceProductSpec& spec, double z, Tolerance tol)
{
    require_nonzero(z);
    const auto& ps = spec.product();
    const int N = ps.n();
    const double c = std::exp(log_gamma2_sum(ps) - N * ln2 - std::log(ps.xi()));
    auto subsets = subset_weights(ps, z > 0.0 ? 1 : -1);
    const auto g = meijer::make_q0(std::vector<double>(N, 0.0));
    EvalResult out;
    out.converged = true;
    for (const auto& s : subsets) {
        auto r = meijer::eval_g_q0(g, s.omega * std::abs(z), share(tol, c, subsets.size()));
        out.value += c * r.value;
        out.abs_err += c * r.abs_err;
        out.converged = out.converged && r.converged;
    }
    return out;
}

EvalResult al_product_cdf(const LaplaceProductSpec& spec, double z, Tolerance tol)
{
    require_nonzero(z);
    const auto& ps = spec.product();
    const int N = ps.n();
    const double c = std::exp(log_gamma2_sum(ps) - N * ln2 - std::log(ps.xi()));
    const int sign = z > 0.0 ? 1 : -1;
    auto subsets = subset_weights(ps, sign);
    EvalResult out;
    out.converged = true;
    double mass = 0.0;
    for (const auto& s : subsets) {
        double w = c / s.omega;
        auto r = laplace_kernel_tail(N, s.omega * std::abs(z), share(tol, w, subsets.size()));
        mass += w * r.value;
        out.abs_err += w * r.abs_err;
        out.converged = out.converged && r.converged;
    }
    out.value = sign > 0 ? 1.0 - mass : mass;
    return out;
}

ComplexEvalResult al_product_cf(const LaplaceProductSpec& spec, double t, Tolerance tol)
{
    if (t == 0.0) return {1.0, 0.0, true};
    const auto& ps = spec.product();
    const int N = ps.n();
    const double c = std::exp(log_gamma2_sum(ps) - N * ln2 - std::log(ps.xi()));
    const double scale = c / std::abs(t);
    const MeijerGSpec g{N, 1, {0.0}, std::vector<double>(N, 0.0)};
    ComplexEvalResult out;
    out.converged = true;
    cplx sum = 0.0;
    const double count = static_cast<double>(1u << N);
    for (int sign : {1, -1})
        for (const auto& s : subset_weights(ps, sign)) {
            auto r = meijer::eval_g_cf_class(g, cplx(0.0, sign * s.omega / t), share(tol, scale, count));
            sum += static_cast<double>(sign) * r.value;
            out.abs_err += scale * r.abs_err;
            out.converged = out.converged && r.converged;
        }
    out.value = cplx(0.0, c / t) * sum;
    return out;
}

// ---- Laplace ----

EvalResult laplace_product_pdf(const LaplaceProductSpec& spec, double z, Tolerance tol)
{
    const auto& ps = spec.product();
    if (!ps.symmetric()) throw ValidationError("the Laplace forms need every beta = 0");
    require_nonzero(z);
    const double xi = ps.xi();
    auto r = meijer::eval_g_q0(meijer::make_q0(std::vector<double>(ps.n(), 0.0)), xi * std::abs(z),
                               share(tol, 0.5 * xi));
    return {0.5 * xi * r.value, 0.5 * xi * r.abs_err, r.converged};
}

EvalResult laplace_product_cdf(const LaplaceProductSpec& spec, double z, Tolerance tol)
{
    const auto& ps = spec.product();
    if (!ps.symmetric()) throw ValidationError("the Laplace forms need every beta = 0");
    if (z == 0.0) return {0.5, 0.0, true};
    const int N = ps.n();
    MeijerGSpec g{N, 1, {1.0}, std::vector<double>(N, 1.0)};
    g.b.push_back(0.0);
    auto r = meijer::eval_g_cdf_class(g, ps.xi() * std::abs(z), share(tol, 0.5));
    return {0.5 + std::copysign(0.5, z) * r.value, 0.5 * r.abs_err, r.converged};
}

ComplexEvalResult laplace_product_cf(const LaplaceProductSpec& spec, double t, Tolerance tol)
{
    const auto& ps = spec.product();
    if (!ps.symmetric()) throw ValidationError("the Laplace forms need every beta = 0");
    if (t == 0.0) return {1.0, 0.0, true};
    const int N = ps.n();
    MeijerGSpec g{2 * N - 1, 1, {0.5}, std::vector<double>(N - 1, 0.0)};
    g.b.insert(g.b.end(), N, 0.5);
    const double xi = ps.xi();
    const double scale = xi / (std::exp((N - 1.0) * (ln2 + 0.5 * std::log(pi))) * std::abs(t));
    const double x = xi * xi / (std::exp(2.0 * (N - 1.0) * ln2) * t * t);
    auto r = meijer::eval_g_cf_class(g, cplx(x, 0.0), share(tol, scale));
    return {cplx(scale * r.value.real(), 0.0), scale * r.abs_err, r.converged};
}

// ---- normal and Laplace ----

MixedNormalLaplaceSpec::MixedNormalLaplaceSpec(std::vector<double> sigmas, std::vector<double> alphas)
    : sigmas_(std::move(sigmas)), alphas_(std::move(alphas)), product_(mixed_factors(sigmas_, alphas_))
{
    double log_nu = 0.0;
    for (double s : sigmas_) log_nu -= std::log(s);
    for (double a : alphas_) log_nu += std::log(a);
    nu_ = std::exp(log_nu);
}

namespace {

// nu^2 z^2 / 4^K with K = M + N
double mixed_arg(const MixedNormalLaplaceSpec& spec, double z, int K)
{
    return std::exp(2.0 * (std::log(spec.nu()) + std::log(std::abs(z)) - K * ln2));
}

} // namespace

EvalResult mixed_product_pdf(const MixedNormalLaplaceSpec& spec, double z, Tolerance tol)
{
    require_nonzero(z);
    const int M = spec.normal_pairs(), N = spec.laplace_count(), K = M + N;
    std::vector<double> b(2 * M + N, 0.0);
    b.insert(b.end(), N, 0.5);
    const double scale = spec.nu() / std::exp(K * ln2 + (M + 0.5 * N) * std::log(pi));
    auto r = meijer::eval_g_q0(meijer::make_q0(b), mixed_arg(spec, z, K), share(tol, scale));
    return {scale * r.value, scale * r.abs_err, r.converged};
}

EvalResult mixed_product_cdf(const MixedNormalLaplaceSpec& spec, double z, Tolerance tol)
{
    if (z == 0.0) return {0.5, 0.0, true};
    const int M = spec.normal_pairs(), N = spec.laplace_count(), K = M + N;
    MeijerGSpec g{2 * K, 1, {0.5}, std::vector<double>(2 * M + N, 0.0)};
    g.b.insert(g.b.end(), N, 0.5);
    g.b.push_back(-0.5);
    const double scale = spec.nu() * std::abs(z) / std::exp((K + 1) * ln2 + (M + 0.5 * N) * std::log(pi));
    auto r = meijer::eval_g_cdf_class(g, mixed_arg(spec, z, K), share(tol, scale));
    return {0.5 + std::copysign(scale, z) * r.value, scale * r.abs_err, r.converged};
}

ComplexEvalResult mixed_product_cf(const MixedNormalLaplaceSpec& spec, double t, Tolerance tol)
{
    if (t == 0.0) return {1.0, 0.0, true};
    const int M = spec.normal_pairs(), N = spec.laplace_count(), K = M + N;
    MeijerGSpec g{2 * K - 1, 1, {0.5}, std::vector<double>(2 * M + N - 1, 0.0)};
    g.b.insert(g.b.end(), N, 0.5);
    const double scale =
        spec.nu() / (std::exp((K - 1) * ln2 + (M + 0.5 * (N - 1)) * std::log(pi)) * std::abs(t));
    const double x = std::exp(2.0 * (std::log(spec.nu()) - (K - 1) * ln2 - std::log(std::abs(t))));
    auto r = meijer::eval_g_cf_class(g, cplx(x, 0.0), share(tol, scale));
    return {cplx(scale * r.value.real(), 0.0), scale * r.abs_err, r.converged};
}

SampleBatch mixed_product_sample(const MixedNormalLaplaceSpec& spec, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw ValidationError("sample size must be at least 1");
    SampleBatch out;
    out.seed = seed;
    out.spec_digest = digest(spec.product().factors());
    out.values.assign(n, 1.0);
    std::uint64_t index = 0;
    for (double s : spec.sigmas()) {
        auto rng = block_rng(seed, index++);
        std::normal_distribution<double> normal(0.0, s);
        for (auto& v : out.values) v *= normal(rng);
    }
    for (double a : spec.alphas()) {
        auto rng = block_rng(seed, index++);
        std::exponential_distribution<double> expo(a);
        std::bernoulli_distribution coin;
        for (auto& v : out.values) v *= coin(rng) ? expo(rng) : -expo(rng);
    }
    return out;
}

// ---- correlated normals ----

VgParams normal_pair_factor(const NormalBlock& b)
{
    if (!std::isfinite(b.sigma1) || !std::isfinite(b.sigma2) || !(b.sigma1 > 0.0) || !(b.sigma2 > 0.0))
        throw ValidationError("normal standard deviations must be positive and finite");
    if (!std::isfinite(b.rho) || !(std::abs(b.rho) < 1.0))
        throw ValidationError("correlations must satisfy -1 < rho < 1, got rho = " + std::to_string(b.rho));
    double d = b.sigma1 * b.sigma2 * (1.0 - b.rho * b.rho);
    return {0.0, 1.0 / d, b.rho / d};
}

CorrelatedNormalSpec::CorrelatedNormalSpec(std::vector<NormalBlock> blocks)
    : blocks_(std::move(blocks)), product_(block_factors(blocks_))
{
    for (const auto& b : blocks_) {
        s_ *= b.sigma1 * b.sigma2;
        tau_ *= 1.0 - b.rho * b.rho;
    }
}

EvalResult correlated_normal_product_pdf(const CorrelatedNormalSpec& spec, double z, Tolerance tol)
{
    require_nonzero(z);
    const int N = spec.n();
    const int sign = z > 0.0 ? 1 : -1;
    const double log_s = std::log(spec.s()), log_tau = std::log(spec.tau());
    const double log_x = 2.0 * (std::log(std::abs(z)) - N * ln2 - log_s - log_tau);
    const double x = std::exp(log_x);
    const double log_pref = -(2.0 * N - 1.0) * ln2 - N * std::log(pi) - log_s - 0.5 * log_tau;

    std::map<std::vector<int>, EvalResult> cache;
    EvalResult out;
    int quiet = 0;
    constexpr int max_shell = 400;
    for (int J = 0; J <= max_shell && quiet < 2; ++J) {
        double shell = 0.0, shell_err = 0.0;
        bool any = false;
        // compositions of J, odometer over 0..J with the sum filtered
        std::vector<int> j(N, 0);
        for (;;) {
            if (std::accumulate(j.begin(), j.end(), 0) == J) {
                int a = subset_coefficient(j, sign);
                double lw = log_pref, sg = a;
                bool zero = a == 0;
                for (int i = 0; i < N && !zero; ++i) {
                    if (j[i] == 0) continue;
                    double rho = spec.blocks()[i].rho;
                    if (rho == 0.0) {
                        zero = true;
                        break;
                    }
                    lw += j[i] * std::log(2.0 * std::abs(rho)) - std::lgamma(j[i] + 1.0);
                    if (rho < 0.0 && j[i] % 2 != 0) sg = -sg;
                }
                if (!zero) {
                    any = true;
                    // G(x | b + c) = x^c G(x | b): key on the sorted offsets above the smallest index
                    std::vector<int> key(j);
                    std::sort(key.begin(), key.end());
                    const int low = key.front();
                    for (int& k : key) k -= low;
                    auto it = cache.find(key);
                    if (it == cache.end()) {
                        std::vector<double> b(2 * N);
                        for (int i = 0; i < N; ++i) b[i] = b[N + i] = 0.5 * key[i];
                        it = cache.emplace(key, meijer::eval_g_q0(meijer::make_q0(b), x, Tolerance{1e-300, tol.rel * 1e-2}))
                                 .first;
                    }
                    double w = std::exp(lw + 0.5 * low * log_x);
                    shell += sg * w * it->second.value;
                    shell_err += std::abs(a) * w * it->second.abs_err;
                }
            }
            int i = 0;
            while (i < N && j[i] == J) j[i++] = 0;
            if (i == N) break;
            ++j[i];
        }
        out.value += shell;
        out.abs_err += shell_err;
        if (!any) continue;
        quiet = std::abs(shell) < 0.1 * std::max(tol.abs, tol.rel * std::abs(out.value)) ? quiet + 1 : 0;
    }
    out.converged = quiet >= 2;
    return out;
}

EvalResult independent_normal_product_pdf(const std::vector<double>& sigmas, double z, Tolerance tol)
{
    if (sigmas.empty()) throw ValidationError("a product needs N >= 1 factors");
    require_positive(sigmas, "normal standard deviations");
    require_nonzero(z);
    const int n = static_cast<int>(sigmas.size());
    double log_s = 0.0;
    for (double s : sigmas) log_s += std::log(s);
    const double scale = std::exp(-0.5 * n * std::log(2.0 * pi) - log_s);
    const double x = std::exp(2.0 * std::log(std::abs(z)) - n * ln2 - 2.0 * log_s);
    auto r = meijer::eval_g_q0(meijer::make_q0(std::vector<double>(n, 0.0)), x, share(tol, scale));
    return {scale * r.value, scale * r.abs_err, r.converged};
}

SampleBatch correlated_normal_sample(const CorrelatedNormalSpec& spec, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw ValidationError("sample size must be at least 1");
    SampleBatch out;
    out.seed = seed;
    out.spec_digest = digest(spec.product().factors());
    out.values.assign(n, 1.0);
    for (int i = 0; i < spec.n(); ++i) {
        const auto& b = spec.blocks()[i];
        // 2x2 Cholesky factor of the block covariance
        const double l21 = b.rho * b.sigma2, l22 = std::sqrt(1.0 - b.rho * b.rho) * b.sigma2;
        auto rng = block_rng(seed, static_cast<std::uint64_t>(i));
        std::normal_distribution<double> normal;
        for (auto& v : out.values) {
            double u = normal(rng), w = normal(rng);
            v *= (b.sigma1 * u) * (l21 * u + l22 * w);
        }
    }
    return out;
}

} // namespace vgprod
