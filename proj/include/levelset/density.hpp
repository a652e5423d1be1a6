#pragma once

#include "levelset/dataset.hpp"
#include "levelset/grid.hpp"
#include "levelset/kernel.hpp"
#include "levelset/rng.hpp"

#include <memory>
#include <span>
#include <vector>

namespace levelset {

/// The three bandwidth vectors of the pipeline, in data units.
/// h: estimation, l: bias-correction second derivatives, g: smoothed
/// bootstrap resampling.
struct Bandwidths {
    std::vector<double> h;
    std::vector<double> l;
    std::vector<double> g;
};

enum class EstimatorKind { plain, bias_corrected, bootstrap_mean };

/// Kernel density estimator over a fixed dataset with a per-axis bandwidth
/// vector. Immutable after fit; evaluation from many threads is safe.
///
/// plain           f̂(x)      = (1/(n·∏h_j)) Σ_i K((X_i - x) ⊘ h)
/// bias_corrected  f̂^bc(x)   = f̂(x) - β̂(x),
///                 β̂(x)      = ½·μ₂(K)·Σ_j h_j²·∂²_j f̂_l(x)
/// bootstrap_mean  f̂^{*,E}(x) = (1/n) Σ_i ∏_j (k_{h_j} ⋆ k_{g_j})(x_j - X_ij),
///                 the exact conditional expectation E* f̂* of a smoothed
///                 bootstrap estimate; no resampling involved.
///
/// Point evaluation prunes the sum to data points whose kernel box contains
/// x via a per-axis sorted index; eval_brute keeps the O(n) full sum as an
/// independent oracle path.
class DensityEstimator {
public:
    static DensityEstimator fit_plain(std::shared_ptr<const Dataset> data,
                                      const KernelSpec& kernel,
                                      std::vector<double> h);
    static DensityEstimator fit_bias_corrected(
        std::shared_ptr<const Dataset> data, const KernelSpec& kernel,
        std::vector<double> h, std::vector<double> l);
    static DensityEstimator fit_bootstrap_mean(
        std::shared_ptr<const Dataset> data, const KernelSpec& kernel,
        std::vector<double> h, std::vector<double> g);

    EstimatorKind kind() const { return kind_; }
    int dim() const { return data_->dim; }
    std::size_t sample_size() const { return data_->n; }
    const Dataset& dataset() const { return *data_; }
    const std::shared_ptr<const Dataset>& dataset_ptr() const { return data_; }
    const KernelSpec& kernel() const { return kernel_; }
    const std::vector<double>& bandwidth() const { return h_; }
    const std::vector<double>& bias_bandwidth() const { return l_; }
    const std::vector<double>& resample_bandwidth() const { return g_; }

    double eval(std::span<const double> x) const;
    void eval_grad(std::span<const double> x, std::span<double> out) const;
    /// Row-major d×d matrix of second partials.
    void eval_hessian(std::span<const double> x, std::span<double> out) const;

    /// Fused value + gradient in one pass over the pruned neighbor set
    /// (plain and bias_corrected kinds; the flow hot path).
    void value_and_grad(std::span<const double> x, double& value,
                        std::span<double> grad) const;

    /// Full-sum evaluation without neighbor pruning (oracle path).
    double eval_brute(std::span<const double> x) const;

    /// Node values over the grid (row-parallel, deterministic for any
    /// thread count). Grid dim must match the estimator dim.
    std::vector<double> eval_on_grid(const GridSpec& grid,
                                     unsigned threads = 1) const;

private:
    DensityEstimator() = default;

    /// Σ_i ∏_j k^(orders_j)((X_ij - x_j)/h_j) · (-1/h_j)^{orders_j} / (n ∏h_j)
    double partial(std::span<const double> x, std::span<const int> orders,
                   bool brute) const;
    double mean_eval(std::span<const double> x) const;

    std::shared_ptr<const Dataset> data_;
    KernelSpec kernel_{1, Polynomial{{0.75, 0.0, -0.75}}}; // placeholder until fit
    EstimatorKind kind_ = EstimatorKind::plain;
    std::vector<double> h_, l_, g_;
    std::vector<double> support_; // per-axis pruning radius
    // prune index: points sorted by coordinate along each axis
    std::vector<std::vector<std::uint32_t>> order_;
    std::vector<std::vector<double>> sorted_coord_;
    std::vector<Tabulated1D> conv_;              // bootstrap_mean only
    std::unique_ptr<DensityEstimator> inner_;    // f̂_l for bias correction
    double mu2_ = 0.0;

    friend double bias_term(const Dataset&, const KernelSpec&,
                            std::span<const double>, std::span<const double>,
                            std::span<const double>);
};

/// β̂(x) = ½·μ₂(K)·Σ_j h_j²·∂²_j f̂_l(x), the plug-in estimate of the leading
/// kernel bias (per-axis h_j² generalization of the scalar-h formula).
double bias_term(const Dataset& data, const KernelSpec& kernel,
                 std::span<const double> h, std::span<const double> l,
                 std::span<const double> x);

/// Exact bootstrap mean f̂^{*,E}(x); see DensityEstimator::fit_bootstrap_mean.
double bootstrap_mean_eval(const Dataset& data, const KernelSpec& kernel,
                           std::span<const double> h, std::span<const double> g,
                           std::span<const double> x);

/// `count` draws from the smoothed density f̂_g: a uniformly chosen data
/// point plus g ⊙ ε with ε i.i.d. per axis from the kernel profile
/// (inverse-CDF table). Deterministic given the RNG state.
Dataset sample_smoothed(const Dataset& data, const KernelSpec& kernel,
                        std::span<const double> g, std::size_t count, Rng& rng);

/// As above with a caller-provided sampler table (bootstrap engines build
/// the table once per run).
Dataset sample_smoothed(const Dataset& data, const ProfileSampler& sampler,
                        std::span<const double> g, std::size_t count, Rng& rng);

} // namespace levelset
