#pragma once

#include "levelset/density.hpp"
#include "levelset/flow.hpp"
#include "levelset/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace levelset {

enum class BootstrapStatistic {
    sup_vs_fg,                 ///< sup over M̂ of |f̂* - f̂_g|          → ĉ*
    sup_vs_mean_E,             ///< sup over M̂ of |f̂* - f̂^{*,E}|      → ĉ^{*,E}
    curve_displacement_E,      ///< sup over M̂^{*,E} of ‖X̂*(θ̂*) - x‖ → d̂^{*,E}
    projection_displacement_E, ///< sup over M̂^{*,E} of d(x, M̂*)      → b̂^{*,E}
    hausdorff_std,             ///< d_H(M̂*, M̂), standard bootstrap     → ê*
};

enum class Resampling { smoothed, standard };

struct BootstrapPlan {
    std::size_t replications = 250; ///< B
    BootstrapStatistic statistic = BootstrapStatistic::sup_vs_mean_E;
    Resampling resampling = Resampling::smoothed;
    double alpha = 0.1;
    std::uint64_t base_seed = 0;
    unsigned threads = 1;
    double level = 0.0;   ///< target level c (contour statistics)
    GridSpec contour_grid; ///< per-replication contour extraction grid
    double contour_spacing = 0.0; ///< vertex spacing for sups; 0 → min(h)/4
    /// per-replication vertex refinement; residuals far below the statistic
    /// scale are wasted work, so the default is looser than the library-wide
    /// contour default
    ContourOptions contour_opts{1e-6, 12, true};
    FlowOptions flow{};
    double max_skip_fraction = 0.2;

    void validate() const;
};

/// Replication b of the statistic depends only on (base_seed, b); execution
/// order and worker count never change the sorted sample vector.
struct QuantileEstimate {
    double value = 0.0;
    double alpha = 0.1;
    std::size_t b_stored = 0;     ///< stored statistic count
    std::vector<double> samples;  ///< sorted statistic samples
    std::size_t failure_count = 0; ///< replications flagged (flow failures etc.)
    /// replication-indexed detail (NaN where a replication was skipped)
    std::vector<double> by_replication;
    std::vector<std::uint8_t> flagged;
};

/// CSV dump of the per-replication statistics: replication, statistic,
/// status (ok / flagged / skipped).
void save_statistic_csv(const QuantileEstimate& q, const std::string& path);

/// 1-based position of the upper empirical quantile: ceil((1-alpha)·B),
/// clamped to [1, B].
std::size_t quantile_index(double alpha, std::size_t b);

/// Order-statistic quantile of an unsorted sample vector.
double order_statistic_quantile(std::vector<double> samples, double alpha);

/// max over contour vertices of |fa - fb|.
double sup_abs_diff_on_contour(const Field2& fa, const Field2& fb,
                               const Contour& ct);

/// max over seeds of the curve displacement ‖X̂(θ̂) - x‖ under `field` toward
/// level c; non-hit seeds fall back to the trace argmin point and are
/// counted in *n_failed.
double max_curve_displacement(const DiffField2& field,
                              std::span<const Vec2> seeds, double c,
                              const FlowOptions& opts,
                              std::size_t* n_failed = nullptr);

/// max over seeds of the distance to `target` (one directed Hausdorff
/// component).
double max_projection_displacement(std::span<const Vec2> seeds,
                                   const Contour& target);

/// ĉ* and ĉ^{*,E} from one smoothed-bootstrap pass (shared draws).
struct VerticalQuantiles {
    QuantileEstimate c_star;      ///< sup_vs_fg
    QuantileEstimate c_star_mean; ///< sup_vs_mean_E
};
VerticalQuantiles vertical_quantiles_both(const Dataset& data,
                                          const KernelSpec& kernel,
                                          std::span<const double> h,
                                          std::span<const double> g,
                                          const Contour& m_hat,
                                          const BootstrapPlan& plan);

/// One of the two vertical statistics (plan.statistic selects).
QuantileEstimate quantile_vertical(const Dataset& data,
                                   const KernelSpec& kernel,
                                   std::span<const double> h,
                                   std::span<const double> g,
                                   const Contour& m_hat,
                                   const BootstrapPlan& plan);

/// d̂^{*,E}: traces from M̂^{*,E} vertices under each bootstrap estimate.
QuantileEstimate quantile_curve_displacement(const Dataset& data,
                                             const KernelSpec& kernel,
                                             std::span<const double> h,
                                             std::span<const double> g,
                                             const BootstrapPlan& plan);

/// b̂^{*,E}: nearest-point displacement from M̂^{*,E} to each M̂*.
QuantileEstimate quantile_projection_displacement(const Dataset& data,
                                                  const KernelSpec& kernel,
                                                  std::span<const double> h,
                                                  std::span<const double> g,
                                                  const BootstrapPlan& plan);

/// ê*: d_H(M̂*, M̂) over standard multinomial resamples.
QuantileEstimate quantile_hausdorff_std(const Dataset& data,
                                        const KernelSpec& kernel,
                                        std::span<const double> h,
                                        const Contour& m_hat,
                                        const BootstrapPlan& plan);

/// The deterministic M̂^{*,E} contour shared by the displacement engines.
Contour bootstrap_mean_contour(const Dataset& data, const KernelSpec& kernel,
                               std::span<const double> h,
                               std::span<const double> g,
                               const BootstrapPlan& plan);

} // namespace levelset
