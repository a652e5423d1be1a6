#pragma once

#include "levelset/bootstrap.hpp"
#include "levelset/density.hpp"
#include "levelset/evt.hpp"
#include "levelset/models.hpp"
#include "levelset/regions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace levelset {

/// The confidence-region constructions of the simulation study.
enum class MethodId {
    H,      ///< Hausdorff tube around M̂ (standard bootstrap), target M^E
    Ve,     ///< vertical band on f̂ with ĉ^{*,E}, target M^E
    V,      ///< vertical band on f̂ with ĉ*, target M
    Vbc,    ///< vertical band on f̂^bc with ĉ^{*,E}, target M
    Vus,    ///< vertical band on undersmoothed f̂ with its ĉ^{*,E}, target M
    Vls,    ///< large-sample band on f̂^bc with â, target M
    C4,     ///< gradient tube on f̂^bc with â (gradient-scaled), target M
    C4star, ///< gradient tube on f̂^bc with ĉ^{*,E} (gradient-scaled), target M
    C5star, ///< gradient tube on f̂^bc with d̂^{*,E} (displacement), target M
    C6star, ///< constant tube around M̂^bc with b̂^{*,E}, target M
};

MethodId method_from_name(const std::string& name);
std::string method_name(MethodId m);
/// true when the method targets the smoothed isosurface M^E.
bool targets_smoothed(MethodId m);

struct BandwidthRule {
    enum class Kind { normal_scale, plugin, fixed } kind = Kind::normal_scale;
    // fixed-rule vectors (all three required)
    std::vector<double> h, l, g;
};

/// normal_scale: the normal-reference rule converted to the working kernel:
///   h_j = σ̂_j·C0·n^{-1/(d+4)},  C0 = [d·R(k)^d / (μ₂²·R(Δφ_d))]^{1/(d+4)}
///   l_j = σ̂_j·C2·n^{-1/(d+8)},  C2 = [(d+4)·R_L(K) / (μ₂²·R(Δ²φ_d))]^{1/(d+8)}
///   g = h
/// with R_L(K) = ∫(Σ_j ∂²_j K)² and the normal-reference functionals
/// evaluated by quadrature.
///
/// plugin: one-stage direct plug-in for h. Axes are standardised by σ̂_j,
/// the curvature functional θ = ∫(Δf)² is estimated by the pilot KDE
/// Laplacian at the normal-scale second-derivative bandwidth, and
///   h0^{d+4} = d·R(k)^d / (μ₂²·θ̂·n),  h_j = σ̂_j·h0.
/// Unlike the normal reference, θ̂ reacts to multimodal curvature instead of
/// the inflated between-mode variance. l and g as in normal_scale.
Bandwidths select_bandwidths(const Dataset& data, const KernelSpec& kernel,
                             const BandwidthRule& rule);

struct ExperimentConfig {
    std::string case_name = "case1";
    std::size_t n = 200;
    std::size_t runs = 10;        ///< M
    std::size_t bootstrap = 250;  ///< B
    double alpha = 0.1;
    std::vector<MethodId> methods{MethodId::Ve};
    std::uint64_t seed = 1;
    unsigned threads = 0; ///< 0 → hardware parallelism
    int grid_cells = 512;
    /// λ̂/P̂ raster resolution for the flow-traced gradient-tube regions;
    /// traces are costly per cell, so this is tunable separately.
    int gradient_raster_cells = 512;
    int contour_cells = 256;
    int bootstrap_contour_cells = 128;
    std::size_t probe_points = 1024;
    BandwidthRule bandwidth_rule{};
    double undersmooth_factor = 0.7;
    std::optional<GridSpec> grid; ///< override of the λ̂/P̂ raster box

    void validate() const;
};

/// Key-value config file (TOML syntax, flat keys; see README).
ExperimentConfig parse_config(const std::string& path);

struct MethodSummary {
    MethodId method{};
    double coverage = 0.0;    ///< C.P.
    double mean_volume = 0.0; ///< λ̄
    double mean_mass = 0.0;   ///< P̄
    std::size_t failure_runs = 0; ///< runs with flow-failure diagnostics
    std::size_t skipped_runs = 0; ///< runs where the method was undefined
    std::string note;
    // per-run detail (0/1 cover; skipped runs excluded from aggregates)
    std::vector<std::uint8_t> cover;
    std::vector<std::uint8_t> skipped;
    std::vector<double> volume;
    std::vector<double> mass;
};

struct CoverageReport {
    ExperimentConfig config;
    std::vector<MethodSummary> methods;
    std::size_t aborted_runs = 0;
    std::vector<std::string> run_errors;
    double wall_seconds = 0.0;
};

/// The Monte-Carlo coverage experiment. Per-run module errors abort that
/// run (with a diagnostic); more than 10% aborted runs fail the experiment.
CoverageReport run_case(const ExperimentConfig& config);

/// CSV: method,case,n,M,B,alpha,coverage,mean_volume,mean_mass,failures —
/// one row per method, 17 significant digits, LF endings. Byte-identical
/// for a fixed config and seed regardless of thread count.
void emit_report(const CoverageReport& report, const std::string& path);

struct ReportRow {
    std::string method, case_name;
    std::size_t n, runs, bootstrap;
    double alpha, coverage, mean_volume, mean_mass;
    std::size_t failures;
};
std::vector<ReportRow> parse_report(const std::string& path);

/// Default λ̂/P̂ raster box: the data range padded by max(h) + max(g).
GridSpec default_raster_grid(const Dataset& data, const Bandwidths& bw,
                             int cells);

/// E f̂ = f ⋆ K_h of the true pdf by tensor Gauss-Legendre quadrature.
double smoothed_pdf(const TrueModel& model, const KernelSpec& kernel,
                    std::span<const double> h, const Vec2& x);

/// Contour of the smoothed pdf at level c (the M^E target).
Contour smoothed_target_contour(const TrueModel& model,
                                const KernelSpec& kernel,
                                std::span<const double> h, double c,
                                const GridSpec& grid, unsigned threads = 1);

/// Shared per-run machinery: estimators, contours and quantiles are built
/// lazily and memoised so methods share work. Single-owner object; not for
/// concurrent mutation.
class RunContext {
public:
    RunContext(std::shared_ptr<const Dataset> data, KernelSpec kernel,
               Bandwidths bw, double level, double alpha, std::size_t B,
               std::uint64_t seed, GridSpec raster_grid, GridSpec contour_grid,
               GridSpec boot_grid, double undersmooth_factor,
               unsigned threads);

    struct MethodResult {
        Region region;
        double quantile = 0.0;
        std::size_t engine_failures = 0;
        bool skipped = false;
        std::string note;
    };
    MethodResult build_method(MethodId m);

    const GridSpec& raster_grid() const { return raster_grid_; }
    double level() const { return level_; }
    const Bandwidths& bandwidths() const { return bw_; }

    const std::shared_ptr<const DensityEstimator>& fhat();
    const std::shared_ptr<const DensityEstimator>& fbc();
    const std::shared_ptr<const DensityEstimator>& fus();
    const std::shared_ptr<const Contour>& m_hat();
    const std::shared_ptr<const Contour>& m_bc();
    const std::shared_ptr<const Contour>& m_us();

private:
    Contour extract(const std::shared_ptr<const DensityEstimator>& est,
                    const char* what);
    const VerticalQuantiles& vertical();
    const VerticalQuantiles& vertical_us();
    double evt_a(); // throws numeric_error when h_eff >= 1
    BootstrapPlan plan_for(std::uint64_t tag) const;

    std::shared_ptr<const Dataset> data_;
    KernelSpec kernel_;
    Bandwidths bw_;
    double level_, alpha_;
    std::size_t B_;
    std::uint64_t seed_;
    GridSpec raster_grid_, contour_grid_, boot_grid_;
    double usf_;
    unsigned threads_;
    double spacing_;

    std::shared_ptr<const DensityEstimator> fhat_, fbc_, fus_;
    std::shared_ptr<const Contour> m_hat_, m_bc_, m_us_;
    std::optional<VerticalQuantiles> vertical_, vertical_us_;
    std::optional<double> evt_a_;
    std::optional<QuantileEstimate> hausdorff_, curve_, projection_;
};

} // namespace levelset
