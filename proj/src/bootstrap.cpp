#include "levelset/bootstrap.hpp"

#include "levelset/errors.hpp"
#include "levelset/parallel.hpp"
#include "levelset/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace levelset {

void BootstrapPlan::validate() const {
    if (replications < 20)
        throw usage_error("bootstrap: needs at least 20 replications");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw usage_error("bootstrap: alpha must be in (0,1)");
    if (alpha * static_cast<double>(replications) < 1.0)
        throw usage_error("bootstrap: alpha·B must be at least 1");
    if (!(max_skip_fraction >= 0.0 && max_skip_fraction <= 1.0))
        throw usage_error("bootstrap: max_skip_fraction must be in [0,1]");
}

std::size_t quantile_index(double alpha, std::size_t b) {
    if (b == 0) throw usage_error("quantile_index: empty sample");
    const auto idx = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(b)));
    return std::clamp<std::size_t>(idx, 1, b);
}

double order_statistic_quantile(std::vector<double> samples, double alpha) {
    if (samples.empty())
        throw numeric_error("order_statistic_quantile: no samples");
    std::sort(samples.begin(), samples.end());
    return samples[quantile_index(alpha, samples.size()) - 1];
}

double sup_abs_diff_on_contour(const Field2& fa, const Field2& fb,
                               const Contour& ct) {
    if (ct.dim != 2 || ct.empty())
        throw numeric_error("sup_abs_diff_on_contour: empty contour");
    double sup = 0.0;
    for (const auto& line : ct.components)
        for (const auto& v : line.vertices)
            sup = std::max(sup, std::abs(fa(v) - fb(v)));
    return sup;
}

double max_curve_displacement(const DiffField2& field,
                              std::span<const Vec2> seeds, double c,
                              const FlowOptions& opts, std::size_t* n_failed) {
    double sup = 0.0;
    std::size_t failed = 0;
    for (const auto& seed : seeds) {
        const auto tr = trace_to_level(field, seed, c, opts);
        Vec2 endpoint{};
        if (tr.status == FlowStatus::hit) {
            endpoint = tr.positions.back();
        } else {
            ++failed;
            endpoint = hitting_point(tr).second;
        }
        sup = std::max(sup, std::hypot(endpoint[0] - seed[0],
                                       endpoint[1] - seed[1]));
    }
    if (n_failed) *n_failed = failed;
    return sup;
}

double max_projection_displacement(std::span<const Vec2> seeds,
                                   const Contour& target) {
    if (target.empty())
        throw numeric_error("max_projection_displacement: empty target");
    const SegmentGrid index(target);
    double sup = 0.0;
    for (const auto& s : seeds) sup = std::max(sup, index.distance(s));
    return sup;
}

namespace {

std::vector<Vec2> contour_vertices(const Contour& ct) {
    std::vector<Vec2> out;
    out.reserve(ct.vertex_count());
    for (const auto& line : ct.components)
        out.insert(out.end(), line.vertices.begin(), line.vertices.end());
    return out;
}

double default_spacing(std::span<const double> h, const BootstrapPlan& plan) {
    if (plan.contour_spacing > 0.0) return plan.contour_spacing;
    double hmin = h[0];
    for (double v : h) hmin = std::min(hmin, v);
    return hmin / 4.0;
}

QuantileEstimate finalize(std::vector<double> kept, std::size_t failures,
                          const BootstrapPlan& plan,
                          std::vector<double> by_replication = {},
                          std::vector<std::uint8_t> flagged = {}) {
    QuantileEstimate q;
    q.alpha = plan.alpha;
    q.failure_count = failures;
    std::sort(kept.begin(), kept.end());
    q.samples = std::move(kept);
    q.b_stored = q.samples.size();
    q.by_replication = std::move(by_replication);
    q.flagged = std::move(flagged);
    if (q.samples.empty())
        throw numeric_error("bootstrap: no usable replications");
    q.value = q.samples[quantile_index(plan.alpha, q.b_stored) - 1];
    return q;
}

Dataset multinomial_resample(const Dataset& data, Rng& rng) {
    std::vector<double> coords;
    coords.reserve(data.coords.size());
    for (std::size_t i = 0; i < data.n; ++i) {
        const std::size_t pick = rng.uniform_index(data.n);
        for (int j = 0; j < data.dim; ++j)
            coords.push_back(data.coord(pick, j));
    }
    return make_dataset(data.dim, std::move(coords));
}

constexpr double skip_marker = -1.0;

} // namespace

Contour bootstrap_mean_contour(const Dataset& data, const KernelSpec& kernel,
                               std::span<const double> h,
                               std::span<const double> g,
                               const BootstrapPlan& plan) {
    auto shared = std::make_shared<Dataset>(data);
    auto mean = std::make_shared<DensityEstimator>(
        DensityEstimator::fit_bootstrap_mean(
            shared, kernel, std::vector<double>(h.begin(), h.end()),
            std::vector<double>(g.begin(), g.end())));
    const auto values = mean->eval_on_grid(plan.contour_grid, plan.threads);
    const Field2 field = [mean](const Vec2& p) { return mean->eval(p); };
    auto ct = extract_contour_from_values(values, plan.contour_grid,
                                          plan.level, &field);
    if (ct.empty())
        throw numeric_error(
            "bootstrap_mean_contour: f^{*,E} does not cross the level");
    return resample(ct, default_spacing(h, plan), &field);
}

namespace {

// Sup seeds at the working spacing: the extraction grid is usually much
// finer than min(h)/4, so walk the contour by arclength instead of keeping
// every raw vertex.
std::vector<Vec2> sup_seeds(const Contour& ct, std::span<const double> h,
                            const BootstrapPlan& plan) {
    const double spacing = default_spacing(h, plan);
    const double len = ct.total_length;
    const auto count = static_cast<std::size_t>(
        std::max(8.0, std::ceil(len / spacing)));
    return sample_points(ct, count);
}

} // namespace

VerticalQuantiles vertical_quantiles_both(const Dataset& data,
                                          const KernelSpec& kernel,
                                          std::span<const double> h,
                                          std::span<const double> g,
                                          const Contour& m_hat,
                                          const BootstrapPlan& plan) {
    plan.validate();
    if (plan.resampling != Resampling::smoothed)
        throw usage_error("vertical quantiles use smoothed resampling");
    if (m_hat.empty())
        throw numeric_error("vertical quantiles: empty contour");

    const auto vertices = contour_vertices(m_hat);
    auto shared = std::make_shared<Dataset>(data);
    const std::vector<double> hv(h.begin(), h.end());
    const std::vector<double> gv(g.begin(), g.end());

    const auto fg = DensityEstimator::fit_plain(shared, kernel, gv);
    const auto fmean =
        DensityEstimator::fit_bootstrap_mean(shared, kernel, hv, gv);
    std::vector<double> fg_at(vertices.size());
    std::vector<double> fmean_at(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        fg_at[i] = fg.eval(vertices[i]);
        fmean_at[i] = fmean.eval(vertices[i]);
    }

    const ProfileSampler sampler(kernel);
    const std::size_t B = plan.replications;
    std::vector<double> stat_fg(B), stat_mean(B);
    parallel_for(B, plan.threads, [&](std::size_t b) {
        Rng rng(mix_seed(plan.base_seed, b));
        auto draws = std::make_shared<Dataset>(
            sample_smoothed(data, sampler, gv, data.n, rng));
        const auto fstar = DensityEstimator::fit_plain(draws, kernel, hv);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const double v = fstar.eval(vertices[i]);
            s1 = std::max(s1, std::abs(v - fg_at[i]));
            s2 = std::max(s2, std::abs(v - fmean_at[i]));
        }
        stat_fg[b] = s1;
        stat_mean[b] = s2;
    });

    VerticalQuantiles out;
    out.c_star = finalize(stat_fg, 0, plan, stat_fg);
    out.c_star_mean = finalize(stat_mean, 0, plan, stat_mean);
    return out;
}

QuantileEstimate quantile_vertical(const Dataset& data,
                                   const KernelSpec& kernel,
                                   std::span<const double> h,
                                   std::span<const double> g,
                                   const Contour& m_hat,
                                   const BootstrapPlan& plan) {
    if (plan.statistic != BootstrapStatistic::sup_vs_fg &&
        plan.statistic != BootstrapStatistic::sup_vs_mean_E)
        throw usage_error("quantile_vertical: wrong statistic kind");
    auto both = vertical_quantiles_both(data, kernel, h, g, m_hat, plan);
    return plan.statistic == BootstrapStatistic::sup_vs_fg
               ? std::move(both.c_star)
               : std::move(both.c_star_mean);
}

QuantileEstimate quantile_curve_displacement(const Dataset& data,
                                             const KernelSpec& kernel,
                                             std::span<const double> h,
                                             std::span<const double> g,
                                             const BootstrapPlan& plan) {
    plan.validate();
    if (plan.resampling != Resampling::smoothed)
        throw usage_error("curve displacement uses smoothed resampling");
    const auto mean_ct = bootstrap_mean_contour(data, kernel, h, g, plan);
    const auto seeds = sup_seeds(mean_ct, h, plan);

    const ProfileSampler sampler(kernel);
    const std::vector<double> hv(h.begin(), h.end());
    const std::vector<double> gv(g.begin(), g.end());
    const std::size_t B = plan.replications;
    std::vector<double> stats(B);
    std::vector<std::uint8_t> flagged(B, 0);
    parallel_for(B, plan.threads, [&](std::size_t b) {
        Rng rng(mix_seed(plan.base_seed, b));
        auto draws = std::make_shared<Dataset>(
            sample_smoothed(data, sampler, gv, data.n, rng));
        auto fstar = std::make_shared<DensityEstimator>(
            DensityEstimator::fit_plain(draws, kernel, hv));
        std::size_t failed = 0;
        stats[b] = max_curve_displacement(estimator_field(fstar), seeds,
                                          plan.level, plan.flow, &failed);
        flagged[b] = failed > 0 ? 1 : 0;
    });
    std::size_t failures = 0;
    for (auto f : flagged) failures += f;
    return finalize(stats, failures, plan, stats, flagged);
}

QuantileEstimate quantile_projection_displacement(const Dataset& data,
                                                  const KernelSpec& kernel,
                                                  std::span<const double> h,
                                                  std::span<const double> g,
                                                  const BootstrapPlan& plan) {
    plan.validate();
    if (plan.resampling != Resampling::smoothed)
        throw usage_error("projection displacement uses smoothed resampling");
    const auto mean_ct = bootstrap_mean_contour(data, kernel, h, g, plan);
    const auto seeds = sup_seeds(mean_ct, h, plan);

    const ProfileSampler sampler(kernel);
    const std::vector<double> hv(h.begin(), h.end());
    const std::vector<double> gv(g.begin(), g.end());
    const std::size_t B = plan.replications;
    std::vector<double> stats(B, skip_marker);
    parallel_for(B, plan.threads, [&](std::size_t b) {
        Rng rng(mix_seed(plan.base_seed, b));
        auto draws = std::make_shared<Dataset>(
            sample_smoothed(data, sampler, gv, data.n, rng));
        auto fstar = std::make_shared<DensityEstimator>(
            DensityEstimator::fit_plain(draws, kernel, hv));
        const auto values =
            fstar->eval_on_grid(plan.contour_grid, 1);
        const Field2 field = [fstar](const Vec2& p) { return fstar->eval(p); };
        auto star_ct = extract_contour_from_values(
            values, plan.contour_grid, plan.level, &field, plan.contour_opts);
        if (star_ct.empty()) return; // skip, counted below
        stats[b] = max_projection_displacement(seeds, star_ct);
    });
    std::vector<double> kept;
    kept.reserve(B);
    std::size_t skipped = 0;
    for (double s : stats) {
        if (s == skip_marker)
            ++skipped;
        else
            kept.push_back(s);
    }
    if (static_cast<double>(skipped) >
        plan.max_skip_fraction * static_cast<double>(B))
        throw numeric_error(
            "projection displacement: too many failed replications");
    std::vector<double> by_rep(stats.begin(), stats.end());
    std::vector<std::uint8_t> flagged(B, 0);
    for (std::size_t b = 0; b < B; ++b) {
        if (stats[b] == skip_marker) {
            by_rep[b] = std::numeric_limits<double>::quiet_NaN();
            flagged[b] = 1;
        }
    }
    return finalize(std::move(kept), skipped, plan, std::move(by_rep),
                    std::move(flagged));
}

QuantileEstimate quantile_hausdorff_std(const Dataset& data,
                                        const KernelSpec& kernel,
                                        std::span<const double> h,
                                        const Contour& m_hat,
                                        const BootstrapPlan& plan) {
    plan.validate();
    if (plan.resampling != Resampling::standard)
        throw usage_error(
            "quantile_hausdorff_std uses standard multinomial resampling");
    if (m_hat.empty())
        throw numeric_error("quantile_hausdorff_std: empty contour");

    const std::vector<double> hv(h.begin(), h.end());
    const SegmentGrid m_hat_index(m_hat);
    const std::size_t B = plan.replications;
    std::vector<double> stats(B, skip_marker);
    parallel_for(B, plan.threads, [&](std::size_t b) {
        Rng rng(mix_seed(plan.base_seed, b));
        auto draws =
            std::make_shared<Dataset>(multinomial_resample(data, rng));
        auto fstar = std::make_shared<DensityEstimator>(
            DensityEstimator::fit_plain(draws, kernel, hv));
        const auto values = fstar->eval_on_grid(plan.contour_grid, 1);
        const Field2 field = [fstar](const Vec2& p) { return fstar->eval(p); };
        auto star_ct = extract_contour_from_values(
            values, plan.contour_grid, plan.level, &field, plan.contour_opts);
        if (star_ct.empty()) return;
        star_ct = resample(star_ct, default_spacing(hv, plan), &field,
                           plan.contour_opts);
        stats[b] = hausdorff(star_ct, SegmentGrid(star_ct), m_hat, m_hat_index);
    });
    std::vector<double> kept;
    kept.reserve(B);
    std::size_t skipped = 0;
    for (double s : stats) {
        if (s == skip_marker)
            ++skipped;
        else
            kept.push_back(s);
    }
    if (static_cast<double>(skipped) >
        plan.max_skip_fraction * static_cast<double>(B))
        throw numeric_error("hausdorff bootstrap: too many failed replications");
    std::vector<double> by_rep(stats.begin(), stats.end());
    std::vector<std::uint8_t> flagged(B, 0);
    for (std::size_t b = 0; b < B; ++b) {
        if (stats[b] == skip_marker) {
            by_rep[b] = std::numeric_limits<double>::quiet_NaN();
            flagged[b] = 1;
        }
    }
    return finalize(std::move(kept), skipped, plan, std::move(by_rep),
                    std::move(flagged));
}

void save_statistic_csv(const QuantileEstimate& q, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write statistic file: " + path);
    out << "replication,statistic,status\n";
    char buf[64];
    for (std::size_t b = 0; b < q.by_replication.size(); ++b) {
        const bool flagged = b < q.flagged.size() && q.flagged[b];
        const bool skipped = std::isnan(q.by_replication[b]);
        std::snprintf(buf, sizeof(buf), "%.17g", q.by_replication[b]);
        out << b << ',' << buf << ','
            << (skipped ? "skipped" : (flagged ? "flagged" : "ok")) << '\n';
    }
    if (!out) throw io_error("failed writing statistic file: " + path);
}

} // namespace levelset
