#include "levelset/harness.hpp"

#include "levelset/errors.hpp"
#include "levelset/parallel.hpp"
#include "levelset/quadrature.hpp"
#include "levelset/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace levelset {

namespace {

constexpr std::uint64_t tag_vertical = 0x5645525431ULL;
constexpr std::uint64_t tag_vertical_us = 0x5553ULL;
constexpr std::uint64_t tag_hausdorff = 0x4841555344ULL;
constexpr std::uint64_t tag_curve = 0x4355525645ULL;
constexpr std::uint64_t tag_projection = 0x50524f4aULL;

const std::pair<MethodId, const char*> method_table[] = {
    {MethodId::H, "H"},           {MethodId::Ve, "V.e"},
    {MethodId::V, "V"},           {MethodId::Vbc, "V.bc"},
    {MethodId::Vus, "V.us"},      {MethodId::Vls, "V.ls"},
    {MethodId::C4, "C4"},         {MethodId::C4star, "C4*"},
    {MethodId::C5star, "C5*"},    {MethodId::C6star, "C6*"},
};

} // namespace

MethodId method_from_name(const std::string& name) {
    for (const auto& [id, nm] : method_table)
        if (name == nm) return id;
    throw usage_error("unknown method: " + name);
}

std::string method_name(MethodId m) {
    for (const auto& [id, nm] : method_table)
        if (id == m) return nm;
    return "?";
}

bool targets_smoothed(MethodId m) {
    return m == MethodId::H || m == MethodId::Ve;
}

// ---------------------------------------------------------------------------
// bandwidth selection

namespace {

// 1-D kernel functionals by adaptive quadrature of the profile
struct ProfileFunctionals {
    double r0;  // ∫k²
    double mu2; // ∫u²k
    double r2;  // ∫(k'')²
    double c20; // ∫k''k
};

ProfileFunctionals profile_functionals(const KernelSpec& kernel) {
    const double tol = 1e-10;
    ProfileFunctionals f{};
    f.r0 = integrate(
        [&](double u) {
            const double v = kernel.profile_value(u);
            return v * v;
        },
        -1.0, 1.0, tol);
    f.mu2 = integrate(
        [&](double u) { return u * u * kernel.profile_value(u); }, -1.0, 1.0,
        tol);
    f.r2 = integrate(
        [&](double u) {
            const double v = kernel.profile_deriv(u, 2);
            return v * v;
        },
        -1.0, 1.0, tol);
    f.c20 = integrate(
        [&](double u) {
            return kernel.profile_deriv(u, 2) * kernel.profile_value(u);
        },
        -1.0, 1.0, tol);
    return f;
}

// ∫ φ^{(p)} φ^{(q)} dx for the standard normal density
double normal_cross(int p, int q) {
    auto deriv = [](int order, double x) {
        const double phi =
            std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        switch (order) {
            case 0: return phi;
            case 2: return (x * x - 1.0) * phi;
            case 4: return (x * x * x * x - 6.0 * x * x + 3.0) * phi;
            default: throw usage_error("normal_cross: unsupported order");
        }
    };
    return integrate([&](double x) { return deriv(p, x) * deriv(q, x); }, -9.0,
                     9.0, 1e-11);
}

// ∫ (Δφ_d)² and ∫ (Δ²φ_d)² assembled from 1-D pieces (d = 1, 2)
double normal_laplacian_l2(int d) {
    const double n00 = normal_cross(0, 0);
    const double n22 = normal_cross(2, 2);
    const double n20 = normal_cross(2, 0);
    if (d == 1) return n22;
    return 2.0 * n22 * n00 + 2.0 * n20 * n20;
}

double normal_bilaplacian_l2(int d) {
    const double n00 = normal_cross(0, 0);
    const double n44 = normal_cross(4, 4);
    const double n40 = normal_cross(4, 0);
    const double n42 = normal_cross(4, 2);
    const double n22 = normal_cross(2, 2);
    const double n20 = normal_cross(2, 0);
    if (d == 1) return n44;
    // Δ²φ = φ⁗(x)φ(y) + 2φ″(x)φ″(y) + φ(x)φ⁗(y)
    return 2.0 * n44 * n00 + 2.0 * n40 * n40 + 4.0 * n42 * n20 +
           4.0 * n22 * n22;
}

} // namespace

Bandwidths select_bandwidths(const Dataset& data, const KernelSpec& kernel,
                             const BandwidthRule& rule) {
    const int d = data.dim;
    if (data.n < 2) throw usage_error("select_bandwidths: needs n >= 2");

    if (rule.kind == BandwidthRule::Kind::fixed) {
        if (static_cast<int>(rule.h.size()) != d ||
            static_cast<int>(rule.l.size()) != d ||
            static_cast<int>(rule.g.size()) != d)
            throw usage_error("fixed bandwidth rule: needs h, l, g of size d");
        return {rule.h, rule.l, rule.g};
    }

    std::vector<double> sd(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) mean += data.coord(i, j);
        mean /= static_cast<double>(data.n);
        double ss = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) {
            const double dd = data.coord(i, j) - mean;
            ss += dd * dd;
        }
        sd[static_cast<std::size_t>(j)] =
            std::sqrt(ss / static_cast<double>(data.n - 1));
        if (!(sd[static_cast<std::size_t>(j)] > 0.0))
            throw numeric_error("select_bandwidths: zero variance axis");
    }

    const auto f = profile_functionals(kernel);
    const double rkd = std::pow(f.r0, d);
    const double c0 = std::pow(
        static_cast<double>(d) * rkd / (f.mu2 * f.mu2 * normal_laplacian_l2(d)),
        1.0 / (d + 4.0));
    // R_L(K) = ∫(Σ_j ∂²_j K)²; product form collapses to 1-D pieces
    const double rl = d == 1 ? f.r2
                             : 2.0 * f.r2 * f.r0 + 2.0 * f.c20 * f.c20;
    const double c2 =
        std::pow((static_cast<double>(d) + 4.0) * rl /
                     (f.mu2 * f.mu2 * normal_bilaplacian_l2(d)),
                 1.0 / (d + 8.0));

    const double n = static_cast<double>(data.n);
    Bandwidths bw;
    bw.h.resize(static_cast<std::size_t>(d));
    bw.l.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        bw.h[static_cast<std::size_t>(j)] =
            sd[static_cast<std::size_t>(j)] * c0 * std::pow(n, -1.0 / (d + 4.0));
        bw.l[static_cast<std::size_t>(j)] =
            sd[static_cast<std::size_t>(j)] * c2 * std::pow(n, -1.0 / (d + 8.0));
    }
    bw.g = bw.h;
    if (rule.kind != BandwidthRule::Kind::plugin || d != 2) return bw;

    // one-stage direct plug-in: θ̂ = ∫(Δf̂_a)² on standardised axes
    std::vector<double> standardized(data.coords.size());
    for (std::size_t i = 0; i < data.n; ++i)
        for (int j = 0; j < d; ++j)
            standardized[i * static_cast<std::size_t>(d) +
                         static_cast<std::size_t>(j)] =
                data.coord(i, j) / sd[static_cast<std::size_t>(j)];
    auto std_data =
        std::make_shared<Dataset>(make_dataset(d, std::move(standardized)));
    const double a = c2 * std::pow(n, -1.0 / (d + 8.0));
    const auto pilot = DensityEstimator::fit_plain(
        std_data, kernel, std::vector<double>(static_cast<std::size_t>(d), a));

    GridSpec grid;
    grid.dim = 2;
    grid.cells = {128, 128};
    for (int j = 0; j < d; ++j) {
        double lo = std_data->coord(0, j), hi = lo;
        for (std::size_t i = 1; i < std_data->n; ++i) {
            lo = std::min(lo, std_data->coord(i, j));
            hi = std::max(hi, std_data->coord(i, j));
        }
        grid.lower[static_cast<std::size_t>(j)] = lo - 1.5 * a;
        grid.upper[static_cast<std::size_t>(j)] = hi + 1.5 * a;
    }
    double theta = 0.0;
    std::array<double, 4> hess{};
    for (int j = 0; j < grid.cells[1]; ++j) {
        for (int i = 0; i < grid.cells[0]; ++i) {
            const std::array<double, 2> x{grid.center(0, i),
                                          grid.center(1, j)};
            pilot.eval_hessian(x, hess);
            const double lap = hess[0] + hess[3];
            theta += lap * lap;
        }
    }
    theta *= grid.step(0) * grid.step(1);
    if (theta > 0.0) {
        const double h0 = std::pow(
            static_cast<double>(d) * rkd / (f.mu2 * f.mu2 * theta * n),
            1.0 / (d + 4.0));
        for (int j = 0; j < d; ++j)
            bw.h[static_cast<std::size_t>(j)] =
                sd[static_cast<std::size_t>(j)] * h0;
        bw.g = bw.h;
    }
    return bw;
}

// ---------------------------------------------------------------------------
// smoothed target

double smoothed_pdf(const TrueModel& model, const KernelSpec& kernel,
                    std::span<const double> h, const Vec2& x) {
    using rule = boost::math::quadrature::gauss<double, 12>;
    const auto& nodes = rule::abscissa();
    const auto& weights = rule::weights();
    // expand the half-rule to the full symmetric node set once
    double us[12], ws[12];
    int m = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == 0.0) {
            us[m] = 0.0;
            ws[m++] = weights[i];
        } else {
            us[m] = nodes[i];
            ws[m++] = weights[i];
            us[m] = -nodes[i];
            ws[m++] = weights[i];
        }
    }
    double sum = 0.0;
    for (int a = 0; a < m; ++a) {
        const double kx = kernel.profile_value(us[a]) * ws[a];
        const double px = x[0] - h[0] * us[a];
        for (int b = 0; b < m; ++b) {
            const double ky = kernel.profile_value(us[b]) * ws[b];
            sum += kx * ky * model.pdf({px, x[1] - h[1] * us[b]});
        }
    }
    return sum;
}

Contour smoothed_target_contour(const TrueModel& model,
                                const KernelSpec& kernel,
                                std::span<const double> h, double c,
                                const GridSpec& grid, unsigned threads) {
    const Field2 field = [&](const Vec2& p) {
        return smoothed_pdf(model, kernel, h, p);
    };
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    std::vector<double> values(static_cast<std::size_t>(nx) *
                               static_cast<std::size_t>(ny));
    parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t j) {
        for (int i = 0; i < nx; ++i)
            values[j * static_cast<std::size_t>(nx) +
                   static_cast<std::size_t>(i)] =
                field({grid.node(0, i), grid.node(1, static_cast<int>(j))});
    });
    auto ct = extract_contour_from_values(values, grid, c, &field);
    if (ct.empty())
        throw numeric_error(
            "smoothed_target_contour: E f̂ does not cross the level");
    double hmin = h[0];
    for (double v : h) hmin = std::min(hmin, v);
    return resample(ct, hmin / 4.0, &field);
}

// ---------------------------------------------------------------------------
// run context

RunContext::RunContext(std::shared_ptr<const Dataset> data, KernelSpec kernel,
                       Bandwidths bw, double level, double alpha,
                       std::size_t B, std::uint64_t seed, GridSpec raster_grid,
                       GridSpec contour_grid, GridSpec boot_grid,
                       double undersmooth_factor, unsigned threads)
    : data_(std::move(data)),
      kernel_(std::move(kernel)),
      bw_(std::move(bw)),
      level_(level),
      alpha_(alpha),
      B_(B),
      seed_(seed),
      raster_grid_(raster_grid),
      contour_grid_(contour_grid),
      boot_grid_(boot_grid),
      usf_(undersmooth_factor),
      threads_(threads) {
    spacing_ = *std::min_element(bw_.h.begin(), bw_.h.end()) / 4.0;
}

BootstrapPlan RunContext::plan_for(std::uint64_t tag) const {
    BootstrapPlan plan;
    plan.replications = B_;
    plan.alpha = alpha_;
    plan.base_seed = mix_seed(seed_, tag);
    plan.threads = threads_;
    plan.level = level_;
    plan.contour_grid = boot_grid_;
    return plan;
}

const std::shared_ptr<const DensityEstimator>& RunContext::fhat() {
    if (!fhat_)
        fhat_ = std::make_shared<DensityEstimator>(
            DensityEstimator::fit_plain(data_, kernel_, bw_.h));
    return fhat_;
}

const std::shared_ptr<const DensityEstimator>& RunContext::fbc() {
    if (!fbc_)
        fbc_ = std::make_shared<DensityEstimator>(
            DensityEstimator::fit_bias_corrected(data_, kernel_, bw_.h,
                                                 bw_.l));
    return fbc_;
}

const std::shared_ptr<const DensityEstimator>& RunContext::fus() {
    if (!fus_) {
        std::vector<double> hu = bw_.h;
        for (double& v : hu) v *= usf_;
        fus_ = std::make_shared<DensityEstimator>(
            DensityEstimator::fit_plain(data_, kernel_, hu));
    }
    return fus_;
}

Contour RunContext::extract(const std::shared_ptr<const DensityEstimator>& est,
                            const char* what) {
    const auto values = est->eval_on_grid(contour_grid_, threads_);
    const Field2 field = [est](const Vec2& p) { return est->eval(p); };
    auto ct = extract_contour_from_values(values, contour_grid_, level_, &field);
    if (ct.empty())
        throw numeric_error(std::string(what) +
                            ": estimator does not cross the level");
    return resample(ct, spacing_, &field);
}

const std::shared_ptr<const Contour>& RunContext::m_hat() {
    if (!m_hat_)
        m_hat_ = std::make_shared<Contour>(extract(fhat(), "m_hat"));
    return m_hat_;
}

const std::shared_ptr<const Contour>& RunContext::m_bc() {
    if (!m_bc_) m_bc_ = std::make_shared<Contour>(extract(fbc(), "m_bc"));
    return m_bc_;
}

const std::shared_ptr<const Contour>& RunContext::m_us() {
    if (!m_us_) m_us_ = std::make_shared<Contour>(extract(fus(), "m_us"));
    return m_us_;
}

const VerticalQuantiles& RunContext::vertical() {
    if (!vertical_)
        vertical_ = vertical_quantiles_both(*data_, kernel_, bw_.h, bw_.g,
                                            *m_hat(), plan_for(tag_vertical));
    return *vertical_;
}

const VerticalQuantiles& RunContext::vertical_us() {
    if (!vertical_us_) {
        std::vector<double> hu = bw_.h, gu = bw_.g;
        for (double& v : hu) v *= usf_;
        for (double& v : gu) v *= usf_;
        vertical_us_ = vertical_quantiles_both(*data_, kernel_, hu, gu, *m_us(),
                                               plan_for(tag_vertical_us));
    }
    return *vertical_us_;
}

double RunContext::evt_a() {
    if (!evt_a_) {
        EvtInputs in;
        in.d = data_->dim;
        in.n = data_->n;
        double prod = 1.0;
        for (double v : bw_.h) prod *= v;
        in.h_eff = std::pow(prod, 1.0 / data_->dim);
        in.alpha = alpha_;
        in.c = level_;
        in.kconst = kernel_.constants();
        in.surface_measure = m_bc()->total_length;
        evt_a_ = a_hat(in); // throws numeric_error when h_eff >= 1
    }
    return *evt_a_;
}

RunContext::MethodResult RunContext::build_method(MethodId m) {
    MethodResult out;
    // Region membership traces run at a coarser RK4 step: order-4 endpoint
    // error at 1/8 is orders of magnitude below the quantile scale, and the
    // Newton polish pins the endpoint to the level either way.
    FlowOptions tube_flow;
    tube_flow.step_frac = 1.0 / 8.0;
    switch (m) {
        case MethodId::H: {
            if (!hausdorff_) {
                auto plan = plan_for(tag_hausdorff);
                plan.resampling = Resampling::standard;
                hausdorff_ = quantile_hausdorff_std(*data_, kernel_, bw_.h,
                                                    *m_hat(), plan);
            }
            out.quantile = hausdorff_->value;
            out.engine_failures = hausdorff_->failure_count;
            out.region = make_tube(m_hat(), out.quantile);
            break;
        }
        case MethodId::Ve: {
            out.quantile = vertical().c_star_mean.value;
            out.region = make_vertical(fhat(), level_ - out.quantile,
                                       level_ + out.quantile);
            break;
        }
        case MethodId::V: {
            out.quantile = vertical().c_star.value;
            out.region = make_vertical(fhat(), level_ - out.quantile,
                                       level_ + out.quantile);
            break;
        }
        case MethodId::Vbc: {
            out.quantile = vertical().c_star_mean.value;
            out.region = make_vertical(fbc(), level_ - out.quantile,
                                       level_ + out.quantile);
            break;
        }
        case MethodId::Vus: {
            out.quantile = vertical_us().c_star_mean.value;
            out.region = make_vertical(fus(), level_ - out.quantile,
                                       level_ + out.quantile);
            break;
        }
        case MethodId::Vls:
        case MethodId::C4: {
            try {
                out.quantile = evt_a();
            } catch (const numeric_error& e) {
                out.skipped = true;
                out.note = e.what();
                return out;
            }
            if (m == MethodId::Vls) {
                out.region = make_vertical(fbc(), level_ - out.quantile,
                                           level_ + out.quantile);
            } else {
                out.region = make_gradient_tube(fbc(), *m_bc(), level_,
                                                out.quantile, true, tube_flow);
            }
            break;
        }
        case MethodId::C4star: {
            out.quantile = vertical().c_star_mean.value;
            out.region = make_gradient_tube(fbc(), *m_bc(), level_,
                                            out.quantile, true, tube_flow);
            break;
        }
        case MethodId::C5star: {
            if (!curve_) {
                auto plan = plan_for(tag_curve);
                plan.flow = tube_flow;
                curve_ = quantile_curve_displacement(*data_, kernel_, bw_.h,
                                                     bw_.g, plan);
            }
            out.quantile = curve_->value;
            out.engine_failures = curve_->failure_count;
            out.region = make_gradient_tube(fbc(), *m_bc(), level_,
                                            out.quantile, false, tube_flow);
            break;
        }
        case MethodId::C6star: {
            if (!projection_)
                projection_ = quantile_projection_displacement(
                    *data_, kernel_, bw_.h, bw_.g, plan_for(tag_projection));
            out.quantile = projection_->value;
            out.engine_failures = projection_->failure_count;
            out.region = make_tube(m_bc(), out.quantile);
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// experiment driver

void ExperimentConfig::validate() const {
    if (runs < 1) throw usage_error("config: runs must be >= 1");
    if (bootstrap < 20) throw usage_error("config: bootstrap must be >= 20");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw usage_error("config: alpha must be in (0,1)");
    if (n < 2) throw usage_error("config: n must be >= 2");
    if (methods.empty()) throw usage_error("config: no methods selected");
    if (grid_cells < 16 || contour_cells < 16 ||
        bootstrap_contour_cells < 16 || gradient_raster_cells < 16)
        throw usage_error("config: grids need at least 16 cells per axis");
    if (probe_points < 8)
        throw usage_error("config: probe_points must be >= 8");
    if (!(undersmooth_factor > 0.0) || undersmooth_factor > 1.0)
        throw usage_error("config: undersmooth_factor must be in (0,1]");
}

namespace {

struct RunRecord {
    bool aborted = false;
    std::string error;
    // per method (aligned with config.methods)
    std::vector<std::uint8_t> cover, skipped, failed;
    std::vector<double> volume, mass;
};

} // namespace

GridSpec default_raster_grid(const Dataset& data, const Bandwidths& bw,
                             int cells) {
    GridSpec g;
    g.dim = 2;
    g.cells = {cells, cells};
    const double pad_h = *std::max_element(bw.h.begin(), bw.h.end());
    const double pad_g = *std::max_element(bw.g.begin(), bw.g.end());
    const double pad = pad_h + pad_g;
    for (int j = 0; j < 2; ++j) {
        double lo = data.coord(0, j), hi = lo;
        for (std::size_t i = 1; i < data.n; ++i) {
            lo = std::min(lo, data.coord(i, j));
            hi = std::max(hi, data.coord(i, j));
        }
        g.lower[static_cast<std::size_t>(j)] = lo - pad;
        g.upper[static_cast<std::size_t>(j)] = hi + pad;
    }
    return g;
}

namespace {

RunRecord execute_run(const ExperimentConfig& config, const CasePreset& preset,
                      const KernelSpec& kernel, std::size_t run_index,
                      unsigned inner_threads) {
    RunRecord rec;
    const std::size_t m_count = config.methods.size();
    rec.cover.assign(m_count, 0);
    rec.skipped.assign(m_count, 0);
    rec.failed.assign(m_count, 0);
    rec.volume.assign(m_count, 0.0);
    rec.mass.assign(m_count, 0.0);

    Rng rng(mix_seed(config.seed, run_index));
    auto data =
        std::make_shared<Dataset>(preset.model.sample(config.n, rng));
    const auto bw = select_bandwidths(*data, kernel, config.bandwidth_rule);

    GridSpec raster = config.grid
                         ? *config.grid
                         : default_raster_grid(*data, bw, config.grid_cells);
    GridSpec contour_grid = raster;
    contour_grid.cells = {config.contour_cells, config.contour_cells};
    GridSpec boot_grid = raster;
    boot_grid.cells = {config.bootstrap_contour_cells,
                       config.bootstrap_contour_cells};

    RunContext ctx(data, kernel, bw, preset.level, config.alpha,
                   config.bootstrap, mix_seed(config.seed, run_index),
                   raster, contour_grid, boot_grid, config.undersmooth_factor,
                   inner_threads);

    // probe points on the targets
    std::vector<Vec2> true_probes;
    std::optional<std::vector<Vec2>> smoothed_probes;
    {
        const auto ct = preset.model.true_contour(preset.level,
                                                  config.probe_points);
        if (ct.vertex_count() == config.probe_points) {
            for (const auto& line : ct.components)
                true_probes.insert(true_probes.end(), line.vertices.begin(),
                                   line.vertices.end());
        } else {
            true_probes = sample_points(ct, config.probe_points);
        }
    }
    bool need_smoothed = false;
    for (auto m : config.methods) need_smoothed |= targets_smoothed(m);
    if (need_smoothed) {
        GridSpec sg = raster;
        sg.cells = {config.contour_cells, config.contour_cells};
        const auto ct = smoothed_target_contour(preset.model, kernel, bw.h,
                                                preset.level, sg,
                                                inner_threads);
        smoothed_probes = sample_points(ct, config.probe_points);
    }

    // true pdf at raster centers, shared across methods and computed per
    // distinct raster resolution
    std::vector<double> pdf_main, pdf_gradient;
    auto pdf_for = [&](const GridSpec& g, std::vector<double>& cache)
        -> const std::vector<double>& {
        if (cache.empty()) {
            cache.resize(static_cast<std::size_t>(g.cells[0]) *
                         static_cast<std::size_t>(g.cells[1]));
            parallel_for(
                static_cast<std::size_t>(g.cells[1]), inner_threads,
                [&](std::size_t j) {
                    for (int i = 0; i < g.cells[0]; ++i)
                        cache[j * static_cast<std::size_t>(g.cells[0]) +
                              static_cast<std::size_t>(i)] =
                            preset.model.pdf(
                                {g.center(0, i),
                                 g.center(1, static_cast<int>(j))});
                });
        }
        return cache;
    };
    GridSpec gradient_raster = raster;
    gradient_raster.cells = {config.gradient_raster_cells,
                             config.gradient_raster_cells};

    for (std::size_t mi = 0; mi < m_count; ++mi) {
        const MethodId m = config.methods[mi];
        auto built = ctx.build_method(m);
        if (built.skipped) {
            rec.skipped[mi] = 1;
            continue;
        }
        const auto& probes =
            targets_smoothed(m) ? *smoothed_probes : true_probes;
        rec.cover[mi] = covers_points(built.region, probes) ? 1 : 0;
        const bool traced = m == MethodId::C4 || m == MethodId::C4star ||
                            m == MethodId::C5star;
        const GridSpec& mg = traced ? gradient_raster : raster;
        const auto raster_cells = rasterize(built.region, mg, inner_threads);
        rec.volume[mi] = volume_from_raster(raster_cells, mg);
        rec.mass[mi] = mass_from_raster(
            raster_cells, pdf_for(mg, traced ? pdf_gradient : pdf_main), mg);
        const long region_failures = flow_failure_count(built.region);
        rec.failed[mi] =
            (built.engine_failures > 0 || region_failures > 0) ? 1 : 0;
    }
    return rec;
}

} // namespace

CoverageReport run_case(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto preset = case_preset(config.case_name);
    const auto kernel = KernelSpec::simulation(2);

    const unsigned total_threads =
        config.threads == 0 ? default_threads() : config.threads;
    const unsigned outer = static_cast<unsigned>(std::min<std::size_t>(
        total_threads, config.runs));
    const unsigned inner = std::max(1u, total_threads / std::max(1u, outer));

    std::vector<RunRecord> records(config.runs);
    parallel_for(config.runs, outer, [&](std::size_t r) {
        try {
            records[r] = execute_run(config, preset, kernel, r, inner);
        } catch (const std::exception& e) {
            records[r].aborted = true;
            records[r].error = e.what();
        }
    });

    CoverageReport report;
    report.config = config;
    for (const auto& rec : records) {
        if (rec.aborted) {
            ++report.aborted_runs;
            report.run_errors.push_back(rec.error);
        }
    }
    if (static_cast<double>(report.aborted_runs) >
        0.10 * static_cast<double>(config.runs)) {
        std::string detail =
            report.run_errors.empty() ? "" : (": " + report.run_errors.front());
        throw numeric_error("run_case: more than 10% of runs aborted" + detail);
    }

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        MethodSummary s;
        s.method = config.methods[mi];
        std::size_t used = 0;
        for (std::size_t r = 0; r < config.runs; ++r) {
            const auto& rec = records[r];
            if (rec.aborted) {
                s.cover.push_back(0);
                s.skipped.push_back(1);
                s.volume.push_back(0.0);
                s.mass.push_back(0.0);
                continue;
            }
            s.cover.push_back(rec.cover[mi]);
            s.skipped.push_back(rec.skipped[mi]);
            s.volume.push_back(rec.volume[mi]);
            s.mass.push_back(rec.mass[mi]);
            if (rec.skipped[mi]) continue;
            ++used;
            s.coverage += rec.cover[mi];
            s.mean_volume += rec.volume[mi];
            s.mean_mass += rec.mass[mi];
            s.failure_runs += rec.failed[mi];
        }
        s.skipped_runs = config.runs - used;
        if (used > 0) {
            s.coverage /= static_cast<double>(used);
            s.mean_volume /= static_cast<double>(used);
            s.mean_mass /= static_cast<double>(used);
        } else {
            s.coverage = std::numeric_limits<double>::quiet_NaN();
            s.mean_volume = std::numeric_limits<double>::quiet_NaN();
            s.mean_mass = std::numeric_limits<double>::quiet_NaN();
            s.note = "skipped in every run (h_eff >= 1?)";
        }
        report.methods.push_back(std::move(s));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return report;
}

} // namespace levelset
