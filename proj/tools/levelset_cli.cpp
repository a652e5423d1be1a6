// Command-line front end: run coverage experiments, compute confidence
// regions for user data, evaluate the density estimator, and inspect kernel
// constants.
//
// Exit codes: 0 success, 1 usage, 2 numeric failure, 3 I/O.

#include "levelset/errors.hpp"
#include "levelset/harness.hpp"
#include "levelset/parallel.hpp"
#include "levelset/svg.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace levelset;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ostream& open_or_stdout(std::optional<std::ofstream>& file,
                             const std::string& path) {
    if (path.empty()) return std::cout;
    file.emplace(path, std::ios::binary);
    if (!*file) throw io_error("cannot write output file: " + path);
    return *file;
}

void cmd_constants(const std::string& kernel_name, const std::string& out) {
    const auto kernel = KernelSpec::by_name(kernel_name);
    const auto& c = kernel.constants();
    std::optional<std::ofstream> file;
    auto& os = open_or_stdout(file, out);
    os << "name,value\n"
       << "integral," << fmt17(c.integral) << '\n'
       << "l2_norm_sq," << fmt17(c.l2_norm_sq) << '\n'
       << "deriv_l2_norm_sq," << fmt17(c.deriv_l2_norm_sq) << '\n'
       << "s_k_sq," << fmt17(c.s_k_sq) << '\n'
       << "mu2," << fmt17(c.mu2) << '\n';
}

void cmd_kde_eval(const std::string& data_path,
                  const std::vector<double>& h, bool bias_corrected,
                  const std::vector<double>& l,
                  const std::string& points_path, const std::string& out) {
    auto data = std::make_shared<Dataset>(load_dataset_csv(data_path));
    const auto kernel = KernelSpec::simulation(data->dim);
    if (static_cast<int>(h.size()) != data->dim)
        throw usage_error("--h needs one entry per data column");
    DensityEstimator est =
        bias_corrected
            ? DensityEstimator::fit_bias_corrected(data, kernel, h, l)
            : DensityEstimator::fit_plain(data, kernel, h);

    const auto points = load_dataset_csv(points_path);
    if (points.dim != data->dim)
        throw usage_error("query points and data have different dimensions");

    std::optional<std::ofstream> file;
    auto& os = open_or_stdout(file, out);
    os << "f,grad_norm\n";
    std::vector<double> grad(static_cast<std::size_t>(points.dim));
    for (std::size_t i = 0; i < points.n; ++i) {
        const auto x = points.row(i);
        const double f = est.eval(x);
        est.eval_grad(x, grad);
        double norm = 0.0;
        for (double g : grad) norm += g * g;
        os << fmt17(f) << ',' << fmt17(std::sqrt(norm)) << '\n';
    }
}

struct RegionArgs {
    std::string data_path;
    double level = -1.0;
    double prob = -1.0;
    std::string case_spec;
    std::string method = "V.e";
    double alpha = 0.1;
    std::string out_prefix;
    std::size_t bootstrap = 250;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    int grid_cells = 512;
    int contour_cells = 256;
    int boot_cells = 128;
    std::vector<double> fixed_h, fixed_l, fixed_g;
};

double resolve_level(const RegionArgs& args) {
    if (args.level > 0.0) return args.level;
    if (args.prob <= 0.0)
        throw usage_error("give either --level or --prob with --case");
    if (args.case_spec.rfind("elliptic:", 0) == 0) {
        const double a = std::stod(args.case_spec.substr(9));
        return TrueModel::elliptic(a).level_of_probability(args.prob);
    }
    if (args.case_spec.rfind("case", 0) == 0 && args.case_spec != "case4") {
        return case_preset(args.case_spec)
            .model.level_of_probability(args.prob);
    }
    throw usage_error("--prob needs --case elliptic:<a> (or case1..case3)");
}

void cmd_region(const RegionArgs& args) {
    if (!(args.alpha > 0.0) || !(args.alpha < 1.0))
        throw usage_error("--alpha must be in (0,1)");
    const MethodId method = method_from_name(args.method);
    const double level = resolve_level(args);

    auto data = std::make_shared<Dataset>(load_dataset_csv(args.data_path));
    if (data->dim != 2)
        throw usage_error("region construction expects 2-D data");
    const auto kernel = KernelSpec::simulation(2);

    BandwidthRule rule;
    if (!args.fixed_h.empty()) {
        rule.kind = BandwidthRule::Kind::fixed;
        rule.h = args.fixed_h;
        rule.l = args.fixed_l.empty() ? args.fixed_h : args.fixed_l;
        rule.g = args.fixed_g.empty() ? args.fixed_h : args.fixed_g;
    }
    const auto bw = select_bandwidths(*data, kernel, rule);

    const GridSpec raster = default_raster_grid(*data, bw, args.grid_cells);
    GridSpec contour_grid = raster;
    contour_grid.cells = {args.contour_cells, args.contour_cells};
    GridSpec boot_grid = raster;
    boot_grid.cells = {args.boot_cells, args.boot_cells};

    const unsigned threads =
        args.threads == 0 ? default_threads() : args.threads;
    RunContext ctx(data, kernel, bw, level, args.alpha, args.bootstrap,
                   args.seed, raster, contour_grid, boot_grid, 0.7, threads);
    auto built = ctx.build_method(method);
    if (built.skipped) throw numeric_error(built.note);

    const auto& base = (method == MethodId::Vbc || method == MethodId::Vls ||
                        method == MethodId::C4 || method == MethodId::C4star ||
                        method == MethodId::C5star || method == MethodId::C6star)
                           ? ctx.m_bc()
                           : ctx.m_hat();
    save_contour_csv(*base, args.out_prefix + "_contour.csv");
    const auto cells = rasterize(built.region, raster, threads);
    save_raster_csv(cells, raster, args.out_prefix + "_region.csv");

    SvgCanvas canvas(raster);
    canvas.add_scatter(*data, "#9aa7b5", 1.0);
    canvas.add_raster_boundary(cells, raster, "crimson", 1.5);
    canvas.add_contour(*base, "black", 1.2);
    canvas.save(args.out_prefix + ".svg");

    std::cout << "method=" << method_name(method)
              << " quantile=" << fmt17(built.quantile)
              << " h=" << fmt17(bw.h[0]) << ',' << fmt17(bw.h[1]) << '\n';
}

struct SimulateArgs {
    std::string config_path;
    std::string out_path;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    std::string svg_dir;
};

void render_run_svgs(const ExperimentConfig& config, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto preset = case_preset(config.case_name);
    const auto kernel = KernelSpec::simulation(2);
    const unsigned threads =
        config.threads == 0 ? default_threads() : config.threads;
    for (std::size_t r = 0; r < config.runs; ++r) {
        Rng rng(mix_seed(config.seed, r));
        auto data =
            std::make_shared<Dataset>(preset.model.sample(config.n, rng));
        const auto bw =
            select_bandwidths(*data, kernel, config.bandwidth_rule);
        GridSpec raster =
            config.grid ? *config.grid
                        : default_raster_grid(*data, bw, config.grid_cells);
        GridSpec contour_grid = raster;
        contour_grid.cells = {config.contour_cells, config.contour_cells};
        GridSpec boot_grid = raster;
        boot_grid.cells = {config.bootstrap_contour_cells,
                           config.bootstrap_contour_cells};
        RunContext ctx(data, kernel, bw, preset.level, config.alpha,
                       config.bootstrap, mix_seed(config.seed, r), raster,
                       contour_grid, boot_grid, config.undersmooth_factor,
                       threads);
        SvgCanvas canvas(raster);
        canvas.add_scatter(*data, "#9aa7b5", 1.0);
        canvas.add_contour(preset.model.true_contour(preset.level, 512),
                           "black", 1.6);
        const char* palette[] = {"crimson", "seagreen", "royalblue",
                                 "darkorange", "purple", "teal",
                                 "saddlebrown", "deeppink", "olive", "navy"};
        std::size_t color_idx = 0;
        for (MethodId m : config.methods) {
            auto built = ctx.build_method(m);
            const auto color = palette[color_idx++ % 10];
            if (built.skipped) continue;
            canvas.add_raster_boundary(rasterize(built.region, raster, threads),
                                       raster, color, 1.2);
        }
        canvas.add_contour(*ctx.m_hat(), "#444444", 0.9);
        canvas.save(dir + "/run_" + std::to_string(r) + ".svg");
    }
}

void cmd_simulate(const SimulateArgs& args) {
    auto config = parse_config(args.config_path);
    if (args.threads != 0) config.threads = args.threads;
    if (args.seed) config.seed = *args.seed;

    const auto report = run_case(config);
    emit_report(report, args.out_path);

    for (const auto& m : report.methods) {
        std::cout << method_name(m.method) << ": coverage=" << m.coverage
                  << " volume=" << m.mean_volume << " mass=" << m.mean_mass
                  << " failures=" << m.failure_runs;
        if (m.skipped_runs > 0)
            std::cout << " skipped=" << m.skipped_runs << " (" << m.note << ")";
        std::cout << '\n';
    }
    if (report.aborted_runs > 0) {
        std::cout << "aborted runs: " << report.aborted_runs;
        if (!report.run_errors.empty())
            std::cout << " (first: " << report.run_errors.front() << ")";
        std::cout << '\n';
    }
    std::cout << "wall seconds: " << report.wall_seconds << '\n';

    if (!args.svg_dir.empty()) render_run_svgs(config, args.svg_dir);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"confidence regions for density level sets and isosurfaces"};
    app.require_subcommand(1);
    // long-form help only: --h is the bandwidth flag
    app.set_help_flag("--help", "print help and exit");

    // constants
    auto* constants = app.add_subcommand(
        "constants", "print the scalar constants of a registered kernel");
    std::string kernel_name = "sim2d";
    std::string constants_out;
    constants->set_help_flag("--help", "print help and exit");
    constants->add_option("--kernel", kernel_name, "kernel name (sim1d/sim2d/sim3d)");
    constants->add_option("--out", constants_out, "output CSV (default stdout)");

    // kde-eval
    auto* kde = app.add_subcommand(
        "kde-eval", "evaluate the density estimate at query points");
    std::string kde_data, kde_points, kde_out;
    std::vector<double> kde_h, kde_l;
    bool kde_bc = false;
    kde->set_help_flag("--help", "print help and exit");
    kde->add_option("--data", kde_data, "sample CSV (headerless, d columns)")
        ->required();
    kde->add_option("--h", kde_h, "bandwidth per axis")
        ->required()
        ->delimiter(',');
    kde->add_flag("--bc", kde_bc, "bias-corrected estimate (needs --l)");
    kde->add_option("--l", kde_l, "bias-correction bandwidth per axis")
        ->delimiter(',');
    kde->add_option("--points", kde_points, "query points CSV")->required();
    kde->add_option("--out", kde_out, "output CSV (default stdout)");

    // region
    auto* region = app.add_subcommand(
        "region", "build one confidence region for user data");
    RegionArgs reg;
    region->set_help_flag("--help", "print help and exit");
    region->add_option("--data", reg.data_path, "sample CSV")->required();
    region->add_option("--level", reg.level, "target level c");
    region->add_option("--prob", reg.prob,
                       "superlevel mass p (with --case elliptic:<a>)");
    region->add_option("--case", reg.case_spec,
                       "model spec for --prob (elliptic:<a> or case1..case3)");
    region->add_option("--method", reg.method,
                       "H, V.e, V, V.bc, V.us, V.ls, C4, C4*, C5*, C6*")
        ->required();
    region->add_option("--alpha", reg.alpha, "miscoverage level");
    region->add_option("--out", reg.out_prefix, "output prefix")->required();
    region->add_option("--bootstrap", reg.bootstrap, "bootstrap replications");
    region->add_option("--seed", reg.seed, "bootstrap seed");
    region->add_option("--threads", reg.threads, "worker cap (0 = all)");
    region->add_option("--grid-cells", reg.grid_cells, "raster resolution");
    region->add_option("--contour-cells", reg.contour_cells,
                       "contour grid resolution");
    region->add_option("--boot-cells", reg.boot_cells,
                       "bootstrap contour grid resolution");
    region->add_option("--h", reg.fixed_h, "fixed estimation bandwidth")
        ->delimiter(',');
    region->add_option("--l", reg.fixed_l, "fixed bias bandwidth")
        ->delimiter(',');
    region->add_option("--g", reg.fixed_g, "fixed resampling bandwidth")
        ->delimiter(',');

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "run the Monte-Carlo coverage experiment");
    SimulateArgs sim;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    simulate->set_help_flag("--help", "print help and exit");
    simulate->add_option("--config", sim.config_path, "experiment config file")
        ->required();
    simulate->add_option("--out", sim.out_path, "report CSV path")->required();
    simulate->add_option("--threads", sim.threads, "worker cap (0 = all)");
    simulate
        ->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    simulate->add_option("--svg", sim.svg_dir,
                         "directory for per-run overlay SVGs");

    try {
        app.parse(argc, argv);
        if (constants->parsed()) cmd_constants(kernel_name, constants_out);
        if (kde->parsed()) {
            if (kde_bc && kde_l.empty())
                throw usage_error("--bc requires --l");
            cmd_kde_eval(kde_data, kde_h, kde_bc, kde_l, kde_points, kde_out);
        }
        if (region->parsed()) cmd_region(reg);
        if (simulate->parsed()) {
            if (seed_given) sim.seed = seed_override;
            cmd_simulate(sim);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
