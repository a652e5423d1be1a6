#include "doctest.h"

#include "levelset/density.hpp"
#include "levelset/errors.hpp"
#include "levelset/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

using namespace levelset;

namespace {

std::shared_ptr<const Dataset> gaussian_cloud(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = rng.normal_pair();
        coords.push_back(a);
        coords.push_back(b);
    }
    return std::make_shared<Dataset>(make_dataset(2, std::move(coords)));
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int intervals = 4096) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i)
        sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("fit validation and degenerate inputs") {
    const auto k2 = KernelSpec::simulation(2);
    auto one = std::make_shared<Dataset>(make_dataset(2, {0.0, 0.0}));
    CHECK_THROWS_AS(
        (void)DensityEstimator::fit_plain(one, k2, {1.0, 1.0}), usage_error);

    auto data = gaussian_cloud(50, 7);
    CHECK_THROWS_AS(
        (void)DensityEstimator::fit_plain(data, k2, {1.0, 0.0}), usage_error);
    CHECK_THROWS_AS(
        (void)DensityEstimator::fit_plain(data, k2, {-1.0, 1.0}), usage_error);

    const auto est = DensityEstimator::fit_plain(data, k2, {0.5, 0.5});
    CHECK(est.eval(std::array<double, 2>{100.0, 100.0}) == 0.0);

    // fit is pure: two fits on the same inputs evaluate identically
    const auto est2 = DensityEstimator::fit_plain(data, k2, {0.5, 0.5});
    const std::array<double, 2> x{0.31, -0.42};
    CHECK(est.eval(x) == est2.eval(x));
}

TEST_CASE("two-point hand evaluation in one dimension") {
    const auto k1 = KernelSpec::simulation(1);
    auto data = std::make_shared<Dataset>(make_dataset(1, {0.0, 10.0}));
    const auto est = DensityEstimator::fit_plain(data, k1, {1.0});
    // second point is out of support: (1/2)·k(0) = 693/1024
    const std::array<double, 1> origin{0.0};
    CHECK(est.eval(origin) ==
          doctest::Approx(693.0 / 1024.0).epsilon(1e-15));
}

TEST_CASE("pruned evaluation equals the brute-force oracle") {
    const auto k2 = KernelSpec::simulation(2);
    for (std::size_t n : {200u, 1000u}) {
        auto data = gaussian_cloud(n, 1000 + n);
        const auto plain = DensityEstimator::fit_plain(data, k2, {0.6, 0.8});
        const auto bc = DensityEstimator::fit_bias_corrected(
            data, k2, {0.6, 0.8}, {0.9, 1.1});
        Rng rng(99);
        for (int q = 0; q < 100; ++q) {
            const std::array<double, 2> x{rng.uniform(-3.0, 3.0),
                                          rng.uniform(-3.0, 3.0)};
            CHECK(plain.eval(x) ==
                  doctest::Approx(plain.eval_brute(x)).epsilon(1e-12));
            CHECK(bc.eval(x) ==
                  doctest::Approx(bc.eval_brute(x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid evaluation matches point evaluation") {
    const auto k2 = KernelSpec::simulation(2);
    auto data = gaussian_cloud(150, 44);
    GridSpec grid;
    grid.lower = {-3.0, -3.0};
    grid.upper = {3.0, 3.0};
    grid.cells = {48, 40};

    const auto plain = DensityEstimator::fit_plain(data, k2, {0.7, 0.5});
    const auto bc =
        DensityEstimator::fit_bias_corrected(data, k2, {0.7, 0.5}, {1.0, 0.8});
    const auto bm =
        DensityEstimator::fit_bootstrap_mean(data, k2, {0.7, 0.5}, {0.6, 0.6});
    for (const auto* est : {&plain, &bc, &bm}) {
        const auto values = est->eval_on_grid(grid, 3);
        for (int j = 0; j <= grid.cells[1]; j += 7) {
            for (int i = 0; i <= grid.cells[0]; i += 5) {
                const std::array<double, 2> x{grid.node(0, i), grid.node(1, j)};
                const double direct = est->eval(x);
                const double gridded =
                    values[static_cast<std::size_t>(j) *
                               static_cast<std::size_t>(grid.nodes(0)) +
                           static_cast<std::size_t>(i)];
                CHECK(std::abs(gridded - direct) <=
                      1e-12 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST_CASE("gradient vanishes at a local maximum") {
    const auto k2 = KernelSpec::simulation(2);
    auto data = gaussian_cloud(300, 5);
    const auto est = DensityEstimator::fit_plain(data, k2, {0.9, 0.9});
    // crude ascent from the origin, then fine polish
    std::array<double, 2> x{0.0, 0.0};
    std::array<double, 2> g{};
    for (int it = 0; it < 4000; ++it) {
        est.eval_grad(x, g);
        const double norm = std::hypot(g[0], g[1]);
        if (norm < 1e-9) break;
        const double step = std::min(0.05, 0.2 * norm);
        x[0] += step * g[0] / norm;
        x[1] += step * g[1] / norm;
    }
    est.eval_grad(x, g);
    CHECK(std::hypot(g[0], g[1]) <= 1e-6);
}

TEST_CASE("derivatives match finite differences of the evaluation") {
    const auto k2 = KernelSpec::simulation(2);
    auto data = gaussian_cloud(250, 21);
    const std::vector<double> h{0.8, 0.6};
    const auto plain = DensityEstimator::fit_plain(data, k2, h);
    const auto bc = DensityEstimator::fit_bias_corrected(data, k2, h, {1.1, 0.9});

    Rng rng(1234);
    for (int q = 0; q < 50; ++q) {
        const std::array<double, 2> x{rng.uniform(-2.0, 2.0),
                                      rng.uniform(-2.0, 2.0)};
        for (const auto* est : {&plain, &bc}) {
            std::array<double, 2> g{};
            est->eval_grad(x, g);
            std::array<double, 4> hess{};
            est->eval_hessian(x, hess);
            for (int j = 0; j < 2; ++j) {
                const double step = 1e-4 * h[static_cast<std::size_t>(j)];
                auto xp = x;
                auto xm = x;
                xp[static_cast<std::size_t>(j)] += step;
                xm[static_cast<std::size_t>(j)] -= step;
                const double fd = (est->eval(xp) - est->eval(xm)) / (2.0 * step);
                const double scale = std::max(std::abs(fd), 1e-4);
                CHECK(std::abs(g[static_cast<std::size_t>(j)] - fd) <=
                      1e-4 * scale);
                std::array<double, 2> gp{}, gm{};
                est->eval_grad(xp, gp);
                est->eval_grad(xm, gm);
                for (int m = 0; m < 2; ++m) {
                    const double fd2 = (gp[static_cast<std::size_t>(m)] -
                                        gm[static_cast<std::size_t>(m)]) /
                                       (2.0 * step);
                    const double s2 = std::max(std::abs(fd2), 1e-4);
                    CHECK(std::abs(hess[static_cast<std::size_t>(j * 2 + m)] -
                                   fd2) <= 1e-4 * s2);
                }
            }
        }
    }
}

TEST_CASE("bias term") {
    const auto k2 = KernelSpec::simulation(2);
    auto data = gaussian_cloud(120, 3);
    const std::vector<double> h{0.5, 0.5};
    const std::vector<double> l{0.8, 0.8};

    SUBCASE("vanishes away from the data") {
        const std::array<double, 2> far{50.0, -50.0};
        CHECK(bias_term(*data, k2, h, l, far) == 0.0);
    }

    SUBCASE("scalar-h case equals the Hessian-trace identity") {
        const auto fl = DensityEstimator::fit_plain(data, k2, l);
        Rng rng(8);
        for (int q = 0; q < 20; ++q) {
            const std::array<double, 2> x{rng.uniform(-2.0, 2.0),
                                          rng.uniform(-2.0, 2.0)};
            std::array<double, 4> hess{};
            fl.eval_hessian(x, hess);
            const double expect = 0.5 * 0.25 * k2.constants().mu2 *
                                  (hess[0] + hess[3]);
            const double got = bias_term(*data, k2, h, l, x);
            CHECK(std::abs(got - expect) <=
                  1e-12 * std::max(1.0, std::abs(expect)));
        }
    }

    SUBCASE("sign flips between mode and tail") {
        // 1-D two-point sample: concave at the midpoint mode, convex in the
        // shoulder region
        const auto k1 = KernelSpec::simulation(1);
        auto two = std::make_shared<Dataset>(make_dataset(1, {-0.1, 0.1}));
        const std::vector<double> h1{0.4};
        const std::vector<double> l1{0.6};
        const std::array<double, 1> mode{0.0};     // |u| = 1/6, concave zone
        const std::array<double, 1> shoulder{0.45}; // |u| > 1/3, convex zone
        CHECK(bias_term(*two, k1, h1, l1, mode) < 0.0);
        CHECK(bias_term(*two, k1, h1, l1, shoulder) > 0.0);
    }

    SUBCASE("rejects nonpositive bandwidths") {
        const std::vector<double> bad{0.5, -0.5};
        const std::array<double, 2> origin{0.0, 0.0};
        CHECK_THROWS_AS((void)bias_term(*data, k2, bad, l, origin),
                        usage_error);
    }

    SUBCASE("bias-corrected estimator is the exact composition") {
        const auto plain = DensityEstimator::fit_plain(data, k2, h);
        const auto bc = DensityEstimator::fit_bias_corrected(data, k2, h, l);
        Rng rng(81);
        for (int q = 0; q < 25; ++q) {
            const std::array<double, 2> x{rng.uniform(-2.5, 2.5),
                                          rng.uniform(-2.5, 2.5)};
            const double lhs = bc.eval(x);
            const double rhs = plain.eval(x) - bias_term(*data, k2, h, l, x);
            CHECK(std::abs(lhs - rhs) <= 1e-15);
        }
    }
}

TEST_CASE("exact bootstrap mean") {
    const auto k2 = KernelSpec::simulation(2);
    auto data = gaussian_cloud(80, 17);
    const std::vector<double> h{0.5, 0.7};

    SUBCASE("degenerates to the plain estimate as g -> 0") {
        const std::vector<double> g{0.5e-9, 0.7e-9};
        const auto mean = DensityEstimator::fit_bootstrap_mean(data, k2, h, g);
        const auto plain = DensityEstimator::fit_plain(data, k2, h);
        Rng rng(5);
        for (int q = 0; q < 40; ++q) {
            const std::array<double, 2> x{rng.uniform(-2.0, 2.0),
                                          rng.uniform(-2.0, 2.0)};
            CHECK(std::abs(mean.eval(x) - plain.eval(x)) <= 1e-4);
        }
    }

    SUBCASE("support is the h+g inflation of the sample") {
        const std::vector<double> g{0.4, 0.4};
        const auto mean = DensityEstimator::fit_bootstrap_mean(data, k2, h, g);
        double max0 = -1e300;
        for (std::size_t i = 0; i < data->n; ++i)
            max0 = std::max(max0, data->coord(i, 0));
        const std::array<double, 2> x{max0 + h[0] + g[0] + 1e-6, 0.0};
        CHECK(mean.eval(x) == 0.0);
    }

    SUBCASE("integrates to one") {
        const std::vector<double> g{0.5, 0.5};
        const auto mean = DensityEstimator::fit_bootstrap_mean(data, k2, h, g);
        GridSpec grid;
        grid.lower = {-6.0, -6.0};
        grid.upper = {6.0, 6.0};
        grid.cells = {300, 300};
        const auto values = mean.eval_on_grid(grid, 4);
        double mass = 0.0;
        for (double v : values) mass += v;
        mass *= grid.step(0) * grid.step(1);
        CHECK(std::abs(mass - 1.0) <= 1e-3);
    }

    SUBCASE("free-function form agrees with the estimator") {
        const std::vector<double> g{0.3, 0.3};
        const auto mean = DensityEstimator::fit_bootstrap_mean(data, k2, h, g);
        const std::array<double, 2> x{0.25, -0.5};
        CHECK(bootstrap_mean_eval(*data, k2, h, g, x) ==
              doctest::Approx(mean.eval(x)).epsilon(1e-15));
    }
}

TEST_CASE("smoothed bootstrap sampler") {
    const auto k2 = KernelSpec::simulation(2);
    auto data = gaussian_cloud(60, 23);
    const std::vector<double> g{0.3, 0.5};

    SUBCASE("draws stay within the perturbation box") {
        Rng rng(1);
        const auto draws = sample_smoothed(*data, k2, g, 2000, rng);
        const double gmax = 0.5;
        for (std::size_t s = 0; s < draws.n; ++s) {
            double best = 1e300;
            for (std::size_t i = 0; i < data->n; ++i) {
                const double dx = std::abs(draws.coord(s, 0) - data->coord(i, 0));
                const double dy = std::abs(draws.coord(s, 1) - data->coord(i, 1));
                best = std::min(best, std::max(dx, dy));
            }
            CHECK(best <= gmax + 1e-12);
        }
    }

    SUBCASE("mean matches the data mean (kernel is mean-zero)") {
        Rng rng(2);
        const std::size_t m = 1000000;
        const auto draws = sample_smoothed(*data, k2, g, m, rng);
        for (int j = 0; j < 2; ++j) {
            double mean_data = 0.0;
            for (std::size_t i = 0; i < data->n; ++i)
                mean_data += data->coord(i, j);
            mean_data /= static_cast<double>(data->n);
            double mean_draws = 0.0;
            for (std::size_t s = 0; s < m; ++s) mean_draws += draws.coord(s, j);
            mean_draws /= static_cast<double>(m);
            // CLT bound: 3·sd/sqrt(m), sd of a draw <= sd(data) + g
            double var = 0.0;
            for (std::size_t i = 0; i < data->n; ++i) {
                const double d = data->coord(i, j) - mean_data;
                var += d * d;
            }
            var = var / static_cast<double>(data->n - 1);
            const double sd = std::sqrt(var) + g[static_cast<std::size_t>(j)];
            CHECK(std::abs(mean_draws - mean_data) <= 3.0 * sd / 1000.0);
        }
    }

    SUBCASE("fixed seed reproduces the sample exactly") {
        Rng r1(777), r2(777);
        const auto a = sample_smoothed(*data, k2, g, 500, r1);
        const auto b = sample_smoothed(*data, k2, g, 500, r2);
        CHECK(a.coords == b.coords);
    }

    SUBCASE("count of zero is rejected") {
        Rng rng(3);
        CHECK_THROWS_AS((void)sample_smoothed(*data, k2, g, 0, rng),
                        usage_error);
    }
}

TEST_CASE("inverse-CDF sampler passes a Kolmogorov-Smirnov test") {
    const auto k1 = KernelSpec::simulation(1);
    const ProfileSampler sampler(k1);

    const std::size_t n = 100000;
    std::vector<double> draws(n);
    Rng rng(424242);
    for (auto& d : draws) d = sampler.sample(rng.uniform01());
    std::sort(draws.begin(), draws.end());

    // reference CDF by independent quadrature of the profile
    auto cdf = [&](double t) {
        if (t <= -1.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return simpson([&](double u) { return k1.profile_value(u); }, -1.0, t,
                       2048);
    };
    double dstat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf(draws[i]);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        dstat = std::max(dstat, std::max(std::abs(F - lo), std::abs(hi - F)));
    }
    // asymptotic critical value at alpha = 0.01
    CHECK(dstat <= 1.6276 / std::sqrt(static_cast<double>(n)));
}
