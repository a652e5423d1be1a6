#include "doctest.h"

#include "levelset/errors.hpp"
#include "levelset/kernel.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <functional>
#include <vector>

using namespace levelset;

namespace {

// Independent quadrature oracle: composite Simpson, no shared code with the
// library's adaptive Gauss-Legendre path.
double simpson(const std::function<double(double)>& f, double a, double b,
               int intervals = 1 << 14) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i)
        sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double profile_oracle(double u) {
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return (693.0 / 512.0) * w * w * w * w * w;
}

} // namespace

TEST_CASE("simulation kernel point evaluation") {
    const auto k2 = KernelSpec::simulation(2);

    const std::array<double, 2> origin{0.0, 0.0};
    CHECK(k2.eval(origin) == doctest::Approx((693.0 / 512.0) * (693.0 / 512.0))
                                 .epsilon(1e-14));

    const std::array<double, 2> outside{1.5, 0.0};
    CHECK(k2.eval(outside) == 0.0);

    const std::array<double, 2> a{0.3, -0.3};
    const std::array<double, 2> b{-0.3, 0.3};
    CHECK(k2.eval(a) == doctest::Approx(k2.eval(b)).epsilon(1e-15));

    const std::array<double, 3> wrong{0.1, 0.1, 0.1};
    CHECK_THROWS_AS((void)k2.eval(wrong), usage_error);
}

TEST_CASE("simulation kernel derivatives") {
    const auto k2 = KernelSpec::simulation(2);

    std::array<double, 2> g{};
    k2.grad(std::array<double, 2>{0.0, 0.0}, g);
    CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-15));

    // central finite differences, step 1e-5
    const std::array<double, 2> x{0.2, 0.4};
    k2.grad(x, g);
    const double step = 1e-5;
    for (int j = 0; j < 2; ++j) {
        auto xp = x;
        auto xm = x;
        xp[static_cast<std::size_t>(j)] += step;
        xm[static_cast<std::size_t>(j)] -= step;
        const double fd = (k2.eval(xp) - k2.eval(xm)) / (2.0 * step);
        CHECK(std::abs(g[static_cast<std::size_t>(j)] - fd) <=
              1e-6 * std::abs(fd));
    }

    std::array<double, 4> hess{};
    k2.hessian(std::array<double, 2>{0.37, -0.58}, hess);
    CHECK(hess[1] == hess[2]);
}

TEST_CASE("simulation kernel constants") {
    const auto k2 = KernelSpec::simulation(2);
    const auto& c = k2.constants();

    CHECK(std::abs(c.integral - 1.0) <= 1e-6);
    // analytic second moment of the normalized (1-u²)^5 profile: 1/(2·5+3)
    CHECK(c.mu2 == doctest::Approx(1.0 / 13.0).epsilon(1e-9));
    CHECK(c.mu2 ==
          doctest::Approx(simpson([](double u) { return u * u * profile_oracle(u); },
                                  -1.0, 1.0))
              .epsilon(1e-9));

    // d=2 L2 norm equals the squared 1-D value; oracle by Simpson
    const double r1 =
        simpson([](double u) { return profile_oracle(u) * profile_oracle(u); },
                -1.0, 1.0);
    CHECK(c.l2_norm_sq == doctest::Approx(r1 * r1).epsilon(1e-9));
    CHECK(c.l2_norm_sq == doctest::Approx(0.98056688102231896).epsilon(1e-9));

    CHECK(c.s_k_sq * 2.0 * c.l2_norm_sq == c.deriv_l2_norm_sq);
    CHECK(c.s_k_sq == doctest::Approx(35.0 / 12.0).epsilon(1e-9));

    CHECK(c.integral > 0.0);
    CHECK(c.l2_norm_sq > 0.0);
    CHECK(c.deriv_l2_norm_sq > 0.0);
    CHECK(c.mu2 > 0.0);

    // repeated construction is bitwise identical
    const auto again = KernelSpec::simulation(2).constants();
    CHECK(std::memcmp(&c, &again, sizeof(KernelConstants)) == 0);
}

TEST_CASE("registered kernels satisfy the kernel contract") {
    Polynomial biweight; // 15/16 (1-u²)²
    biweight.coeffs = {15.0 / 16.0, 0.0, -30.0 / 16.0, 0.0, 15.0 / 16.0};
    const std::vector<KernelSpec> kernels = {
        KernelSpec::simulation(1), KernelSpec::simulation(2),
        KernelSpec(2, biweight)};

    for (const auto& k : kernels) {
        CHECK(std::abs(k.constants().integral - 1.0) <= 1e-6);

        // derivative consistency at interior points (>= 0.05 from the edge)
        const double pts[] = {-0.9, -0.55, -0.2, 0.05, 0.35, 0.7, 0.95};
        std::vector<double> x(static_cast<std::size_t>(k.dim()), 0.0);
        std::vector<double> g(static_cast<std::size_t>(k.dim()), 0.0);
        std::vector<double> h(static_cast<std::size_t>(k.dim() * k.dim()), 0.0);
        for (double p : pts) {
            for (int j = 0; j < k.dim(); ++j)
                x[static_cast<std::size_t>(j)] =
                    p * (j % 2 == 0 ? 1.0 : -0.8);
            k.grad(x, g);
            k.hessian(x, h);
            const double step = 1e-5;
            for (int j = 0; j < k.dim(); ++j) {
                auto xp = x;
                auto xm = x;
                xp[static_cast<std::size_t>(j)] += step;
                xm[static_cast<std::size_t>(j)] -= step;
                const double fd = (k.eval(xp) - k.eval(xm)) / (2.0 * step);
                const double scale = std::max(std::abs(fd), 1e-3);
                CHECK(std::abs(g[static_cast<std::size_t>(j)] - fd) <=
                      1e-5 * scale);
                std::vector<double> gp(g.size()), gm(g.size());
                k.grad(xp, gp);
                k.grad(xm, gm);
                for (int m = 0; m < k.dim(); ++m) {
                    const double fd2 =
                        (gp[static_cast<std::size_t>(m)] -
                         gm[static_cast<std::size_t>(m)]) /
                        (2.0 * step);
                    const double s2 = std::max(std::abs(fd2), 1e-3);
                    CHECK(std::abs(h[static_cast<std::size_t>(j * k.dim() + m)] -
                                   fd2) <= 1e-5 * s2);
                }
            }
        }
    }
}

TEST_CASE("convolved profile") {
    const auto k = KernelSpec::simulation(2);

    SUBCASE("support and mass") {
        const double h = 0.4, g = 0.25;
        const auto tab = convolved_profile(k, h, g);
        CHECK(tab(h + g + 1e-9) == 0.0);
        CHECK(tab(-(h + g) - 1e-9) == 0.0);
        CHECK(tab(2.0) == 0.0);

        // trapezoid over the table — independent of the table construction
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < tab.values.size(); ++i)
            mass += 0.5 * (tab.values[i] + tab.values[i + 1]) * tab.dx;
        CHECK(std::abs(mass - 1.0) <= 1e-6);
    }

    SUBCASE("h=g table is symmetric, maximal at zero, matches quadrature") {
        const double h = 0.3;
        const auto tab = convolved_profile(k, h, h);
        for (double t : {0.05, 0.17, 0.33, 0.49}) {
            CHECK(tab(t) == doctest::Approx(tab(-t)).epsilon(1e-12));
            CHECK(tab(0.0) >= tab(t));
        }
        // quadrature oracle at 11 points
        for (int i = 0; i <= 10; ++i) {
            const double t = -0.55 + 0.11 * i;
            const double lo = std::max(-h, t - h);
            const double hi = std::min(h, t + h);
            double oracle = 0.0;
            if (hi > lo)
                oracle = simpson(
                    [&](double u) {
                        return profile_oracle(u / h) * profile_oracle((t - u) / h) /
                               (h * h);
                    },
                    lo, hi, 4096);
            // knot values are exact; the gap is linear-interpolation error
            CHECK(std::abs(tab(t) - oracle) <= 2e-6);
        }
    }

    SUBCASE("rejects nonpositive bandwidths") {
        CHECK_THROWS_AS((void)convolved_profile(k, 0.0, 0.1), usage_error);
        CHECK_THROWS_AS((void)convolved_profile(k, 0.1, -1.0), usage_error);
    }
}
