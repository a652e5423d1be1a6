#include "doctest.h"

#include "levelset/errors.hpp"
#include "levelset/evt.hpp"
#include "levelset/models.hpp"
#include "levelset/rng.hpp"

#include <cmath>
#include <numbers>

using namespace levelset;

namespace {

EvtInputs base_inputs() {
    EvtInputs in;
    in.d = 2;
    in.n = 5000;
    in.h_eff = 0.2;
    in.alpha = 0.1;
    in.c = 0.0795774715459477;
    in.kconst = KernelSpec::simulation(2).constants();
    in.surface_measure = 2.0 * std::numbers::pi;
    return in;
}

// long-double re-evaluation of Eq. (2.2)/(2.3) with the same inputs
long double b_hat_oracle(const EvtInputs& in) {
    const long double d = in.d;
    const long double L = std::log(1.0L / static_cast<long double>(in.h_eff));
    const long double z =
        -std::log(-0.5L * std::log(1.0L - static_cast<long double>(in.alpha)));
    const long double s_k =
        std::sqrt(static_cast<long double>(in.kconst.s_k_sq));
    const long double lead = std::sqrt(2.0L * (d - 1.0L) * L);
    const long double inner =
        z + (d / 2.0L - 1.0L) * std::log(L) +
        std::log(std::pow(2.0L * d - 2.0L, d / 2.0L - 1.0L) *
                 std::pow(s_k, d - 1.0L) /
                 (std::sqrt(2.0L) *
                  std::pow(static_cast<long double>(std::numbers::pi), d / 2.0L)) *
                 static_cast<long double>(in.surface_measure));
    return lead + inner / lead;
}

long double a_hat_oracle(const EvtInputs& in) {
    const long double nhd = static_cast<long double>(in.n) *
                            std::pow(static_cast<long double>(in.h_eff), in.d);
    return b_hat_oracle(in) *
           std::sqrt(static_cast<long double>(in.kconst.l2_norm_sq) *
                     static_cast<long double>(in.c)) /
           std::sqrt(nhd);
}

} // namespace

TEST_CASE("z of alpha") {
    CHECK(std::abs(z_of_alpha(1.0 - std::exp(-2.0))) <= 1e-12);
    // 40-digit evaluation of the closed form at alpha = 0.1
    CHECK(z_of_alpha(0.1) ==
          doctest::Approx(2.9435145078723906).epsilon(1e-12));
    // strictly decreasing in alpha: tighter confidence needs a larger
    // quantile
    double prev = 1e300;
    for (int i = 1; i <= 99; ++i) {
        const double z = z_of_alpha(static_cast<double>(i) / 100.0);
        CHECK(z < prev);
        prev = z;
    }
    CHECK_THROWS_AS((void)z_of_alpha(0.0), usage_error);
    CHECK_THROWS_AS((void)z_of_alpha(1.5), usage_error);
}

TEST_CASE("b_hat against the formula oracle") {
    auto in = base_inputs();
    // frozen 40-digit value for h=0.2, alpha=0.1, V = 2π, exact s_K
    CHECK(b_hat(in) == doctest::Approx(3.9262560514382144).epsilon(1e-9));
    CHECK(std::abs(static_cast<double>(b_hat_oracle(in)) - b_hat(in)) <=
          1e-12 * b_hat(in));

    // d=2 algebraic reduction: leading coefficient (2d-2)^{d/2-1} = 1 and a
    // vanishing loglog term
    CHECK(std::pow(2.0 * 2 - 2.0, 2.0 / 2.0 - 1.0) == 1.0);
    CHECK(2.0 / 2.0 - 1.0 == 0.0);
    const double L = std::log(1.0 / in.h_eff);
    const double s_k = std::sqrt(in.kconst.s_k_sq);
    const double reduced =
        std::sqrt(2.0 * L) +
        (z_of_alpha(in.alpha) +
         std::log(s_k * in.surface_measure /
                  (std::sqrt(2.0) * std::numbers::pi))) /
            std::sqrt(2.0 * L);
    CHECK(b_hat(in) == doctest::Approx(reduced).epsilon(1e-12));

    // and the generic Gumbel quantile specialisation
    const double generic = gumbel_sup_quantile(
        in.d - 1, L, z_of_alpha(in.alpha),
        std::pow(s_k, in.d - 1) * in.surface_measure);
    CHECK(b_hat(in) == doctest::Approx(generic).epsilon(1e-12));

    // monotone in the surface measure
    double prev = 0.0;
    for (int i = 1; i <= 10; ++i) {
        auto vi = in;
        vi.surface_measure = 0.5 * i;
        const double b = b_hat(vi);
        CHECK(b > prev);
        prev = b;
    }

    auto bad = in;
    bad.h_eff = 1.0;
    CHECK_THROWS_AS((void)b_hat(bad), numeric_error);
}

TEST_CASE("a_hat") {
    SUBCASE("d=1 with a single contour point") {
        EvtInputs in;
        in.d = 1;
        in.n = 400;
        in.h_eff = 0.3;
        in.alpha = 0.1;
        in.c = 0.12;
        in.kconst = KernelSpec::simulation(1).constants();
        in.n_hat = 1;
        const double phi_inv_09 = 1.2815515655446004;
        const double expect =
            phi_inv_09 * std::sqrt(in.kconst.l2_norm_sq * in.c /
                                   (static_cast<double>(in.n) * in.h_eff));
        CHECK(a_hat(in) == doctest::Approx(expect).epsilon(1e-9));

        in.n_hat = 2; // quantile level becomes (1-α)^{1/2}
        CHECK(a_hat(in) > expect);
    }

    SUBCASE("scales as (n h^d)^{-1/2}") {
        auto in = base_inputs();
        const double a1 = a_hat(in);
        in.n *= 4;
        CHECK(a1 / a_hat(in) == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("50 random valid inputs match the long-double oracle to 1e-12") {
        Rng rng(515151);
        for (int q = 0; q < 50; ++q) {
            auto in = base_inputs();
            in.h_eff = rng.uniform(0.05, 0.95);
            in.alpha = rng.uniform(0.01, 0.5);
            in.n = 100 + rng.uniform_index(100000);
            in.c = rng.uniform(0.001, 0.3);
            in.surface_measure = rng.uniform(0.5, 30.0);
            const double got = a_hat(in);
            CHECK(std::abs(static_cast<double>(a_hat_oracle(in)) - got) <=
                  1e-12 * got);
        }
    }

    SUBCASE("quantile monotonicity in alpha implies nested regions") {
        auto in = base_inputs();
        double prev = 1e300;
        for (double alpha : {0.05, 0.1, 0.2, 0.5}) {
            in.alpha = alpha;
            const double a = a_hat(in);
            CHECK(a > 0.0);
            CHECK(a < prev);
            prev = a;
        }
    }
}

TEST_CASE("large-sample region construction") {
    const auto model = TrueModel::elliptic(1.0);
    Rng rng(777);
    auto data = std::make_shared<Dataset>(model.sample(4000, rng));
    const auto kernel = KernelSpec::simulation(2);
    // deliberately sub-1 bandwidths so the construction is defined
    auto bc = std::make_shared<DensityEstimator>(
        DensityEstimator::fit_bias_corrected(data, kernel, {0.8, 0.8},
                                             {1.1, 1.1}));
    const double c = model.level_of_probability(0.5);
    GridSpec grid;
    grid.lower = {-4.0, -4.0};
    grid.upper = {4.0, 4.0};
    grid.cells = {192, 192};

    const auto ls = build_cn1(bc, grid, c, 0.1, 2);
    CHECK(ls.a > 0.0);
    CHECK(!ls.contour.empty());

    // nesting of the pair: inner ⊆ outer on a probe raster
    const auto ri = rasterize(ls.pair.inner, grid, 2);
    const auto ro = rasterize(ls.pair.outer, grid, 2);
    for (std::size_t i = 0; i < ri.size(); ++i)
        if (ri[i]) CHECK(ro[i]);

    // width strictly decreasing in alpha
    double prev_width = 1e300;
    for (double alpha : {0.05, 0.1, 0.2}) {
        const auto region = build_cn1(bc, grid, c, alpha, 2);
        const auto& band = std::get<VerticalBand>(region.band.shape);
        const double width = band.hi - band.lo;
        CHECK(width < prev_width);
        prev_width = width;
    }

    // level above the estimator maximum: no contour, explicit error
    CHECK_THROWS_AS((void)build_cn1(bc, grid, 1.0, 0.1, 2), numeric_error);

    // h_eff >= 1 is rejected
    auto wide = std::make_shared<DensityEstimator>(
        DensityEstimator::fit_bias_corrected(data, kernel, {1.3, 1.3},
                                             {1.5, 1.5}));
    CHECK_THROWS_AS((void)build_cn1(wide, grid, c, 0.1, 2), numeric_error);
}
