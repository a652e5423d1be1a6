#include "doctest.h"

#include "levelset/errors.hpp"
#include "levelset/flow.hpp"

#include <cmath>

using namespace levelset;

namespace {

DiffField2 paraboloid_field() {
    DiffField2 f;
    f.value = [](const Vec2& p) { return 1.0 - p[0] * p[0] - p[1] * p[1]; };
    f.value_and_grad = [](const Vec2& p, double& v, Vec2& g) {
        v = 1.0 - p[0] * p[0] - p[1] * p[1];
        g = {-2.0 * p[0], -2.0 * p[1]};
    };
    return f;
}

DiffField2 bowl_field() {
    // local minimum at the origin
    DiffField2 f;
    f.value = [](const Vec2& p) { return 0.1 + p[0] * p[0] + p[1] * p[1]; };
    f.value_and_grad = [](const Vec2& p, double& v, Vec2& g) {
        v = 0.1 + p[0] * p[0] + p[1] * p[1];
        g = {2.0 * p[0], 2.0 * p[1]};
    };
    return f;
}

} // namespace

TEST_CASE("seed already on the level") {
    const auto field = paraboloid_field();
    const auto tr = trace_to_level(field, {0.5, 0.0}, 0.75);
    CHECK(tr.status == FlowStatus::hit);
    CHECK(tr.theta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tr.positions.back()[0] == 0.5);
    CHECK(tr.positions.back()[1] == 0.0);
}

TEST_CASE("radial paraboloid trace") {
    const auto field = paraboloid_field();
    const auto tr = trace_to_level(field, {0.8, 0.0}, 0.75);
    REQUIRE(tr.status == FlowStatus::hit);
    CHECK(tr.theta == doctest::Approx(0.39).epsilon(1e-12));
    CHECK(std::abs(tr.positions.back()[0] - 0.5) <= 1e-7);
    CHECK(std::abs(tr.positions.back()[1]) <= 1e-12);

    const auto [theta, endpoint] = hitting_point(tr);
    CHECK(theta == doctest::Approx(0.39));
    CHECK(endpoint[0] == doctest::Approx(0.5).epsilon(1e-6));

    // θ sign convention: below the level positive, above negative
    CHECK(trace_to_level(field, {0.9, 0.0}, 0.75).theta > 0.0);
    CHECK(trace_to_level(field, {0.2, 0.0}, 0.75).theta < 0.0);
}

TEST_CASE("gradient floor at a spurious minimum") {
    const auto field = bowl_field();
    const auto tr = trace_to_level(field, {1e-5, 0.0}, 0.5);
    CHECK(tr.status == FlowStatus::gradient_floor);

    // argmin fallback returns the stored point closest to the level
    const auto [t, p] = hitting_point(tr);
    (void)t;
    double best = 1e300;
    for (std::size_t i = 0; i < tr.values.size(); ++i)
        best = std::min(best, std::abs(tr.values[i] - 0.5));
    CHECK(std::abs(field.value(p) - 0.5) == doctest::Approx(best));
}

TEST_CASE("non-finite field values raise") {
    DiffField2 bad;
    bad.value = [](const Vec2&) { return std::nan(""); };
    bad.value_and_grad = [](const Vec2&, double& v, Vec2& g) {
        v = std::nan("");
        g = {0.0, 0.0};
    };
    CHECK_THROWS_AS((void)trace_to_level(bad, {0.0, 0.0}, 1.0), numeric_error);
}

TEST_CASE("time-height identity along stored steps") {
    const auto field = paraboloid_field();
    for (const Vec2 seed : {Vec2{0.8, 0.0}, Vec2{0.3, 0.55}, Vec2{-0.6, 0.31}}) {
        const auto tr = trace_to_level(field, seed, 0.75);
        REQUIRE(tr.status == FlowStatus::hit);
        const double f0 = tr.values.front();
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            CHECK(std::abs(tr.values[i] - f0 - tr.times[i]) <=
                  1e-4 * std::abs(tr.theta));
    }
}

TEST_CASE("RK4 order on the radial oracle") {
    const auto field = paraboloid_field();
    FlowOptions opts;
    opts.polish = false;
    opts.level_tol = 1e-14;

    auto endpoint_error = [&](double frac) {
        opts.step_frac = frac;
        const auto tr = trace_to_level(field, {0.8, 0.0}, 0.75, opts);
        // analytic endpoint: radius shrinks along the ray to 0.5
        return std::hypot(tr.positions.back()[0] - 0.5,
                          tr.positions.back()[1]);
    };
    const double e8 = endpoint_error(1.0 / 8.0);
    const double e16 = endpoint_error(1.0 / 16.0);
    const double e32 = endpoint_error(1.0 / 32.0);
    CHECK(e8 / e16 >= 8.0);
    CHECK(e16 / e32 >= 8.0);
}

TEST_CASE("traces are bitwise deterministic") {
    const auto field = paraboloid_field();
    const auto a = trace_to_level(field, {0.77, 0.13}, 0.75);
    const auto b = trace_to_level(field, {0.77, 0.13}, 0.75);
    REQUIRE(a.positions.size() == b.positions.size());
    for (std::size_t i = 0; i < a.positions.size(); ++i) {
        CHECK(a.positions[i][0] == b.positions[i][0]);
        CHECK(a.positions[i][1] == b.positions[i][1]);
        CHECK(a.times[i] == b.times[i]);
    }
}

TEST_CASE("flow options are validated") {
    const auto field = paraboloid_field();
    FlowOptions opts;
    opts.step_frac = 0.5; // above the 1/8 cap
    CHECK_THROWS_AS((void)trace_to_level(field, {0.8, 0.0}, 0.75, opts),
                    usage_error);
}
