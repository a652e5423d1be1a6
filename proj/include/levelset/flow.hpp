#pragma once

#include "levelset/geometry.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace levelset {

class DensityEstimator;

/// Differentiable 2-D scalar field for curve tracing.
struct DiffField2 {
    std::function<double(const Vec2&)> value;
    std::function<void(const Vec2&, double&, Vec2&)> value_and_grad;
};

struct FlowOptions {
    double step_frac = 1.0 / 64.0; ///< RK4 step as a fraction of |θ|
    double grad_floor = 1e-3;      ///< minimum usable gradient norm
    int max_steps = 4096;
    double level_tol = 1e-8;       ///< |field(endpoint) - c| target
    bool polish = true;            ///< 1-D Newton polish of the endpoint

    void validate() const;
};

enum class FlowStatus { hit, gradient_floor, budget_exceeded };

/// One integral curve of the scaled gradient field ∇f/‖∇f‖², along which
/// the field value changes at unit rate, so the hitting time of level c from
/// x₀ is θ = c - f(x₀) exactly.
struct CurveTrace {
    Vec2 seed{0.0, 0.0};
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<double> values; ///< field value at each stored position
    FlowStatus status = FlowStatus::hit;
    double theta = 0.0; ///< signed target time c - f(x₀)
};

/// Fixed-step RK4 along ∇f/‖∇f‖² from x0 for time θ = c - f(x₀), then a
/// Newton polish along the gradient until |f - c| <= level_tol. The run
/// stops with status gradient_floor when ‖∇f‖ drops below opts.grad_floor at
/// any evaluation point, and budget_exceeded when max_steps is exhausted.
/// Non-finite field or gradient values raise numeric_error (distinct from
/// the statuses, which are legitimate outcomes).
CurveTrace trace_to_level(const DiffField2& field, const Vec2& x0, double c,
                          const FlowOptions& opts = {});

/// (θ, endpoint) for a hit trace; for non-hit statuses, the stored point
/// minimising |f - c| together with its time (the argmin fallback).
std::pair<double, Vec2> hitting_point(const CurveTrace& tr);

/// Field adapter over a fitted 2-D estimator (plain or bias corrected).
DiffField2 estimator_field(std::shared_ptr<const DensityEstimator> est);

/// Trace dump for debugging and plots: t, x, y, f per stored step.
void save_trace_csv(const CurveTrace& tr, const std::string& path);

} // namespace levelset
