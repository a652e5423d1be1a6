#include "levelset/flow.hpp"

#include "levelset/density.hpp"
#include "levelset/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace levelset {

void FlowOptions::validate() const {
    if (!(step_frac > 0.0) || step_frac > 1.0 / 8.0)
        throw usage_error("flow: step_frac must be in (0, 1/8]");
    if (!(grad_floor > 0.0)) throw usage_error("flow: grad_floor must be positive");
    if (max_steps <= 0) throw usage_error("flow: max_steps must be positive");
    if (!(level_tol > 0.0)) throw usage_error("flow: level_tol must be positive");
}

namespace {

struct Eval {
    double value;
    Vec2 grad;
    double grad_norm_sq;
};

Eval evaluate(const DiffField2& field, const Vec2& x) {
    Eval e{};
    field.value_and_grad(x, e.value, e.grad);
    if (!std::isfinite(e.value) || !std::isfinite(e.grad[0]) ||
        !std::isfinite(e.grad[1]))
        throw numeric_error("flow: non-finite field or gradient value");
    e.grad_norm_sq = e.grad[0] * e.grad[0] + e.grad[1] * e.grad[1];
    return e;
}

} // namespace

CurveTrace trace_to_level(const DiffField2& field, const Vec2& x0, double c,
                          const FlowOptions& opts) {
    opts.validate();
    CurveTrace tr;
    tr.seed = x0;

    Eval e0 = evaluate(field, x0);
    tr.theta = c - e0.value;
    tr.times.push_back(0.0);
    tr.positions.push_back(x0);
    tr.values.push_back(e0.value);

    const double floor_sq = opts.grad_floor * opts.grad_floor;
    if (std::abs(tr.theta) <= opts.level_tol) {
        tr.status = FlowStatus::hit;
        return tr;
    }
    if (e0.grad_norm_sq < floor_sq) {
        tr.status = FlowStatus::gradient_floor;
        return tr;
    }

    const double dt_mag = opts.step_frac * std::abs(tr.theta);
    const double sign = tr.theta > 0.0 ? 1.0 : -1.0;
    Vec2 x = x0;
    double t = 0.0;
    int steps = 0;
    bool floored = false;

    auto rhs = [&](const Vec2& p, Vec2& out) {
        const Eval e = evaluate(field, p);
        if (e.grad_norm_sq < floor_sq) {
            floored = true;
            out = {0.0, 0.0};
            return;
        }
        out = {e.grad[0] / e.grad_norm_sq, e.grad[1] / e.grad_norm_sq};
    };

    const int planned =
        static_cast<int>(std::ceil(std::abs(tr.theta) / dt_mag - 1e-9));
    for (int s = 0; s < planned; ++s) {
        if (steps >= opts.max_steps) {
            tr.status = FlowStatus::budget_exceeded;
            return tr;
        }
        // last step lands exactly on θ
        const double dt =
            (s + 1 == planned) ? (tr.theta - t)
                               : sign * std::min(dt_mag, std::abs(tr.theta - t));

        Vec2 k1, k2, k3, k4;
        rhs(x, k1);
        if (floored) break;
        rhs({x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]}, k2);
        if (floored) break;
        rhs({x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]}, k3);
        if (floored) break;
        rhs({x[0] + dt * k3[0], x[1] + dt * k3[1]}, k4);
        if (floored) break;

        x[0] += dt / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]);
        x[1] += dt / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]);
        t = (s + 1 == planned) ? tr.theta : t + dt;
        ++steps;

        const Eval e = evaluate(field, x);
        tr.times.push_back(t);
        tr.positions.push_back(x);
        tr.values.push_back(e.value);
        if (e.grad_norm_sq < floor_sq && s + 1 < planned) {
            tr.status = FlowStatus::gradient_floor;
            return tr;
        }
    }
    if (floored) {
        tr.status = FlowStatus::gradient_floor;
        return tr;
    }

    // Newton polish along the gradient direction
    if (opts.polish) {
        for (int it = 0; it < 64; ++it) {
            const Eval e = evaluate(field, x);
            const double r = e.value - c;
            if (std::abs(r) <= opts.level_tol) break;
            if (e.grad_norm_sq < floor_sq) {
                tr.status = FlowStatus::gradient_floor;
                tr.positions.back() = x;
                tr.values.back() = e.value;
                return tr;
            }
            x[0] -= r * e.grad[0] / e.grad_norm_sq;
            x[1] -= r * e.grad[1] / e.grad_norm_sq;
            if (++steps >= opts.max_steps + 64) break;
        }
        const Eval e = evaluate(field, x);
        tr.positions.back() = x;
        tr.values.back() = e.value;
        if (std::abs(e.value - c) > opts.level_tol) {
            tr.status = FlowStatus::budget_exceeded;
            return tr;
        }
    } else {
        const Eval e = evaluate(field, x);
        if (std::abs(e.value - c) > opts.level_tol) {
            tr.status = FlowStatus::budget_exceeded;
            return tr;
        }
    }
    tr.status = FlowStatus::hit;
    return tr;
}

std::pair<double, Vec2> hitting_point(const CurveTrace& tr) {
    if (tr.positions.empty())
        throw usage_error("hitting_point: empty trace");
    if (tr.status == FlowStatus::hit)
        return {tr.theta, tr.positions.back()};
    // argmin |f - c| over the stored trace; the target level is f(x0) + θ
    const double c = tr.values.front() + tr.theta;
    std::size_t best = 0;
    double best_err = std::abs(tr.values[0] - c);
    for (std::size_t i = 1; i < tr.values.size(); ++i) {
        const double err = std::abs(tr.values[i] - c);
        if (err < best_err) {
            best_err = err;
            best = i;
        }
    }
    return {tr.times[best], tr.positions[best]};
}

void save_trace_csv(const CurveTrace& tr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write trace file: " + path);
    out << "t,x,y,f\n";
    char buf[170];
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                      tr.times[i], tr.positions[i][0], tr.positions[i][1],
                      tr.values[i]);
        out << buf;
    }
    if (!out) throw io_error("failed writing trace file: " + path);
}

DiffField2 estimator_field(std::shared_ptr<const DensityEstimator> est) {
    if (!est) throw usage_error("estimator_field: null estimator");
    if (est->dim() != 2)
        throw usage_error("estimator_field: 2-D estimators only");
    DiffField2 f;
    f.value = [est](const Vec2& p) { return est->eval(p); };
    f.value_and_grad = [est](const Vec2& p, double& v, Vec2& g) {
        est->value_and_grad(p, v, g);
    };
    return f;
}

} // namespace levelset
