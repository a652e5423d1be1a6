#pragma once

#include <functional>

namespace levelset {

/// Adaptive Gauss-Legendre integration of f over [a, b] to absolute
/// tolerance `abs_tol`. Order-20 panels, bisected while the two-half vs
/// whole-panel discrepancy exceeds the locally apportioned tolerance.
/// Throws numeric_error when the recursion depth limit is hit before the
/// tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

/// Single order-20 Gauss-Legendre panel over [a, b] (exact for polynomial
/// integrands up to degree 39).
double gauss20(const std::function<double(double)>& f, double a, double b);

} // namespace levelset
