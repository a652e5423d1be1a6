#include "levelset/quadrature.hpp"

#include "levelset/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

namespace levelset {

namespace {

using gauss_rule = boost::math::quadrature::gauss<double, 20>;

double panel(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    // boost::math::quadrature::gauss stores the nonnegative half of the
    // symmetric node set; node 0 is the origin for odd orders only.
    double sum = 0.0;
    const auto& abscissa = gauss_rule::abscissa();
    const auto& weights = gauss_rule::weights();
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        const double dx = half * abscissa[i];
        if (abscissa[i] == 0.0) {
            sum += weights[i] * f(mid);
        } else {
            sum += weights[i] * (f(mid - dx) + f(mid + dx));
        }
    }
    return sum * half;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = panel(f, a, mid);
    const double right = panel(f, mid, b);
    const double delta = left + right - whole;
    if (std::abs(delta) <= tol) return left + right;
    if (depth <= 0)
        throw numeric_error("quadrature did not converge to tolerance");
    return adaptive(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive(f, mid, b, right, 0.5 * tol, depth - 1);
}

} // namespace

double gauss20(const std::function<double(double)>& f, double a, double b) {
    return panel(f, a, b);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
    if (!(b > a)) return 0.0;
    return adaptive(f, a, b, panel(f, a, b), abs_tol, 40);
}

} // namespace levelset
