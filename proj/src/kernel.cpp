#include "levelset/kernel.hpp"

#include "levelset/errors.hpp"
#include "levelset/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace levelset {

KernelSpec::KernelSpec(int dim, Polynomial profile) : dim_(dim) {
    if (dim < 1) throw usage_error("kernel dimension must be >= 1");
    derivs_.reserve(5);
    derivs_.push_back(std::move(profile));
    for (int o = 1; o <= 4; ++o)
        derivs_.push_back(derivs_.back().derivative());

    const auto& k = derivs_[0];
    // Evenness and nonnegativity on the support.
    for (int i = 0; i <= 64; ++i) {
        const double u = static_cast<double>(i) / 64.0;
        const double v = k(u);
        if (std::abs(v - k(-u)) > 1e-12)
            throw usage_error("kernel profile must be symmetric about zero");
        if (v < -1e-12)
            throw usage_error("kernel profile must be nonnegative on [-1,1]");
    }

    const double tol = 1e-9;
    const double m0 = integrate([&](double u) { return k(u); }, -1.0, 1.0, tol);
    if (std::abs(m0 - 1.0) > 1e-6)
        throw usage_error("kernel profile must integrate to 1 on [-1,1]");
    const double r0 =
        integrate([&](double u) { return k(u) * k(u); }, -1.0, 1.0, tol);
    const auto& kp = derivs_[1];
    const double r1 =
        integrate([&](double u) { return kp(u) * kp(u); }, -1.0, 1.0, tol);
    const double m2 =
        integrate([&](double u) { return u * u * k(u); }, -1.0, 1.0, tol);

    // Product structure: d-dimensional functionals from the 1-D pieces.
    constants_.integral = std::pow(m0, dim);
    constants_.l2_norm_sq = std::pow(r0, dim);
    constants_.deriv_l2_norm_sq = r1 * std::pow(r0, dim - 1);
    constants_.s_k_sq =
        constants_.deriv_l2_norm_sq / (2.0 * constants_.l2_norm_sq);
    constants_.mu2 = m2 * std::pow(m0, dim - 1);
    if (!(constants_.l2_norm_sq > 0.0) || !(constants_.deriv_l2_norm_sq > 0.0) ||
        !(constants_.s_k_sq > 0.0) || !(constants_.mu2 > 0.0))
        throw numeric_error("kernel constants must be strictly positive");
}

KernelSpec KernelSpec::simulation(int dim) {
    // (693/512)(1-u²)⁵ = A(1 - 5u² + 10u⁴ - 10u⁶ + 5u⁸ - u¹⁰)
    const double a = 693.0 / 512.0;
    Polynomial p;
    p.coeffs = {a, 0.0, -5.0 * a, 0.0, 10.0 * a, 0.0,
                -10.0 * a, 0.0, 5.0 * a, 0.0, -a};
    return KernelSpec(dim, std::move(p));
}

KernelSpec KernelSpec::by_name(const std::string& name) {
    if (name == "sim1d") return simulation(1);
    if (name == "sim2d") return simulation(2);
    if (name == "sim3d") return simulation(3);
    throw usage_error("unknown kernel: " + name);
}

double KernelSpec::profile_value(double u) const {
    return std::abs(u) > 1.0 ? 0.0 : derivs_[0](u);
}

double KernelSpec::profile_deriv(double u, int order) const {
    if (order < 0 || order > 4) throw usage_error("profile derivative order must be 0..4");
    return std::abs(u) > 1.0 ? 0.0 : derivs_[static_cast<std::size_t>(order)](u);
}

double KernelSpec::eval(std::span<const double> u) const {
    if (static_cast<int>(u.size()) != dim_)
        throw usage_error("kernel eval: dimension mismatch");
    double prod = 1.0;
    for (double uj : u) {
        if (std::abs(uj) > 1.0) return 0.0;
        prod *= derivs_[0](uj);
    }
    return prod;
}

void KernelSpec::grad(std::span<const double> u, std::span<double> out) const {
    if (static_cast<int>(u.size()) != dim_ ||
        static_cast<int>(out.size()) != dim_)
        throw usage_error("kernel grad: dimension mismatch");
    for (double uj : u) {
        if (std::abs(uj) > 1.0) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
    }
    for (int j = 0; j < dim_; ++j) {
        double prod = 1.0;
        for (int m = 0; m < dim_; ++m)
            prod *= (m == j) ? derivs_[1](u[m]) : derivs_[0](u[m]);
        out[j] = prod;
    }
}

void KernelSpec::hessian(std::span<const double> u, std::span<double> out) const {
    const auto d = static_cast<std::size_t>(dim_);
    if (u.size() != d || out.size() != d * d)
        throw usage_error("kernel hessian: dimension mismatch");
    for (double uj : u) {
        if (std::abs(uj) > 1.0) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double prod = 1.0;
            for (std::size_t m = 0; m < d; ++m) {
                int order = (m == i ? 1 : 0) + (m == j ? 1 : 0);
                prod *= derivs_[static_cast<std::size_t>(order)](u[m]);
            }
            out[i * d + j] = prod;
            out[j * d + i] = prod;
        }
    }
}

Tabulated1D convolved_profile(const KernelSpec& k, double h, double g,
                              int knots) {
    if (!(h > 0.0) || !(g > 0.0))
        throw usage_error("convolved_profile: bandwidths must be positive");
    if (knots < 3) throw usage_error("convolved_profile: needs >= 3 knots");
    Tabulated1D tab;
    const double half = h + g;
    tab.lo = -half;
    tab.dx = 2.0 * half / static_cast<double>(knots - 1);
    tab.values.resize(static_cast<std::size_t>(knots), 0.0);
    const double inv_hg = 1.0 / (h * g);
    for (int i = 0; i < knots; ++i) {
        const double t = tab.lo + tab.dx * i;
        const double a = std::max(-h, t - g);
        const double b = std::min(h, t + g);
        if (b <= a) continue;
        // Polynomial integrand on the overlap: a single high-order panel is exact.
        tab.values[static_cast<std::size_t>(i)] = gauss20(
            [&](double u) {
                return inv_hg * k.profile_value(u / h) *
                       k.profile_value((t - u) / g);
            },
            a, b);
    }
    tab.values.front() = 0.0;
    tab.values.back() = 0.0;
    return tab;
}

ProfileSampler::ProfileSampler(const KernelSpec& k, int knots) {
    if (knots < 2) throw usage_error("profile sampler: needs >= 2 knots");
    lo_ = -1.0;
    dx_ = 2.0 / static_cast<double>(knots);
    cdf_.resize(static_cast<std::size_t>(knots) + 1, 0.0);
    for (int i = 0; i < knots; ++i) {
        const double a = lo_ + dx_ * i;
        const double b = a + dx_;
        cdf_[static_cast<std::size_t>(i) + 1] =
            cdf_[static_cast<std::size_t>(i)] +
            gauss20([&](double u) { return k.profile_value(u); }, a, b);
    }
    const double total = cdf_.back();
    for (auto& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double ProfileSampler::sample(double u01) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u01);
    std::size_t i = it == cdf_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - cdf_.begin()) - 1;
    if (i >= cdf_.size() - 1) i = cdf_.size() - 2;
    const double c0 = cdf_[i];
    const double c1 = cdf_[i + 1];
    const double w = c1 > c0 ? (u01 - c0) / (c1 - c0) : 0.0;
    return lo_ + dx_ * (static_cast<double>(i) + w);
}

double ProfileSampler::cdf(double t) const {
    const double s = (t - lo_) / dx_;
    if (s <= 0.0) return 0.0;
    if (s >= static_cast<double>(cdf_.size() - 1)) return 1.0;
    const auto i = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(i);
    return cdf_[i] + w * (cdf_[i + 1] - cdf_[i]);
}

} // namespace levelset
