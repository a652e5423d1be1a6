#pragma once

#include <span>
#include <string>
#include <vector>

namespace levelset {

/// Dense 1-D polynomial, coeffs[k] is the u^k coefficient.
struct Polynomial {
    std::vector<double> coeffs;

    double operator()(double u) const {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * u + coeffs[i];
        return acc;
    }

    Polynomial derivative() const {
        Polynomial d;
        if (coeffs.size() <= 1) {
            d.coeffs = {0.0};
            return d;
        }
        d.coeffs.resize(coeffs.size() - 1);
        for (std::size_t i = 1; i < coeffs.size(); ++i)
            d.coeffs[i - 1] = static_cast<double>(i) * coeffs[i];
        return d;
    }
};

/// Scalar functionals of the kernel entering the quantile formulas.
/// All values are for the d-dimensional product kernel.
struct KernelConstants {
    double integral;         ///< ∫ K(u) du, must equal 1
    double l2_norm_sq;       ///< ‖K‖₂² = ∫ K²(u) du
    double deriv_l2_norm_sq; ///< ∫ [∂K/∂u₁]²(u) du
    double s_k_sq;           ///< deriv_l2_norm_sq / (2 · l2_norm_sq)
    double mu2;              ///< ∫ u₁² K(u) du
};

/// Product kernel K(u) = ∏_j k(u_j) with a common even polynomial profile k
/// supported on [-1, 1]. Immutable after construction; all methods are safe
/// for unrestricted concurrent use.
///
/// Construction validates the profile (unit mass within 1e-6, evenness,
/// nonnegativity on the support) and computes the constants once by adaptive
/// Gauss-Legendre quadrature (abs. tol 1e-9); repeated constants() calls
/// return the same bits.
class KernelSpec {
public:
    KernelSpec(int dim, Polynomial profile);

    /// The simulation kernel: per-axis profile (693/512)(1-u²)⁵.
    static KernelSpec simulation(int dim);

    /// Lookup by registry name ("sim1d", "sim2d", "sim3d").
    static KernelSpec by_name(const std::string& name);

    int dim() const { return dim_; }

    /// Per-axis profile and its derivatives (order 0..4); zero outside [-1,1].
    double profile_value(double u) const;
    double profile_deriv(double u, int order) const;

    double eval(std::span<const double> u) const;
    void grad(std::span<const double> u, std::span<double> out) const;
    /// Row-major d×d Hessian.
    void hessian(std::span<const double> u, std::span<double> out) const;

    const KernelConstants& constants() const { return constants_; }

private:
    int dim_;
    std::vector<Polynomial> derivs_; // orders 0..4
    KernelConstants constants_{};
};

/// Dense tabulated even function with linear interpolation, zero outside
/// [lo, lo + dx·(values.size()-1)].
struct Tabulated1D {
    double lo = 0.0;
    double dx = 1.0;
    std::vector<double> values;

    double operator()(double t) const {
        const double s = (t - lo) / dx;
        if (s <= 0.0 || s >= static_cast<double>(values.size() - 1))
            return 0.0;
        const auto i = static_cast<std::size_t>(s);
        const double w = s - static_cast<double>(i);
        return values[i] + w * (values[i + 1] - values[i]);
    }
};

/// Per-axis convolution (k_h ⋆ k_g)(t), k_h(x) = k(x/h)/h, tabulated on
/// [-(h+g), h+g]. Exact per knot (the integrand is a polynomial on the
/// support overlap). Integrates to 1 by construction of the factors.
Tabulated1D convolved_profile(const KernelSpec& k, double h, double g,
                              int knots = 4097);

/// Inverse-CDF sampler for the 1-D profile on [-1, 1].
class ProfileSampler {
public:
    ProfileSampler(const KernelSpec& k, int knots = 4096);

    /// Maps a uniform [0,1) variate to a profile-distributed variate.
    double sample(double u01) const;

    /// CDF at t (piecewise-linear between knots), for goodness-of-fit tests.
    double cdf(double t) const;

private:
    double lo_, dx_;
    std::vector<double> cdf_;
};

} // namespace levelset
