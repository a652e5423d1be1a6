#pragma once

#include "levelset/dataset.hpp"
#include "levelset/geometry.hpp"
#include "levelset/rng.hpp"

#include <string>

namespace levelset {

/// Bivariate data-generating models with analytic pdf, gradient, sampler and
/// level calculus.
///
/// Elliptic: f(x,y;a) = (1/2π)·exp(-(a²x² + y²/a²)/2); contours are ellipses
/// and the superlevel-set mass at level c is p = 1 - 2πc.
/// Mixture: 0.5·N((-2,2)ᵀ, 1.5·I₂) + 0.5·N((1,-1)ᵀ, 0.5·I₂).
class TrueModel {
public:
    static TrueModel elliptic(double a);
    static TrueModel mixture();

    bool is_elliptic() const { return elliptic_; }
    double eccentricity() const { return a_; }

    double pdf(const Vec2& x) const;
    Vec2 grad_pdf(const Vec2& x) const;

    /// `component_labels`, when given, receives the mixture component index
    /// of each draw (all zeros for the elliptic model).
    Dataset sample(std::size_t n, Rng& rng,
                   std::vector<int>* component_labels = nullptr) const;

    /// Elliptic only: the level whose superlevel set carries mass p,
    /// c = (1-p)/(2π).
    double level_of_probability(double p) const;

    /// Elliptic: analytic ellipse (r₀cosθ/a, a·r₀sinθ), r₀ = sqrt(-2·log(2πc)).
    /// Mixture: marching squares on the pdf at 1024².
    Contour true_contour(double c, std::size_t n_points) const;

    /// Maximum pdf value (for validating levels).
    double max_pdf() const;

    /// A box that contains every relevant level set with generous margin.
    GridSpec domain_box(int cells) const;

private:
    TrueModel() = default;
    bool elliptic_ = true;
    double a_ = 1.0;
};

/// The paper's four scenarios: a model together with its level.
struct CasePreset {
    std::string name;
    TrueModel model;
    double level;
};

/// case1 (a=1, p=.5), case2 (a=2, p=.5), case3 (a=1, p=.95),
/// case4 (mixture, c=.048).
CasePreset case_preset(const std::string& name);

} // namespace levelset
