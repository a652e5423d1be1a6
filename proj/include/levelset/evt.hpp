#pragma once

#include "levelset/density.hpp"
#include "levelset/geometry.hpp"
#include "levelset/kernel.hpp"
#include "levelset/regions.hpp"

#include <cstddef>

namespace levelset {

/// Inputs of the large-sample quantile formulas.
struct EvtInputs {
    int d = 2;
    std::size_t n = 0;
    double h_eff = 0.0; ///< geometric mean of the bandwidth vector
    double alpha = 0.1;
    double c = 0.0;
    KernelConstants kconst{};
    double surface_measure = 0.0; ///< V̂_{d-1}(M̂), d >= 2
    std::size_t n_hat = 0;        ///< |M̂|, d = 1
};

/// z(α) = -log(-½·log(1-α)).
double z_of_alpha(double alpha);

/// The generic Gumbel-limit quantile φ(z) for the sup of the rescaled field
/// over an r-dimensional manifold whose tangent-frame integral is
/// `tangent_integral`:
///   φ(z) = sqrt(2r·L) + [z + (r/2 - 1/2)·log L
///          + log( (2r)^{(r-1)/2} / (√2·π^{(r+1)/2}) · tangent_integral )]
///          / sqrt(2r·L),         L = log(1/h).
double gumbel_sup_quantile(int r, double log_h_inv, double z,
                           double tangent_integral);

/// b̂(α): the specialisation of the Gumbel quantile to r = d-1 with tangent
/// integral s_K^{d-1}·V̂_{d-1}. Requires d >= 2, h_eff < 1 and a positive
/// surface measure.
double b_hat(const EvtInputs& in);

/// â^{(d)}: b̂(α)·sqrt(‖K‖₂²·c / (n·h_eff^d)) for d >= 2, and
/// Φ⁻¹((1-α)^{1/N̂})·sqrt(‖K‖₂²·c / (n·h)) for d = 1.
double a_hat(const EvtInputs& in);

/// The large-sample region and superlevel pair on the bias-corrected
/// estimator: extracts the contour of f̂^bc at c over `grid`, estimates the
/// surface measure from it, and assembles the vertical band [c-â, c+â] plus
/// the pair ([c-â,∞), [c+â,∞)).
struct LargeSampleRegion {
    Region band;
    RegionPair pair;
    Contour contour; ///< M̂^bc used for the surface measure
    double a = 0.0;  ///< â^{(d)}
    double b = 0.0;  ///< b̂(α) (d >= 2)
};

LargeSampleRegion build_cn1(std::shared_ptr<const DensityEstimator> bc,
                            const GridSpec& grid, double c, double alpha,
                            unsigned threads = 1);

} // namespace levelset
