#pragma once

#include "levelset/density.hpp"
#include "levelset/flow.hpp"
#include "levelset/geometry.hpp"
#include "levelset/models.hpp"

#include <atomic>
#include <memory>
#include <variant>

namespace levelset {

/// f̂⁻¹[max(lo,ω), hi] on the held field; ω is the numerical floor used when
/// lo drops below zero and the band would otherwise end only at the support
/// of the estimator. When the field is a fitted estimator, the raster path
/// uses its fast grid evaluation.
struct VerticalBand {
    Field2 field;
    std::shared_ptr<const DensityEstimator> estimator; ///< optional fast path
    double lo = 0.0;
    double hi = 0.0;
    double floor_omega = 1e-6;
};

/// Constant-width tube around a contour: {x : d(x, contour) <= radius}.
struct ContourTube {
    std::shared_ptr<const Contour> contour;
    std::shared_ptr<const SegmentGrid> index;
    double radius = 0.0;
};

/// Membership by tracing the scaled-gradient flow of the held (bias
/// corrected) estimator from the query point to the level set. A point
/// belongs when its trace hits level c at ẑ with
///   gradient_scaled:  ‖∇f(ẑ)‖·‖ẑ - x‖ <= q
///   otherwise:        ‖ẑ - x‖ <= q
/// Non-hit traces exclude the point and bump the diagnostic counter.
/// A cheap vertical pre-filter |f(x) - c| <= q·ratio bounds the flow calls;
/// the gradient ratio over the contour is cached at construction (capped at
/// 10).
struct GradientTube {
    DiffField2 field;
    std::shared_ptr<const DensityEstimator> estimator; ///< optional fast path
    double level = 0.0;
    double q = 0.0;
    bool gradient_scaled = true;
    FlowOptions flow_opts{};
    double grad_min = 1.0;
    double grad_max = 1.0;
    double prefilter = 0.0; // threshold on |f(x) - c|
    bool ratio_capped = false;
    /// Spatial pre-filter: the hitting point lies on the contour, so a
    /// member satisfies d(x, contour) <= q/‖∇f(ẑ)‖ <= q/grad_min (or <= q in
    /// displacement mode); points farther than `reach` are rejected without
    /// tracing.
    std::shared_ptr<const SegmentGrid> contour_index;
    double reach = 0.0;
    std::shared_ptr<std::atomic<long>> flow_failures;
};

struct Region;

/// Set algebra on membership predicates (horizontal superlevel pairs are
/// L̂ ∪ tube and L̂ \ tube).
struct UnionRegion {
    std::shared_ptr<const Region> a, b;
};
struct DifferenceRegion {
    std::shared_ptr<const Region> a, b; // a \ b
};

struct Region {
    std::variant<VerticalBand, ContourTube, GradientTube, UnionRegion,
                 DifferenceRegion>
        shape;
};

Region make_vertical(std::shared_ptr<const DensityEstimator> estimator,
                     double lo, double hi, double floor_omega = 1e-6);
Region make_vertical_field(Field2 field, double lo, double hi,
                           double floor_omega = 1e-6);
Region make_tube(std::shared_ptr<const Contour> contour, double radius);
/// `contour` is the level-c contour of the field; supplies the cached
/// gradient-norm range for the pre-filter.
Region make_gradient_tube(std::shared_ptr<const DensityEstimator> estimator,
                          const Contour& contour, double c, double q,
                          bool gradient_scaled,
                          const FlowOptions& opts = {});
Region make_gradient_tube_field(DiffField2 field, const Contour& contour,
                                double c, double q, bool gradient_scaled,
                                const FlowOptions& opts = {});
Region make_union(Region a, Region b);
Region make_difference(Region a, Region b);

enum class PairTarget { true_set, smoothed_set };

/// Outer/inner sandwich for a superlevel set.
struct RegionPair {
    Region outer;
    Region inner;
    PairTarget target = PairTarget::true_set;
};

bool contains(const Region& r, const Vec2& x);

/// Number of flow failures recorded by a GradientTube region (0 otherwise).
long flow_failure_count(const Region& r);

/// Cell-center membership raster (row-major, cells[0]·cells[1] entries).
std::vector<std::uint8_t> rasterize(const Region& r, const GridSpec& grid,
                                    unsigned threads = 1);

double volume_from_raster(const std::vector<std::uint8_t>& raster,
                          const GridSpec& grid);
/// pdf_at_centers must align with the raster layout.
double mass_from_raster(const std::vector<std::uint8_t>& raster,
                        const std::vector<double>& pdf_at_centers,
                        const GridSpec& grid);
/// True when any contained cell touches the grid boundary (the volume is
/// then a lower bound).
bool raster_touches_boundary(const std::vector<std::uint8_t>& raster,
                             const GridSpec& grid);

double lebesgue_volume(const Region& r, const GridSpec& grid,
                       unsigned threads = 1);
double probability_mass(const Region& r, const TrueModel& model,
                        const GridSpec& grid, unsigned threads = 1);

/// All probe points contained?
bool covers_points(const Region& r, std::span<const Vec2> points);

/// The event {target isosurface ⊂ region}, probed at n_probe points on the
/// model's true contour.
bool covers_isosurface(const Region& r, const TrueModel& model, double c,
                       std::size_t n_probe = 1024);

/// The sandwich event {inner ⊂ L ⊂ outer} checked on every grid center:
/// (x ∈ inner ⇒ pdf(x) >= c) and (pdf(x) >= c ⇒ x ∈ outer).
bool covers_levelset_pair(const RegionPair& pair, const TrueModel& model,
                          double c, const GridSpec& grid, unsigned threads = 1);

/// Grid whose nodes are the cell centers of `grid` (for estimator grid
/// evaluation on raster layouts).
GridSpec center_grid(const GridSpec& grid);

} // namespace levelset
