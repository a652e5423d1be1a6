#pragma once

#include "levelset/grid.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace levelset {

using Vec2 = std::array<double, 2>;

struct Polyline {
    std::vector<Vec2> vertices;
    bool closed = false;

    double length() const;
};

/// Polyline representation of an estimated isosurface (d=2) or the sorted
/// root list (d=1). Immutable by convention once built; concurrent queries
/// are safe.
struct Contour {
    int dim = 2;
    double level = 0.0;
    std::vector<Polyline> components; // d=2
    std::vector<double> points;       // d=1, ascending
    double total_length = 0.0;        // d=2: sum of segment lengths

    bool empty() const {
        return dim == 2 ? components.empty() : points.empty();
    }
    std::size_t vertex_count() const;
};

using Field2 = std::function<double(const Vec2&)>;
using Field1 = std::function<double(double)>;

struct ContourOptions {
    /// Vertex refinement target: |field - c| <= level_tol_scale·max(1,|c|).
    double level_tol_scale = 1e-9;
    int max_refine_iters = 80;
    bool refine = true;
};

/// Marching squares with linear edge interpolation and per-vertex bisection
/// refinement along grid edges; saddle cells are disambiguated by the field
/// value at the cell center. Segments are chained into closed or open
/// polylines. An everywhere-one-sided field yields an empty contour; NaN
/// node values raise numeric_error.
Contour extract_contour(const Field2& field, const GridSpec& grid, double c,
                        const ContourOptions& opts = {});

/// Same, starting from precomputed node values (row-major, (ny+1)×(nx+1)).
/// `refine_field` enables vertex refinement and saddle disambiguation by
/// actual field values; without it, linear interpolation stands and saddles
/// use the corner mean.
Contour extract_contour_from_values(const std::vector<double>& node_values,
                                    const GridSpec& grid, double c,
                                    const Field2* refine_field = nullptr,
                                    const ContourOptions& opts = {});

/// d=1: sign-change bracketing over grid cells plus bisection.
Contour extract_contour_1d(const Field1& field, const GridSpec& grid, double c,
                           const ContourOptions& opts = {});

/// Sum of Euclidean segment lengths; d=1 contours are rejected (use the
/// point count instead).
double contour_length(const Contour& ct);

/// Splits every segment into ceil(len/max_spacing) equal parts. Introduced
/// vertices are re-projected onto the level set by a 1-D root polish along
/// the local segment normal when `field` is given.
Contour resample(const Contour& ct, double max_spacing,
                 const Field2* field = nullptr,
                 const ContourOptions& opts = {});

/// `count` points spread uniformly in arclength over all components.
std::vector<Vec2> sample_points(const Contour& ct, std::size_t count);

/// Exact point-to-segment minimisation over all segments.
double dist_to_contour(const Vec2& x, const Contour& ct);
std::pair<Vec2, double> project_to_contour(const Vec2& x, const Contour& ct);

/// Uniform-bucket index over contour segments for repeated nearest-segment
/// queries (rasterisation, Hausdorff sups).
class SegmentGrid {
public:
    explicit SegmentGrid(const Contour& ct);

    double distance(const Vec2& x) const;
    bool within(const Vec2& x, double radius) const;

private:
    struct Segment {
        Vec2 a, b;
    };
    double seg_dist(const Vec2& x, const Segment& s) const;
    std::size_t cell_of(int cx, int cy) const {
        return static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(cx);
    }

    std::vector<Segment> segments_;
    std::vector<std::vector<std::uint32_t>> buckets_;
    double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
};

/// sup over `from`'s vertices of the distance to the indexed contour.
double directed_sup(const Contour& from, const SegmentGrid& to);

/// max( sup_{x in a} d(x, b), sup_{y in b} d(y, a) ), sups taken over
/// vertices against the other contour's segments. Inputs should be
/// resampled to the accuracy the caller needs.
double hausdorff(const Contour& a, const Contour& b);
double hausdorff(const Contour& a, const SegmentGrid& ga, const Contour& b,
                 const SegmentGrid& gb);

} // namespace levelset
