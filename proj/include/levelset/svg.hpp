#pragma once

#include "levelset/dataset.hpp"
#include "levelset/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace levelset {

/// Minimal static SVG plotter: contours as polylines, datasets as dots,
/// region rasters as boundary outlines. World coordinates come from the
/// view box; y points up.
class SvgCanvas {
public:
    SvgCanvas(const GridSpec& view, int width_px = 720);

    void add_contour(const Contour& ct, const std::string& color,
                     double stroke_width = 1.5);
    void add_scatter(const Dataset& ds, const std::string& color,
                     double radius_px = 1.2);
    /// Outlines a membership raster by tracing its 0.5-contour.
    void add_raster_boundary(const std::vector<std::uint8_t>& raster,
                             const GridSpec& grid, const std::string& color,
                             double stroke_width = 1.5);

    void save(const std::string& path) const;

private:
    double px(double x) const;
    double py(double y) const;

    GridSpec view_;
    int width_, height_;
    std::string body_;
};

/// Contour CSV export: component_id, vertex_index, x, y.
void save_contour_csv(const Contour& ct, const std::string& path);

/// Region raster CSV export: x, y, contained (cell centers).
void save_raster_csv(const std::vector<std::uint8_t>& raster,
                     const GridSpec& grid, const std::string& path);

} // namespace levelset
