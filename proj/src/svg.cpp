#include "levelset/svg.hpp"

#include "levelset/errors.hpp"

#include <cstdio>
#include <fstream>

namespace levelset {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

SvgCanvas::SvgCanvas(const GridSpec& view, int width_px) : view_(view) {
    const double wx = view.upper[0] - view.lower[0];
    const double wy = view.upper[1] - view.lower[1];
    width_ = width_px;
    height_ = static_cast<int>(width_px * wy / wx + 0.5);
}

double SvgCanvas::px(double x) const {
    return (x - view_.lower[0]) / (view_.upper[0] - view_.lower[0]) * width_;
}

double SvgCanvas::py(double y) const {
    return height_ -
           (y - view_.lower[1]) / (view_.upper[1] - view_.lower[1]) * height_;
}

void SvgCanvas::add_contour(const Contour& ct, const std::string& color,
                            double stroke_width) {
    for (const auto& line : ct.components) {
        if (line.vertices.empty()) continue;
        body_ += line.closed ? "<polygon points=\"" : "<polyline points=\"";
        for (const auto& v : line.vertices) {
            body_ += num(px(v[0]));
            body_ += ',';
            body_ += num(py(v[1]));
            body_ += ' ';
        }
        body_ += "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                 num(stroke_width) + "\"/>\n";
    }
}

void SvgCanvas::add_scatter(const Dataset& ds, const std::string& color,
                            double radius_px) {
    if (ds.dim != 2) throw usage_error("svg scatter: 2-D datasets only");
    for (std::size_t i = 0; i < ds.n; ++i) {
        body_ += "<circle cx=\"" + num(px(ds.coord(i, 0))) + "\" cy=\"" +
                 num(py(ds.coord(i, 1))) + "\" r=\"" + num(radius_px) +
                 "\" fill=\"" + color + "\"/>\n";
    }
}

void SvgCanvas::add_raster_boundary(const std::vector<std::uint8_t>& raster,
                                    const GridSpec& grid,
                                    const std::string& color,
                                    double stroke_width) {
    // treat cell-center membership as node values of the center grid and
    // trace the 0.5 level
    GridSpec centers = grid;
    for (int a = 0; a < 2; ++a) {
        const auto i = static_cast<std::size_t>(a);
        const double step = grid.step(a);
        centers.lower[i] += 0.5 * step;
        centers.upper[i] -= 0.5 * step;
        centers.cells[i] -= 1;
    }
    std::vector<double> values(raster.size());
    for (std::size_t i = 0; i < raster.size(); ++i)
        values[i] = raster[i] ? 1.0 : 0.0;
    bool any = false, all = true;
    for (std::size_t i = 0; i < raster.size(); ++i) {
        any |= raster[i] != 0;
        all &= raster[i] != 0;
    }
    if (!any || all) return;
    const auto boundary =
        extract_contour_from_values(values, centers, 0.5, nullptr);
    add_contour(boundary, color, stroke_width);
}

void SvgCanvas::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write SVG file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
        << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' '
        << height_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_ << "</svg>\n";
    if (!out) throw io_error("failed writing SVG file: " + path);
}

void save_contour_csv(const Contour& ct, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write contour file: " + path);
    out << "component_id,vertex_index,x,y\n";
    for (std::size_t cidx = 0; cidx < ct.components.size(); ++cidx) {
        const auto& line = ct.components[cidx];
        for (std::size_t v = 0; v < line.vertices.size(); ++v) {
            out << cidx << ',' << v << ',' << num17(line.vertices[v][0]) << ','
                << num17(line.vertices[v][1]) << '\n';
        }
    }
    if (!out) throw io_error("failed writing contour file: " + path);
}

void save_raster_csv(const std::vector<std::uint8_t>& raster,
                     const GridSpec& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster file: " + path);
    out << "x,y,contained\n";
    const int nx = grid.cells[0];
    for (int j = 0; j < grid.cells[1]; ++j)
        for (int i = 0; i < nx; ++i)
            out << num17(grid.center(0, i)) << ',' << num17(grid.center(1, j))
                << ','
                << static_cast<int>(
                       raster[static_cast<std::size_t>(j) *
                                  static_cast<std::size_t>(nx) +
                              static_cast<std::size_t>(i)])
                << '\n';
    if (!out) throw io_error("failed writing raster file: " + path);
}

} // namespace levelset
