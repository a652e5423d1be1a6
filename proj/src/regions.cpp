#include "levelset/regions.hpp"

#include "levelset/errors.hpp"
#include "levelset/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace levelset {

namespace {

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len_sq = dx * dx + dy * dy;
    double t = 0.0;
    if (len_sq > 0.0) {
        t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len_sq, 0.0,
                       1.0);
    }
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

bool gradient_tube_contains(const GradientTube& gt, const Vec2& x) {
    if (gt.contour_index && !gt.contour_index->within(x, gt.reach))
        return false;
    const double fx = gt.field.value(x);
    if (std::abs(fx - gt.level) > gt.prefilter) return false;
    const auto tr = trace_to_level(gt.field, x, gt.level, gt.flow_opts);
    if (tr.status != FlowStatus::hit) {
        if (gt.flow_failures)
            gt.flow_failures->fetch_add(1, std::memory_order_relaxed);
        return false;
    }
    const Vec2& z = tr.positions.back();
    const double disp = std::hypot(z[0] - x[0], z[1] - x[1]);
    if (!gt.gradient_scaled) return disp <= gt.q;
    double value = 0.0;
    Vec2 grad{};
    gt.field.value_and_grad(z, value, grad);
    return std::hypot(grad[0], grad[1]) * disp <= gt.q;
}

} // namespace

Region make_vertical(std::shared_ptr<const DensityEstimator> estimator,
                     double lo, double hi, double floor_omega) {
    if (!estimator) throw usage_error("make_vertical: null estimator");
    if (!(lo <= hi)) throw usage_error("make_vertical: needs lo <= hi");
    VerticalBand band;
    band.field = [est = estimator](const Vec2& p) { return est->eval(p); };
    band.estimator = std::move(estimator);
    band.lo = lo;
    band.hi = hi;
    band.floor_omega = floor_omega;
    return Region{band};
}

Region make_vertical_field(Field2 field, double lo, double hi,
                           double floor_omega) {
    if (!field) throw usage_error("make_vertical_field: null field");
    if (!(lo <= hi)) throw usage_error("make_vertical_field: needs lo <= hi");
    VerticalBand band;
    band.field = std::move(field);
    band.lo = lo;
    band.hi = hi;
    band.floor_omega = floor_omega;
    return Region{band};
}

Region make_tube(std::shared_ptr<const Contour> contour, double radius) {
    if (!contour) throw usage_error("make_tube: null contour");
    if (contour->empty()) throw numeric_error("make_tube: empty contour");
    if (!(radius >= 0.0)) throw usage_error("make_tube: radius must be >= 0");
    ContourTube tube;
    tube.index = std::make_shared<SegmentGrid>(*contour);
    tube.contour = std::move(contour);
    tube.radius = radius;
    return Region{tube};
}

Region make_gradient_tube_field(DiffField2 field, const Contour& contour,
                                double c, double q, bool gradient_scaled,
                                const FlowOptions& opts) {
    if (!field.value || !field.value_and_grad)
        throw usage_error("make_gradient_tube_field: incomplete field");
    if (contour.empty())
        throw numeric_error("make_gradient_tube: empty contour");
    if (!(q >= 0.0)) throw usage_error("make_gradient_tube: q must be >= 0");
    GradientTube gt;
    gt.field = std::move(field);
    gt.level = c;
    gt.q = q;
    gt.gradient_scaled = gradient_scaled;
    gt.flow_opts = opts;
    gt.flow_failures = std::make_shared<std::atomic<long>>(0);

    double gmin = std::numeric_limits<double>::infinity();
    double gmax = 0.0;
    double value = 0.0;
    Vec2 grad{};
    for (const auto& line : contour.components) {
        for (const auto& v : line.vertices) {
            gt.field.value_and_grad(v, value, grad);
            const double norm = std::hypot(grad[0], grad[1]);
            gmin = std::min(gmin, norm);
            gmax = std::max(gmax, norm);
        }
    }
    if (!(gmax > 0.0))
        throw numeric_error("make_gradient_tube: vanishing gradient on contour");
    gt.grad_min = gmin;
    gt.grad_max = gmax;
    if (gradient_scaled) {
        const double ratio = gmax / std::max(gmin, 1e-300);
        gt.ratio_capped = ratio > 10.0;
        gt.prefilter = q * std::min(ratio, 10.0);
    } else {
        gt.prefilter = 1.5 * q * gmax;
    }
    gt.contour_index = std::make_shared<SegmentGrid>(contour);
    // slack for the polyline approximation of the contour
    double max_edge = 0.0;
    for (const auto& line : contour.components) {
        const std::size_t m = line.vertices.size();
        const std::size_t nseg = line.closed ? m : (m > 0 ? m - 1 : 0);
        for (std::size_t s = 0; s < nseg; ++s) {
            const auto& a = line.vertices[s];
            const auto& b = line.vertices[(s + 1) % m];
            max_edge = std::max(max_edge, std::hypot(b[0] - a[0], b[1] - a[1]));
        }
    }
    const double bound =
        gradient_scaled ? q / std::max(gmin, 1e-300) : q;
    gt.reach = 1.05 * bound + 2.0 * max_edge + gt.flow_opts.level_tol;
    return Region{gt};
}

Region make_gradient_tube(std::shared_ptr<const DensityEstimator> estimator,
                          const Contour& contour, double c, double q,
                          bool gradient_scaled, const FlowOptions& opts) {
    if (!estimator) throw usage_error("make_gradient_tube: null estimator");
    auto region = make_gradient_tube_field(estimator_field(estimator), contour,
                                           c, q, gradient_scaled, opts);
    std::get<GradientTube>(region.shape).estimator = std::move(estimator);
    return region;
}

Region make_union(Region a, Region b) {
    UnionRegion u;
    u.a = std::make_shared<Region>(std::move(a));
    u.b = std::make_shared<Region>(std::move(b));
    return Region{u};
}

Region make_difference(Region a, Region b) {
    DifferenceRegion d;
    d.a = std::make_shared<Region>(std::move(a));
    d.b = std::make_shared<Region>(std::move(b));
    return Region{d};
}

bool contains(const Region& r, const Vec2& x) {
    return std::visit(
        [&](const auto& shape) -> bool {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, VerticalBand>) {
                const double v = shape.field(x);
                return v >= std::max(shape.lo, shape.floor_omega) &&
                       v <= shape.hi;
            } else if constexpr (std::is_same_v<T, ContourTube>) {
                return shape.index->within(x, shape.radius);
            } else if constexpr (std::is_same_v<T, GradientTube>) {
                return gradient_tube_contains(shape, x);
            } else if constexpr (std::is_same_v<T, UnionRegion>) {
                return contains(*shape.a, x) || contains(*shape.b, x);
            } else {
                return contains(*shape.a, x) && !contains(*shape.b, x);
            }
        },
        r.shape);
}

long flow_failure_count(const Region& r) {
    return std::visit(
        [&](const auto& shape) -> long {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, GradientTube>) {
                return shape.flow_failures ? shape.flow_failures->load() : 0;
            } else if constexpr (std::is_same_v<T, UnionRegion> ||
                                 std::is_same_v<T, DifferenceRegion>) {
                return flow_failure_count(*shape.a) +
                       flow_failure_count(*shape.b);
            } else {
                return 0;
            }
        },
        r.shape);
}

GridSpec center_grid(const GridSpec& grid) {
    GridSpec g = grid;
    for (int a = 0; a < grid.dim; ++a) {
        const auto i = static_cast<std::size_t>(a);
        const double step = grid.step(a);
        g.lower[i] += 0.5 * step;
        g.upper[i] -= 0.5 * step;
        g.cells[i] -= 1;
    }
    return g;
}

std::vector<std::uint8_t> rasterize(const Region& r, const GridSpec& grid,
                                    unsigned threads) {
    grid.validate();
    if (grid.dim != 2) throw usage_error("rasterize: 2-D grids only");
    const int nx = grid.cells[0];
    const int ny = grid.cells[1];
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(nx) *
                                         static_cast<std::size_t>(ny),
                                     0);

    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, VerticalBand>) {
                const double lo = std::max(shape.lo, shape.floor_omega);
                if (shape.estimator) {
                    const auto values = shape.estimator->eval_on_grid(
                        center_grid(grid), threads);
                    for (std::size_t i = 0; i < raster.size(); ++i)
                        raster[i] =
                            (values[i] >= lo && values[i] <= shape.hi) ? 1 : 0;
                } else {
                    parallel_for(
                        static_cast<std::size_t>(ny), threads,
                        [&](std::size_t j) {
                            const auto row = j * static_cast<std::size_t>(nx);
                            for (int i = 0; i < nx; ++i) {
                                const double v = shape.field(
                                    {grid.center(0, i),
                                     grid.center(1, static_cast<int>(j))});
                                raster[row + static_cast<std::size_t>(i)] =
                                    (v >= lo && v <= shape.hi) ? 1 : 0;
                            }
                        });
                }
            } else if constexpr (std::is_same_v<T, ContourTube>) {
                // splat each segment's inflated bbox
                const double rad = shape.radius;
                const double sx = grid.step(0);
                const double sy = grid.step(1);
                auto paint = [&](const Vec2& a, const Vec2& b) {
                    const int ix0 = std::max(
                        0, static_cast<int>((std::min(a[0], b[0]) - rad -
                                             grid.lower[0]) / sx - 0.5));
                    const int ix1 = std::min(
                        nx - 1, static_cast<int>((std::max(a[0], b[0]) + rad -
                                                  grid.lower[0]) / sx));
                    const int iy0 = std::max(
                        0, static_cast<int>((std::min(a[1], b[1]) - rad -
                                             grid.lower[1]) / sy - 0.5));
                    const int iy1 = std::min(
                        ny - 1, static_cast<int>((std::max(a[1], b[1]) + rad -
                                                  grid.lower[1]) / sy));
                    for (int j = iy0; j <= iy1; ++j) {
                        for (int i = ix0; i <= ix1; ++i) {
                            auto& cell = raster[static_cast<std::size_t>(j) *
                                                    static_cast<std::size_t>(nx) +
                                                static_cast<std::size_t>(i)];
                            if (cell) continue;
                            const Vec2 ctr{grid.center(0, i), grid.center(1, j)};
                            if (point_segment_dist(ctr, a, b) <= rad) cell = 1;
                        }
                    }
                };
                for (const auto& line : shape.contour->components) {
                    const std::size_t m = line.vertices.size();
                    if (m == 1) {
                        paint(line.vertices[0], line.vertices[0]);
                        continue;
                    }
                    const std::size_t nseg = line.closed ? m : m - 1;
                    for (std::size_t s = 0; s < nseg; ++s)
                        paint(line.vertices[s], line.vertices[(s + 1) % m]);
                }
            } else if constexpr (std::is_same_v<T, GradientTube>) {
                std::vector<double> values;
                if (shape.estimator)
                    values = shape.estimator->eval_on_grid(center_grid(grid),
                                                           threads);
                parallel_for(
                    static_cast<std::size_t>(ny), threads, [&](std::size_t j) {
                        const auto row = j * static_cast<std::size_t>(nx);
                        for (int i = 0; i < nx; ++i) {
                            const Vec2 ctr{grid.center(0, i),
                                           grid.center(1, static_cast<int>(j))};
                            const double v =
                                values.empty()
                                    ? shape.field.value(ctr)
                                    : values[row + static_cast<std::size_t>(i)];
                            if (std::abs(v - shape.level) > shape.prefilter)
                                continue;
                            if (gradient_tube_contains(shape, ctr))
                                raster[row + static_cast<std::size_t>(i)] = 1;
                        }
                    });
            } else if constexpr (std::is_same_v<T, UnionRegion>) {
                raster = rasterize(*shape.a, grid, threads);
                const auto other = rasterize(*shape.b, grid, threads);
                for (std::size_t i = 0; i < raster.size(); ++i)
                    raster[i] = raster[i] | other[i];
            } else {
                raster = rasterize(*shape.a, grid, threads);
                const auto other = rasterize(*shape.b, grid, threads);
                for (std::size_t i = 0; i < raster.size(); ++i)
                    raster[i] = raster[i] & static_cast<std::uint8_t>(!other[i]);
            }
        },
        r.shape);
    return raster;
}

double volume_from_raster(const std::vector<std::uint8_t>& raster,
                          const GridSpec& grid) {
    std::size_t count = 0;
    for (std::uint8_t v : raster) count += v;
    return static_cast<double>(count) * grid.step(0) * grid.step(1);
}

double mass_from_raster(const std::vector<std::uint8_t>& raster,
                        const std::vector<double>& pdf_at_centers,
                        const GridSpec& grid) {
    if (raster.size() != pdf_at_centers.size())
        throw usage_error("mass_from_raster: size mismatch");
    double mass = 0.0;
    for (std::size_t i = 0; i < raster.size(); ++i)
        if (raster[i]) mass += pdf_at_centers[i];
    return mass * grid.step(0) * grid.step(1);
}

bool raster_touches_boundary(const std::vector<std::uint8_t>& raster,
                             const GridSpec& grid) {
    const int nx = grid.cells[0];
    const int ny = grid.cells[1];
    auto at = [&](int i, int j) {
        return raster[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                      static_cast<std::size_t>(i)] != 0;
    };
    for (int i = 0; i < nx; ++i)
        if (at(i, 0) || at(i, ny - 1)) return true;
    for (int j = 0; j < ny; ++j)
        if (at(0, j) || at(nx - 1, j)) return true;
    return false;
}

double lebesgue_volume(const Region& r, const GridSpec& grid,
                       unsigned threads) {
    return volume_from_raster(rasterize(r, grid, threads), grid);
}

double probability_mass(const Region& r, const TrueModel& model,
                        const GridSpec& grid, unsigned threads) {
    const auto raster = rasterize(r, grid, threads);
    std::vector<double> pdf(raster.size());
    const int nx = grid.cells[0];
    parallel_for(static_cast<std::size_t>(grid.cells[1]), threads,
                 [&](std::size_t j) {
                     for (int i = 0; i < nx; ++i)
                         pdf[j * static_cast<std::size_t>(nx) +
                             static_cast<std::size_t>(i)] =
                             model.pdf({grid.center(0, i),
                                        grid.center(1, static_cast<int>(j))});
                 });
    return mass_from_raster(raster, pdf, grid);
}

bool covers_points(const Region& r, std::span<const Vec2> points) {
    for (const auto& p : points)
        if (!contains(r, p)) return false;
    return true;
}

bool covers_isosurface(const Region& r, const TrueModel& model, double c,
                       std::size_t n_probe) {
    const auto ct = model.true_contour(c, n_probe);
    std::vector<Vec2> pts;
    if (ct.vertex_count() == n_probe) {
        for (const auto& line : ct.components)
            pts.insert(pts.end(), line.vertices.begin(), line.vertices.end());
    } else {
        pts = sample_points(ct, n_probe);
    }
    return covers_points(r, pts);
}

bool covers_levelset_pair(const RegionPair& pair, const TrueModel& model,
                          double c, const GridSpec& grid, unsigned threads) {
    const auto inner = rasterize(pair.inner, grid, threads);
    const auto outer = rasterize(pair.outer, grid, threads);
    const int nx = grid.cells[0];
    std::atomic<bool> ok{true};
    parallel_for(
        static_cast<std::size_t>(grid.cells[1]), threads, [&](std::size_t j) {
            if (!ok.load(std::memory_order_relaxed)) return;
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx =
                    j * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
                const bool in_level =
                    model.pdf({grid.center(0, i),
                               grid.center(1, static_cast<int>(j))}) >= c;
                if ((inner[idx] && !in_level) || (in_level && !outer[idx])) {
                    ok.store(false, std::memory_order_relaxed);
                    return;
                }
            }
        });
    return ok.load();
}

} // namespace levelset
