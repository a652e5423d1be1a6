#include "levelset/geometry.hpp"

#include "levelset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace levelset {

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                              Vec2* closest = nullptr) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len_sq = dx * dx + dy * dy;
    double t = 0.0;
    if (len_sq > 0.0) {
        t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len_sq;
        t = std::clamp(t, 0.0, 1.0);
    }
    const Vec2 q{a[0] + t * dx, a[1] + t * dy};
    if (closest) *closest = q;
    return std::hypot(p[0] - q[0], p[1] - q[1]);
}

double refine_tol(double c, const ContourOptions& opts) {
    return opts.level_tol_scale * std::max(1.0, std::abs(c));
}

/// Bisection along the grid edge [p0, p1]; node values v0, v1 straddle c
/// (v_in >= c > v_out). Falls back to linear interpolation without a field.
Vec2 edge_vertex(const Vec2& p0, const Vec2& p1, double v0, double v1,
                 double c, const Field2* field, const ContourOptions& opts) {
    double t;
    if (v1 == v0) {
        t = 0.5;
    } else {
        t = (c - v0) / (v1 - v0);
        t = std::clamp(t, 0.0, 1.0);
    }
    if (!field || !opts.refine) {
        return {p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])};
    }
    const double tol = refine_tol(c, opts);
    double lo = 0.0, hi = 1.0;
    double flo = v0 - c, fhi = v1 - c;
    if (flo == 0.0) return p0;
    if (fhi == 0.0) return p1;
    auto at = [&](double s) {
        return Vec2{p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1])};
    };
    // start from the interpolated guess
    double mid = t;
    for (int it = 0; it < opts.max_refine_iters; ++it) {
        const double fm = (*field)(at(mid)) - c;
        if (std::abs(fm) <= tol) break;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        mid = 0.5 * (lo + hi);
    }
    return at(mid);
}

struct SegmentRec {
    std::uint64_t e0, e1; // edge keys of the endpoints
};

} // namespace

double Polyline::length() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        total += std::hypot(vertices[i + 1][0] - vertices[i][0],
                            vertices[i + 1][1] - vertices[i][1]);
    if (closed && vertices.size() > 2)
        total += std::hypot(vertices.front()[0] - vertices.back()[0],
                            vertices.front()[1] - vertices.back()[1]);
    return total;
}

std::size_t Contour::vertex_count() const {
    if (dim == 1) return points.size();
    std::size_t n = 0;
    for (const auto& p : components) n += p.vertices.size();
    return n;
}

Contour extract_contour_from_values(const std::vector<double>& node_values,
                                    const GridSpec& grid, double c,
                                    const Field2* refine_field,
                                    const ContourOptions& opts) {
    grid.validate();
    if (grid.dim != 2)
        throw usage_error("extract_contour_from_values: 2-D grids only");
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    if (node_values.size() !=
        static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        throw usage_error("extract_contour_from_values: node count mismatch");
    for (double v : node_values)
        if (std::isnan(v))
            throw numeric_error("extract_contour: NaN field value on grid");

    auto value = [&](int i, int j) {
        return node_values[static_cast<std::size_t>(j) *
                               static_cast<std::size_t>(nx) +
                           static_cast<std::size_t>(i)];
    };
    auto node = [&](int i, int j) {
        return Vec2{grid.node(0, i), grid.node(1, j)};
    };
    // Edge keys: 2·(node index) + {0: horizontal to (i+1,j), 1: vertical to (i,j+1)}
    auto hkey = [&](int i, int j) {
        return (static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(nx) +
                static_cast<std::uint64_t>(i))
                   << 1;
    };
    auto vkey = [&](int i, int j) {
        return ((static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(nx) +
                 static_cast<std::uint64_t>(i))
                << 1) |
               1u;
    };

    std::unordered_map<std::uint64_t, Vec2> vertex_of_edge;
    auto edge_point = [&](std::uint64_t key, int i0, int j0, int i1, int j1) {
        auto it = vertex_of_edge.find(key);
        if (it != vertex_of_edge.end()) return;
        vertex_of_edge.emplace(
            key, edge_vertex(node(i0, j0), node(i1, j1), value(i0, j0),
                             value(i1, j1), c, refine_field, opts));
    };

    std::vector<SegmentRec> segments;
    for (int j = 0; j < grid.cells[1]; ++j) {
        for (int i = 0; i < grid.cells[0]; ++i) {
            const double v00 = value(i, j);
            const double v10 = value(i + 1, j);
            const double v11 = value(i + 1, j + 1);
            const double v01 = value(i, j + 1);
            int mask = 0;
            if (v00 >= c) mask |= 1;
            if (v10 >= c) mask |= 2;
            if (v11 >= c) mask |= 4;
            if (v01 >= c) mask |= 8;
            if (mask == 0 || mask == 15) continue;

            const std::uint64_t B = hkey(i, j);
            const std::uint64_t T = hkey(i, j + 1);
            const std::uint64_t L = vkey(i, j);
            const std::uint64_t R = vkey(i + 1, j);
            auto emit = [&](std::uint64_t a, std::uint64_t b) {
                segments.push_back({a, b});
                if (a == B || b == B) edge_point(B, i, j, i + 1, j);
                if (a == T || b == T) edge_point(T, i, j + 1, i + 1, j + 1);
                if (a == L || b == L) edge_point(L, i, j, i, j + 1);
                if (a == R || b == R) edge_point(R, i + 1, j, i + 1, j + 1);
            };

            switch (mask) {
                case 1: emit(L, B); break;
                case 2: emit(B, R); break;
                case 3: emit(L, R); break;
                case 4: emit(T, R); break;
                case 6: emit(B, T); break;
                case 7: emit(L, T); break;
                case 8: emit(L, T); break;
                case 9: emit(B, T); break;
                case 11: emit(T, R); break;
                case 12: emit(L, R); break;
                case 13: emit(B, R); break;
                case 14: emit(L, B); break;
                case 5:
                case 10: {
                    // Saddle: connect according to the field value at the
                    // cell centre (corner mean without a field).
                    double centre;
                    if (refine_field) {
                        const Vec2 cc{grid.lower[0] + grid.step(0) * (i + 0.5),
                                      grid.lower[1] + grid.step(1) * (j + 0.5)};
                        centre = (*refine_field)(cc);
                    } else {
                        centre = 0.25 * (v00 + v10 + v11 + v01);
                    }
                    const bool centre_in = centre >= c;
                    if (mask == 5) {
                        if (centre_in) {
                            emit(B, R);
                            emit(L, T);
                        } else {
                            emit(L, B);
                            emit(T, R);
                        }
                    } else { // mask == 10
                        if (centre_in) {
                            emit(L, B);
                            emit(T, R);
                        } else {
                            emit(B, R);
                            emit(L, T);
                        }
                    }
                    break;
                }
                default: break;
            }
        }
    }

    Contour ct;
    ct.dim = 2;
    ct.level = c;
    if (segments.empty()) return ct;

    // chain segments into polylines via shared edge keys
    std::unordered_map<std::uint64_t, std::array<std::int32_t, 2>> incident;
    incident.reserve(segments.size() * 2);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (std::uint64_t key : {segments[s].e0, segments[s].e1}) {
            auto [it, inserted] = incident.try_emplace(
                key, std::array<std::int32_t, 2>{-1, -1});
            auto& slots = it->second;
            (void)inserted;
            if (slots[0] < 0)
                slots[0] = static_cast<std::int32_t>(s);
            else
                slots[1] = static_cast<std::int32_t>(s);
        }
    }
    std::vector<char> used(segments.size(), 0);
    auto next_of = [&](std::uint64_t key, std::int32_t current) {
        const auto& slots = incident.at(key);
        if (slots[0] >= 0 && slots[0] != current && !used[static_cast<std::size_t>(slots[0])])
            return slots[0];
        if (slots[1] >= 0 && slots[1] != current && !used[static_cast<std::size_t>(slots[1])])
            return slots[1];
        return std::int32_t{-1};
    };

    for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        std::vector<std::uint64_t> chain{segments[s0].e0, segments[s0].e1};
        used[s0] = 1;
        // grow forward
        for (;;) {
            const std::int32_t nxt = next_of(chain.back(), -1);
            if (nxt < 0) break;
            const auto& seg = segments[static_cast<std::size_t>(nxt)];
            used[static_cast<std::size_t>(nxt)] = 1;
            chain.push_back(seg.e0 == chain.back() ? seg.e1 : seg.e0);
        }
        // grow backward
        for (;;) {
            const std::int32_t nxt = next_of(chain.front(), -1);
            if (nxt < 0) break;
            const auto& seg = segments[static_cast<std::size_t>(nxt)];
            used[static_cast<std::size_t>(nxt)] = 1;
            chain.insert(chain.begin(),
                         seg.e0 == chain.front() ? seg.e1 : seg.e0);
        }
        Polyline line;
        line.closed = chain.size() > 2 && chain.front() == chain.back();
        if (line.closed) chain.pop_back();
        line.vertices.reserve(chain.size());
        for (std::uint64_t key : chain)
            line.vertices.push_back(vertex_of_edge.at(key));
        ct.components.push_back(std::move(line));
    }
    ct.total_length = 0.0;
    for (const auto& p : ct.components) ct.total_length += p.length();
    return ct;
}

Contour extract_contour(const Field2& field, const GridSpec& grid, double c,
                        const ContourOptions& opts) {
    grid.validate();
    if (grid.dim != 2) throw usage_error("extract_contour: 2-D grids only");
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    std::vector<double> values(static_cast<std::size_t>(nx) *
                               static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                   static_cast<std::size_t>(i)] =
                field(Vec2{grid.node(0, i), grid.node(1, j)});
    return extract_contour_from_values(values, grid, c, &field, opts);
}

Contour extract_contour_1d(const Field1& field, const GridSpec& grid, double c,
                           const ContourOptions& opts) {
    if (grid.dim != 1) throw usage_error("extract_contour_1d: 1-D grids only");
    grid.validate();
    Contour ct;
    ct.dim = 1;
    ct.level = c;
    const int n = grid.nodes(0);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = field(grid.node(0, i));
    for (double v : values)
        if (std::isnan(v)) throw numeric_error("extract_contour_1d: NaN field value");
    const double tol = refine_tol(c, opts);
    for (int i = 0; i + 1 < n; ++i) {
        double lo = grid.node(0, i), hi = grid.node(0, i + 1);
        double flo = values[static_cast<std::size_t>(i)] - c;
        double fhi = values[static_cast<std::size_t>(i) + 1] - c;
        const bool in0 = flo >= 0.0;
        const bool in1 = fhi >= 0.0;
        if (in0 == in1) continue;
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < opts.max_refine_iters; ++it) {
            const double fm = field(mid) - c;
            if (std::abs(fm) <= tol) break;
            if ((fm >= 0.0) == in0) {
                lo = mid;
            } else {
                hi = mid;
            }
            mid = 0.5 * (lo + hi);
        }
        ct.points.push_back(mid);
    }
    std::sort(ct.points.begin(), ct.points.end());
    return ct;
}

double contour_length(const Contour& ct) {
    if (ct.dim != 2)
        throw usage_error("contour_length: defined for d=2 contours only");
    double total = 0.0;
    for (const auto& p : ct.components) total += p.length();
    return total;
}

Contour resample(const Contour& ct, double max_spacing, const Field2* field,
                 const ContourOptions& opts) {
    if (!(max_spacing > 0.0))
        throw usage_error("resample: spacing must be positive");
    if (ct.dim != 2) throw usage_error("resample: d=2 contours only");
    const double tol = refine_tol(ct.level, opts);

    auto project = [&](Vec2 p, const Vec2& normal) {
        if (!field) return p;
        const double r0 = (*field)(p)-ct.level;
        if (std::abs(r0) <= tol) return p;
        // bracket the level along the normal
        const double reach = max_spacing;
        double t_in = 0.0, f_in = r0;
        double t_out = 0.0;
        bool found = false;
        for (int k = 1; k <= 8 && !found; ++k) {
            const double s = reach * k / 8.0;
            for (double sign : {1.0, -1.0}) {
                const Vec2 q{p[0] + sign * s * normal[0],
                             p[1] + sign * s * normal[1]};
                const double f = (*field)(q)-ct.level;
                if ((f > 0.0) != (r0 > 0.0)) {
                    t_out = sign * s;
                    found = true;
                    break;
                }
            }
        }
        if (!found) return p;
        for (int it = 0; it < 40; ++it) {
            const double tm = 0.5 * (t_in + t_out);
            const Vec2 q{p[0] + tm * normal[0], p[1] + tm * normal[1]};
            const double f = (*field)(q)-ct.level;
            if (std::abs(f) <= tol) {
                t_in = tm;
                break;
            }
            if ((f > 0.0) == (f_in > 0.0)) {
                t_in = tm;
                f_in = f;
            } else {
                t_out = tm;
            }
        }
        return Vec2{p[0] + t_in * normal[0], p[1] + t_in * normal[1]};
    };

    Contour out;
    out.dim = 2;
    out.level = ct.level;
    for (const auto& line : ct.components) {
        Polyline res;
        res.closed = line.closed;
        const std::size_t m = line.vertices.size();
        const std::size_t nseg = line.closed ? m : (m > 0 ? m - 1 : 0);
        for (std::size_t s = 0; s < nseg; ++s) {
            const Vec2& a = line.vertices[s];
            const Vec2& b = line.vertices[(s + 1) % m];
            res.vertices.push_back(a);
            const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
            if (len == 0.0) continue;
            const auto pieces = static_cast<std::size_t>(
                std::ceil(len / max_spacing - 1e-9));
            if (pieces <= 1) continue;
            const Vec2 normal{-(b[1] - a[1]) / len, (b[0] - a[0]) / len};
            for (std::size_t p = 1; p < pieces; ++p) {
                const double t =
                    static_cast<double>(p) / static_cast<double>(pieces);
                Vec2 q{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
                res.vertices.push_back(project(q, normal));
            }
        }
        if (!line.closed && m > 0) res.vertices.push_back(line.vertices.back());
        out.components.push_back(std::move(res));
    }
    out.total_length = 0.0;
    for (const auto& p : out.components) out.total_length += p.length();
    return out;
}

std::vector<Vec2> sample_points(const Contour& ct, std::size_t count) {
    if (ct.dim != 2) throw usage_error("sample_points: d=2 contours only");
    if (ct.empty() || count == 0) return {};
    struct Seg {
        Vec2 a, b;
        double len;
    };
    std::vector<Seg> segs;
    double total = 0.0;
    for (const auto& line : ct.components) {
        const std::size_t m = line.vertices.size();
        const std::size_t nseg = line.closed ? m : (m > 0 ? m - 1 : 0);
        for (std::size_t s = 0; s < nseg; ++s) {
            const Vec2& a = line.vertices[s];
            const Vec2& b = line.vertices[(s + 1) % m];
            const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
            if (len > 0.0) {
                segs.push_back({a, b, len});
                total += len;
            }
        }
    }
    std::vector<Vec2> pts;
    pts.reserve(count);
    if (segs.empty() || total <= 0.0) {
        for (std::size_t i = 0; i < count; ++i)
            pts.push_back(ct.components.front().vertices.front());
        return pts;
    }
    std::size_t seg_idx = 0;
    double upto = segs[0].len;
    double walked = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double target =
            total * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        while (target > upto && seg_idx + 1 < segs.size()) {
            walked = upto;
            ++seg_idx;
            upto += segs[seg_idx].len;
        }
        const auto& s = segs[seg_idx];
        const double t = std::clamp((target - walked) / s.len, 0.0, 1.0);
        pts.push_back({s.a[0] + t * (s.b[0] - s.a[0]),
                       s.a[1] + t * (s.b[1] - s.a[1])});
    }
    return pts;
}

double dist_to_contour(const Vec2& x, const Contour& ct) {
    return project_to_contour(x, ct).second;
}

std::pair<Vec2, double> project_to_contour(const Vec2& x, const Contour& ct) {
    if (ct.dim != 2) throw usage_error("project_to_contour: d=2 contours only");
    if (ct.empty())
        throw numeric_error("project_to_contour: empty contour");
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_pt{0.0, 0.0};
    for (const auto& line : ct.components) {
        const std::size_t m = line.vertices.size();
        if (m == 1) {
            const double d = std::hypot(x[0] - line.vertices[0][0],
                                        x[1] - line.vertices[0][1]);
            if (d < best) {
                best = d;
                best_pt = line.vertices[0];
            }
            continue;
        }
        const std::size_t nseg = line.closed ? m : m - 1;
        for (std::size_t s = 0; s < nseg; ++s) {
            Vec2 q;
            const double d = point_segment_distance(
                x, line.vertices[s], line.vertices[(s + 1) % m], &q);
            if (d < best) {
                best = d;
                best_pt = q;
            }
        }
    }
    return {best_pt, best};
}

SegmentGrid::SegmentGrid(const Contour& ct) {
    if (ct.dim != 2) throw usage_error("SegmentGrid: d=2 contours only");
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x, max_x = -min_x, max_y = -min_x;
    double total_len = 0.0;
    for (const auto& line : ct.components) {
        const std::size_t m = line.vertices.size();
        const std::size_t nseg = line.closed ? m : (m > 0 ? m - 1 : 0);
        for (std::size_t s = 0; s < nseg; ++s) {
            const Vec2& a = line.vertices[s];
            const Vec2& b = line.vertices[(s + 1) % m];
            segments_.push_back({a, b});
            total_len += std::hypot(b[0] - a[0], b[1] - a[1]);
            min_x = std::min({min_x, a[0], b[0]});
            max_x = std::max({max_x, a[0], b[0]});
            min_y = std::min({min_y, a[1], b[1]});
            max_y = std::max({max_y, a[1], b[1]});
        }
        if (nseg == 0 && m == 1) {
            segments_.push_back({line.vertices[0], line.vertices[0]});
            min_x = std::min(min_x, line.vertices[0][0]);
            max_x = std::max(max_x, line.vertices[0][0]);
            min_y = std::min(min_y, line.vertices[0][1]);
            max_y = std::max(max_y, line.vertices[0][1]);
        }
    }
    if (segments_.empty())
        throw numeric_error("SegmentGrid: empty contour");
    const double span = std::max(max_x - min_x, max_y - min_y);
    const double avg_len =
        total_len > 0.0 ? total_len / static_cast<double>(segments_.size())
                        : span;
    cell_ = std::max({avg_len, span / 256.0, 1e-12});
    x0_ = min_x;
    y0_ = min_y;
    nx_ = std::max(1, static_cast<int>((max_x - min_x) / cell_) + 1);
    ny_ = std::max(1, static_cast<int>((max_y - min_y) / cell_) + 1);
    buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const auto& seg = segments_[s];
        const int ix0 = std::clamp(
            static_cast<int>((std::min(seg.a[0], seg.b[0]) - x0_) / cell_), 0,
            nx_ - 1);
        const int ix1 = std::clamp(
            static_cast<int>((std::max(seg.a[0], seg.b[0]) - x0_) / cell_), 0,
            nx_ - 1);
        const int iy0 = std::clamp(
            static_cast<int>((std::min(seg.a[1], seg.b[1]) - y0_) / cell_), 0,
            ny_ - 1);
        const int iy1 = std::clamp(
            static_cast<int>((std::max(seg.a[1], seg.b[1]) - y0_) / cell_), 0,
            ny_ - 1);
        for (int cy = iy0; cy <= iy1; ++cy)
            for (int cx = ix0; cx <= ix1; ++cx)
                buckets_[cell_of(cx, cy)].push_back(
                    static_cast<std::uint32_t>(s));
    }
}

double SegmentGrid::seg_dist(const Vec2& x, const Segment& s) const {
    return point_segment_distance(x, s.a, s.b);
}

double SegmentGrid::distance(const Vec2& x) const {
    // expanding-box search; exact once best <= box reach
    double reach = cell_;
    const double span =
        std::max(static_cast<double>(nx_), static_cast<double>(ny_)) * cell_;
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        const int ix0 = std::clamp(static_cast<int>((x[0] - reach - x0_) / cell_), 0, nx_ - 1);
        const int ix1 = std::clamp(static_cast<int>((x[0] + reach - x0_) / cell_), 0, nx_ - 1);
        const int iy0 = std::clamp(static_cast<int>((x[1] - reach - y0_) / cell_), 0, ny_ - 1);
        const int iy1 = std::clamp(static_cast<int>((x[1] + reach - y0_) / cell_), 0, ny_ - 1);
        for (int cy = iy0; cy <= iy1; ++cy)
            for (int cx = ix0; cx <= ix1; ++cx)
                for (std::uint32_t s : buckets_[cell_of(cx, cy)])
                    best = std::min(best, seg_dist(x, segments_[s]));
        if (best <= reach) return best;
        const bool whole_grid = ix0 == 0 && iy0 == 0 && ix1 == nx_ - 1 &&
                                iy1 == ny_ - 1;
        if (whole_grid && std::isfinite(best)) return best;
        if (whole_grid) {
            // grid fully scanned, nothing found (cannot happen: nonempty)
            return best;
        }
        reach = std::max(reach * 2.0,
                         std::isfinite(best) ? best : reach * 2.0);
        reach = std::min(reach, 4.0 * span + std::abs(x[0] - x0_) +
                                    std::abs(x[1] - y0_));
    }
}

bool SegmentGrid::within(const Vec2& x, double radius) const {
    const int ix0 = std::clamp(static_cast<int>((x[0] - radius - x0_) / cell_), 0, nx_ - 1);
    const int ix1 = std::clamp(static_cast<int>((x[0] + radius - x0_) / cell_), 0, nx_ - 1);
    const int iy0 = std::clamp(static_cast<int>((x[1] - radius - y0_) / cell_), 0, ny_ - 1);
    const int iy1 = std::clamp(static_cast<int>((x[1] + radius - y0_) / cell_), 0, ny_ - 1);
    // reject fast when the padded box cannot reach the query point
    if (x[0] < x0_ - radius || x[1] < y0_ - radius ||
        x[0] > x0_ + nx_ * cell_ + radius || x[1] > y0_ + ny_ * cell_ + radius)
        return false;
    for (int cy = iy0; cy <= iy1; ++cy)
        for (int cx = ix0; cx <= ix1; ++cx)
            for (std::uint32_t s : buckets_[cell_of(cx, cy)])
                if (seg_dist(x, segments_[s]) <= radius) return true;
    return false;
}

double directed_sup(const Contour& from, const SegmentGrid& to) {
    double sup = 0.0;
    for (const auto& line : from.components)
        for (const auto& v : line.vertices)
            sup = std::max(sup, to.distance(v));
    return sup;
}

double hausdorff(const Contour& a, const SegmentGrid& ga, const Contour& b,
                 const SegmentGrid& gb) {
    if (a.dim != 2 || b.dim != 2)
        throw usage_error("hausdorff: d=2 contours only");
    if (a.empty() || b.empty())
        throw numeric_error("hausdorff: empty contour");
    return std::max(directed_sup(a, gb), directed_sup(b, ga));
}

double hausdorff(const Contour& a, const Contour& b) {
    if (a.dim != 2 || b.dim != 2)
        throw usage_error("hausdorff: d=2 contours only");
    if (a.empty() || b.empty())
        throw numeric_error("hausdorff: empty contour");
    return hausdorff(a, SegmentGrid(a), b, SegmentGrid(b));
}

} // namespace levelset
