#pragma once

#include <array>

namespace levelset {

/// Axis-aligned evaluation grid for d = 1 or 2. `cells` counts cells per
/// axis; node grids have cells+1 points per axis, raster grids use cell
/// centers.
struct GridSpec {
    int dim = 2;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};
    std::array<int, 2> cells{64, 64};

    double step(int axis) const {
        return (upper[static_cast<std::size_t>(axis)] -
                lower[static_cast<std::size_t>(axis)]) /
               cells[static_cast<std::size_t>(axis)];
    }
    double node(int axis, int i) const {
        return lower[static_cast<std::size_t>(axis)] + step(axis) * i;
    }
    double center(int axis, int i) const {
        return lower[static_cast<std::size_t>(axis)] + step(axis) * (i + 0.5);
    }
    int nodes(int axis) const { return cells[static_cast<std::size_t>(axis)] + 1; }

    /// Throws usage_error unless bounds are finite, ordered and the
    /// resolution is at least 16 cells per axis.
    void validate() const;
};

} // namespace levelset
