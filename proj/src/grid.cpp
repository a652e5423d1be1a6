#include "levelset/grid.hpp"

#include "levelset/errors.hpp"

#include <cmath>

namespace levelset {

void GridSpec::validate() const {
    if (dim < 1 || dim > 2) throw usage_error("grid: dim must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        const auto i = static_cast<std::size_t>(a);
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw usage_error("grid: bounds must be finite");
        if (!(lower[i] < upper[i]))
            throw usage_error("grid: lower bound must be below upper bound");
        if (cells[i] < 16)
            throw usage_error("grid: resolution must be at least 16 per axis");
    }
}

} // namespace levelset
