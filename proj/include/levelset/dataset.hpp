#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace levelset {

/// Immutable sample matrix, row-major n×d.
struct Dataset {
    std::size_t n = 0;
    int dim = 0;
    std::vector<double> coords;

    double coord(std::size_t i, int j) const {
        return coords[i * static_cast<std::size_t>(dim) +
                      static_cast<std::size_t>(j)];
    }
    std::span<const double> row(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

/// Builds a dataset from row-major coordinates, validating finiteness.
Dataset make_dataset(int dim, std::vector<double> coords);

/// Headerless CSV, one row per observation, d columns, '.' decimal, UTF-8.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& ds, const std::string& path);

} // namespace levelset
