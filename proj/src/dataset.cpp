#include "levelset/dataset.hpp"

#include "levelset/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace levelset {

Dataset make_dataset(int dim, std::vector<double> coords) {
    if (dim < 1) throw usage_error("dataset dimension must be >= 1");
    if (coords.empty() || coords.size() % static_cast<std::size_t>(dim) != 0)
        throw usage_error("dataset coordinate count must be a multiple of dim");
    for (double v : coords)
        if (!std::isfinite(v))
            throw usage_error("dataset coordinates must be finite");
    Dataset ds;
    ds.dim = dim;
    ds.coords = std::move(coords);
    ds.n = ds.coords.size() / static_cast<std::size_t>(dim);
    return ds;
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset file: " + path);
    std::vector<double> coords;
    int dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() &&
                       (cell[used] == ' ' || cell[used] == '\r' ||
                        cell[used] == '\t'))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                coords.push_back(v);
            } catch (const std::exception&) {
                throw io_error("malformed CSV value at " + path + ":" +
                               std::to_string(lineno));
            }
            ++cols;
        }
        if (dim == 0) {
            dim = cols;
        } else if (cols != dim) {
            throw io_error("inconsistent column count at " + path + ":" +
                           std::to_string(lineno));
        }
    }
    if (dim == 0) throw io_error("empty dataset file: " + path);
    try {
        return make_dataset(dim, std::move(coords));
    } catch (const usage_error& e) {
        throw io_error(std::string("invalid dataset in ") + path + ": " +
                       e.what());
    }
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write dataset file: " + path);
    char buf[64];
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (int j = 0; j < ds.dim; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.coord(i, j));
            out << buf;
            if (j + 1 < ds.dim) out << ',';
        }
        out << '\n';
    }
    if (!out) throw io_error("failed writing dataset file: " + path);
}

} // namespace levelset
