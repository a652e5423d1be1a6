#pragma once

#include <stdexcept>
#include <string>

namespace levelset {

/// Invalid arguments or malformed requests (CLI maps these to exit code 1).
class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numeric failures: quadrature non-convergence, undefined quantile regimes
/// (e.g. h >= 1 for the large-sample region), empty contours where one is
/// required, too many failed bootstrap replications. CLI exit code 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system / parsing failures. CLI exit code 3.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace levelset
