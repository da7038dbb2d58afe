#pragma once

#include <stdexcept>
#include <string>

namespace fmfusion {

/// Problems with input data: unreadable files, malformed tables, broken
/// manifest invariants. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failures: non-finite losses, degenerate geometry. Maps to CLI
/// exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fmfusion
