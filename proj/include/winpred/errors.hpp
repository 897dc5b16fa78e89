#pragma once

#include <stdexcept>
#include <string>

namespace winpred {

// Bad or inconsistent input data: unreadable files, malformed records,
// dimension mismatches, empty evaluation sets.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during training or inference (diverged loss, non-finite
// values).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace winpred
