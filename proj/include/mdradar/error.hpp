#pragma once

#include <stdexcept>
#include <string>

namespace mdradar {

/// File or serialized-data problems (bad magic, truncated payload, shape mismatch).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric failures of the processing chain (all-zero chirp, empty map, ...).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mdradar
