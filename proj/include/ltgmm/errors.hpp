#pragma once

#include <stdexcept>
#include <string>

namespace ltgmm {

// Invalid or inconsistent run configuration (bad key, unparsable value,
// out-of-range setting).  The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation failed to produce a usable result (non-finite intermediate,
// failed fit).  The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem or serialization failure (unreadable file, malformed content,
// unwritable output).  The CLI maps this to exit code 4.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ltgmm
