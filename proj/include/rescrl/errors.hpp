#pragma once

#include <stdexcept>
#include <string>

namespace rescrl {

/// Malformed or out-of-range user configuration (run configs, env files, sweep specs).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A solve that finished but failed its own post-condition checks.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rescrl
