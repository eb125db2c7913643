#pragma once

#include <stdexcept>
#include <string>

namespace swof {

/// Invalid or inconsistent simulation configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. The message carries the path and line number.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scheme produced NaN/Inf or a depth below the roundoff tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swof
