#pragma once

#include <stdexcept>
#include <string>

namespace colbandit {

/// Caller violated an operation precondition (bad index, double reveal, K > N).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration or input data (dimension mismatch, bad ranges).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace colbandit
