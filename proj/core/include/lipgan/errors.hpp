#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace lipgan {

/// Operand shapes do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration: bad spec, bad hyperparameter, malformed config file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf encountered, solver failed to converge, or a loss blew up.
/// Carries the training iteration when raised from the training loop.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        std::optional<long> iteration = std::nullopt)
      : std::runtime_error(what), iteration_(iteration) {}

  std::optional<long> iteration() const noexcept { return iteration_; }

 private:
  std::optional<long> iteration_;
};

/// Malformed input file (bad magic, truncated data, count mismatch).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lipgan
