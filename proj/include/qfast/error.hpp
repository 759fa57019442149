#pragma once

#include <stdexcept>
#include <string>

namespace qfast {

enum class ErrorKind {
  NotHermitian,
  NotUnitary,
  DimMismatch,
  BadQubitSet,
  LengthMismatch,
  NonFiniteGradient,
  NoPlacements,
  LayerBudgetExceeded,
  DecompositionFailed,
  OptimizationFailed,
  MalformedFile,
  ShapeMismatch,
  Unsupported,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable kind next to the message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace qfast
