#pragma once

#include <stdexcept>
#include <string>

namespace gaussdaemon {

enum class ErrorKind {
  InvalidDimension,
  InvalidArgument,
  Symmetry,
  Unphysical,
  Numeric,
  Symplecticity,
  UnsupportedDimension,
  NoSteadyState,
  Convergence,
  StepSize,
  InsufficientData,
  Parse,
  Instability,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gaussdaemon
