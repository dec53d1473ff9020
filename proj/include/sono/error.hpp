#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sono {

enum class ErrorCode {
  // usage
  InvalidArgument,
  // shapes and indices
  ZeroNorm,
  DimMismatch,
  ShapeMismatch,
  IndexOutOfRange,
  NonPositiveTemperature,
  EmptyShotList,
  LTooLarge,
  TooFewClasses,
  StepOutOfRange,
  EmptyTestSet,
  UnsupportedMethod,
  InsufficientHistory,
  // file formats
  BadMagic,
  TruncatedFile,
  NonFiniteEntry,
  CountMismatch,
  NotNormalized,
  IoError,
  AngleInfeasible,
  // numerics
  NonFiniteState,
  NonFiniteLoss,
};

/// Coarse class of an error, used by the CLI to pick an exit code.
enum class ErrorKind { Usage, Data, Numerical };

ErrorKind kind_of(ErrorCode code) noexcept;
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace sono
