#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trace_shape {

enum class ErrorKind {
  ExponentOutOfRange,
  GeometryInvalid,
  BadTolerance,
  ZeroTrace,
  NoConvergence,
  OdeFailure,
  InitFailure,
  OutOfRange,
  QualityFailure,
  MeshInverted,
  NotNormalized,
  NotVolumePreserving,
  Infeasible,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for errors caused by the caller's input (CLI exit code 2); the rest
/// are numerical failures (exit code 3).
bool is_validation_error(ErrorKind kind) noexcept;

/// Every failure raised by the library. Carries the error name and the module
/// that raised it so front ends can report both.
class TraceError : public std::runtime_error {
 public:
  TraceError(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace trace_shape
