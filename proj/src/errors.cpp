#include "trace_shape/errors.hpp"

namespace trace_shape {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::GeometryInvalid: return "GeometryInvalid";
    case ErrorKind::BadTolerance: return "BadTolerance";
    case ErrorKind::ZeroTrace: return "ZeroTrace";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OdeFailure: return "OdeFailure";
    case ErrorKind::InitFailure: return "InitFailure";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::QualityFailure: return "QualityFailure";
    case ErrorKind::MeshInverted: return "MeshInverted";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NotVolumePreserving: return "NotVolumePreserving";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ExponentOutOfRange:
    case ErrorKind::GeometryInvalid:
    case ErrorKind::BadTolerance:
    case ErrorKind::OutOfRange:
    case ErrorKind::QualityFailure:
    case ErrorKind::NotVolumePreserving:
    case ErrorKind::Infeasible:
    case ErrorKind::ConfigError:
    case ErrorKind::IoError:
      return true;
    default:
      return false;
  }
}

TraceError::TraceError(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      module_(std::move(module)) {}

}  // namespace trace_shape
