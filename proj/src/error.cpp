#include "caprsoc/error.hpp"

namespace caprsoc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::InternalInconsistency: return "internal_inconsistency";
    case ErrorCode::StepFailure: return "step_failure";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace caprsoc
