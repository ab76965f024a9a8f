#include "ripe/error.hpp"

namespace ripe {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MissingWildType: return "MissingWildType";
    case ErrorCode::InsufficientReplicates: return "InsufficientReplicates";
    case ErrorCode::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorCode::EmptyComponentSet: return "EmptyComponentSet";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InvalidPosition: return "InvalidPosition";
    case ErrorCode::NodeNotInOrdering: return "NodeNotInOrdering";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::GeneSetMismatch: return "GeneSetMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::EdgeBudgetTooLarge: return "EdgeBudgetTooLarge";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::InvalidPosition:
      return ErrorCategory::Usage;
    case ErrorCode::SingularSystem:
    case ErrorCode::CycleDetected:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Usage: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numerical: return 4;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace ripe
