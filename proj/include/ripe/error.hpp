#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ripe {

enum class ErrorCode {
  Usage,
  Parse,
  ValueOutOfRange,
  CycleDetected,
  MissingWildType,
  InsufficientReplicates,
  NotStronglyConnected,
  EmptyComponentSet,
  LengthMismatch,
  InfeasibleTarget,
  SingularSystem,
  InvalidPosition,
  NodeNotInOrdering,
  EmptyInput,
  GeneSetMismatch,
  LabelMismatch,
  EdgeBudgetTooLarge,
  Io,
};

enum class ErrorCategory { Usage, Data, Numerical };

std::string_view error_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

// CLI exit code for a category: 2 usage, 3 data, 4 numerical.
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }
  // Message without the code-name prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace ripe
