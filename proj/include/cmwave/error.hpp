#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace cmwave {

enum class ErrorCode {
  // configuration / validation
  NonPositiveMass,
  NonPositiveHbar,
  NonPositiveTau,
  NonPositiveInitialWidth,
  NonFiniteParameter,
  InvalidSchedule,
  InvalidArgument,
  InvalidGrid,
  GridTooCoarse,
  AliasingRisk,
  OutOfRange,
  ParseError,
  UnknownKey,
  // numerical failures
  WidthUnderflow,
  StepSizeUnderflow,
  NonFiniteState,
  Overflow,
};

std::string_view to_string(ErrorCode code);

/// True for codes that indicate a bad configuration rather than a failed run.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + " (" + field + "): " + message),
        code_(code),
        field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  /// Name of the offending field or operation.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace cmwave
