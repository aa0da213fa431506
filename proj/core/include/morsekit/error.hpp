#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace morsekit {

/// Machine-readable failure categories. The CLI reports these by name.
enum class ErrorCode {
  kDomainError,
  kParseError,
  kInvalidArgument,
  kNotRegularPoint,
  kMaxIterations,
  kProjectionTooFar,
  kSheetJump,
  kChartMembership,
  kUncoveredPoint,
  kDegenerateCriticalPoint,
  kOverlappingSets,
  kNotNested,
  kCoverFailure,
  kRejectionBudgetExceeded,
  kNotMorse,
  kDegeneratePresent,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(ErrorCode::kParseError, format(message, line, column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  int line_;
  int column_;
};

}  // namespace morsekit
