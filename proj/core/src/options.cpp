#include "morsekit/options.hpp"

#include <charconv>
#include <functional>

#include "morsekit/error.hpp"

namespace morsekit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotRegularPoint: return "NotRegularPoint";
    case ErrorCode::kMaxIterations: return "MaxIterations";
    case ErrorCode::kProjectionTooFar: return "ProjectionTooFar";
    case ErrorCode::kSheetJump: return "SheetJump";
    case ErrorCode::kChartMembership: return "ChartMembership";
    case ErrorCode::kUncoveredPoint: return "UncoveredPoint";
    case ErrorCode::kDegenerateCriticalPoint: return "DegenerateCriticalPoint";
    case ErrorCode::kOverlappingSets: return "OverlappingSets";
    case ErrorCode::kNotNested: return "NotNested";
    case ErrorCode::kCoverFailure: return "CoverFailure";
    case ErrorCode::kRejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::kNotMorse: return "NotMorse";
    case ErrorCode::kDegeneratePresent: return "DegeneratePresent";
  }
  return "Unknown";
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance '" + key + "' has malformed value '" + text + "'");
  }
  return v;
}

}  // namespace

void apply_overrides(Tolerances& tol, const std::map<std::string, std::string>& overrides) {
  const std::map<std::string, double*> reals = {
      {"critical_tol", &tol.critical_tol},
      {"degenerate_tol", &tol.degenerate_tol},
      {"dedupe_radius", &tol.dedupe_radius},
      {"membership_threshold", &tol.membership_threshold},
      {"match_radius", &tol.match_radius},
      {"max_newton_step", &tol.max_newton_step},
      {"k_inflation", &tol.k_inflation},
  };
  const std::map<std::string, int*> ints = {
      {"max_newton_iterations", &tol.max_newton_iterations},
      {"max_draws", &tol.max_draws},
  };
  for (const auto& [key, value] : overrides) {
    if (auto it = reals.find(key); it != reals.end()) {
      const double v = parse_number<double>(key, value);
      if (!(v > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance '" + key + "' must be positive");
      *it->second = v;
    } else if (auto jt = ints.find(key); jt != ints.end()) {
      const int v = parse_number<int>(key, value);
      if (v <= 0) throw Error(ErrorCode::kInvalidArgument, "tolerance '" + key + "' must be positive");
      *jt->second = v;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown tolerance '" + key + "'");
    }
  }
}

}  // namespace morsekit
