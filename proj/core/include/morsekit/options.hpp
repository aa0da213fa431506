#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace morsekit {

/// Numerical knobs shared by the analysis pipeline.
///
/// The defaults are separated by orders of magnitude so that "converged",
/// "degenerate" and "same point" never compete with each other.
struct Tolerances {
  double critical_tol = 1e-8;        // chart-gradient norm accepted as critical
  double degenerate_tol = 1e-6;      // |det Hessian| at or below this is degenerate
  double dedupe_radius = 1e-4;       // critical points closer than this merge
  double membership_threshold = 1e-3;  // minimum chart membership score
  double match_radius = 1e-4;        // engine-vs-oracle location agreement
  double max_newton_step = 0.1;      // step cap for the critical-point Newton
  int max_newton_iterations = 100;
  int max_draws = 64;                // rejection budget for coefficient draws
  double k_inflation = 1.1;          // safety factor on measured K bounds
};

/// Applies `key=value` overrides. Unknown keys throw kInvalidArgument.
void apply_overrides(Tolerances& tol, const std::map<std::string, std::string>& overrides);

}  // namespace morsekit
