#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "morsekit/calculus.hpp"
#include "morsekit/chart.hpp"
#include "morsekit/options.hpp"
#include "morsekit/regions.hpp"

namespace morsekit {

/// The chart gradient viewed as a map U -> R^d; its regular values are the
/// good linear shifts.
Vec gradient_map(const ScalarField& f, const ImplicitManifold& m, const Chart& chart, const Vec& x,
                 double membership_threshold = 1e-3);

using PointFilter = std::function<bool(const Vec&)>;

struct MorseReport {
  bool morse = false;
  double min_margin = 0.0;  // +inf when no critical point was found
  std::vector<CriticalPoint> critical_points;
  std::vector<CriticalPoint> degenerate_points;
};

/// Runs the critical-point search over the whole atlas and keeps the points
/// accepted by `region` (all of them when empty).
MorseReport is_morse(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                     const Tolerances& tol = {}, const PointFilter& region = {});

struct ShiftChoice {
  Vec a;  // f - sum_l a_l x_{sigma(l)} is Morse on the chart region
  int draws = 0;
  std::vector<CriticalPoint> critical_points;  // of the shifted field, inside the region
};

/// Rejection sampling: draws a uniformly from (-bound, bound)^d and accepts
/// the first draw whose shifted field has only nondegenerate critical points
/// among those found from seeds in `region`. Throws kInvalidArgument for
/// bound <= 0, kRejectionBudgetExceeded after tol.max_draws draws.
ShiftChoice choose_regular_shift(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                 int chart, double bound, std::uint64_t rng_seed, const Tolerances& tol = {},
                                 const PointFilter& region = {});

/// Per-chart data of the openness certificate.
struct OpennessChart {
  int chart = 0;
  double k = 0.0;        // min over C_i of sum_j |D_{sigma(j)} h| + |det(D_{sigma(j1)} D_{sigma(j2)} h)|
  double l = 0.0;        // max over C_i of |D_{sigma(j1)} D_{sigma(j2)} h|
  double epsilon = 0.0;  // largest eps with d! ((L + eps)^d - L^d) + d eps < K
  int samples = 0;
};

struct OpennessResult {
  double epsilon = 0.0;
  std::vector<OpennessChart> charts;
};

/// Largest eps with d! ((L + eps)^d - L^d) + d eps < K, by bisection.
double solve_openness_inequality(double k, double l, int d);

/// Openness radius of a Morse h over the closed sets C_i of `charts` (all
/// charts when empty). K_i and L_i are taken over the atlas samples in C_i
/// and over h's critical points there. Throws kNotMorse when a critical
/// point in those sets is degenerate.
OpennessResult openness_radius(const ScalarField& h, const ImplicitManifold& m, const CoverAtlas& atlas,
                               const FineCover& cover, const std::vector<int>& charts = {},
                               const Tolerances& tol = {});

struct PerturbationStep {
  int chart_index = 0;
  Vec coefficients;               // g_i = g_{i-1} + lambda_i sum_l a_l x_{sigma(l)}
  double delta_budget = 0.0;
  double openness = 0.0;          // radius of g_{i-1} on the clean charts (+inf on step 1)
  double k_bound = 0.0;
  double coefficient_bound = 0.0;
  int draws = 0;
  bool has_cutoff = false;        // step 1 applies the shift globally
  std::vector<double> margins_before;
  std::vector<double> margins_after;
  double c2_spent = 0.0;
  double gluing_residual = 0.0;   // max tiers of g_i - g'_i over sampled C_i
};

struct MorsifyTrace {
  std::vector<PerturbationStep> steps;
  double total_c2 = 0.0;
  std::vector<CriticalPoint> final_critical_points;
  std::vector<double> final_margins;
  double epsilon_requested = 0.0;
  double epsilon_prime = 0.0;
};

struct MorsifyResult {
  ScalarField g;
  MorsifyTrace trace;
};

/// Perturbs f into a Morse function within sampled C^2 distance eps, one
/// chart at a time in chart order.
MorsifyResult morsify(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                      const FineCover& cover, double epsilon, std::uint64_t rng_seed, const Tolerances& tol = {});

/// Tiers of sum_l a_l x_{sigma(l)} (optionally times lambda) bound K: the
/// inflated max over samples of every tier of every lambda * x_{sigma(l)}.
double linear_shift_bound(const Chart& chart, const std::optional<ScalarField>& lambda,
                          const std::vector<TierFrame>& frames, double inflation);

}  // namespace morsekit
