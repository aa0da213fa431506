#pragma once

#include <string>
#include <vector>

#include "morsekit/expression.hpp"
#include "morsekit/manifold.hpp"

namespace morsekit {

/// A coordinate projection onto the d ambient coordinates in `index_set`.
/// sigma(j) is the j-th smallest chart coordinate (0-based throughout).
struct Chart {
  std::vector<int> index_set;   // sorted, size d
  std::vector<int> complement;  // sorted, size n - d

  int dim() const { return static_cast<int>(index_set.size()); }
  int sigma(int j) const { return index_set[static_cast<std::size_t>(j)]; }

  /// Chart coordinates pi(x).
  Vec project(const Vec& x) const;

  /// 1-based set notation, e.g. "{1,3}".
  std::string label() const;
};

Chart make_chart(std::vector<int> index_set, int ambient_dim);

/// All C(n, d) coordinate charts in lexicographic order of their index sets.
std::vector<Chart> enumerate_charts(int ambient_dim, int intrinsic_dim);

/// |det| of the I-rows of an orthonormal tangent basis: the product of the
/// singular values of the projected tangent map. Lies in [0, 1] and is
/// positive exactly where pi_I is a local chart.
double membership_score(const LocalFrame& frame, const Chart& chart);
double membership_score(const ImplicitManifold& m, const Vec& x, const Chart& chart);

/// Squared membership score as an ambient expression,
///     det(J_{:,I^c})^2 / det(J J^T),
/// which agrees with membership_score(x)^2 at every regular point. Built with
/// symbolic derivatives of the constraints.
Expr chart_score_squared(const ImplicitManifold& m, const Chart& chart);

/// Point of M over chart coordinates u on the sheet through `seed`.
///
/// Newton in the non-chart coordinates with the chart coordinates pinned to
/// u, so chart.project(result) == u exactly. Throws kChartMembership if the
/// seed is not in the chart, kMaxIterations, or kSheetJump if the result lies
/// farther than 10 |u - pi(seed)| from the seed.
PointOnM solve_parametrization(const ImplicitManifold& m, const Chart& chart, const Vec& u,
                               const Vec& seed, double membership_threshold = 1e-3);

/// Chart assignment of a sample set: each sample goes to the chart with the
/// highest membership score, lowest chart index on ties.
struct CoverAtlas {
  std::vector<Chart> charts;
  std::vector<Vec> samples;
  std::vector<int> assignment;            // per sample
  std::vector<std::vector<double>> scores;  // [sample][chart]
  double membership_threshold = 1e-3;

  std::size_t num_samples() const { return samples.size(); }
  double best_score(std::size_t sample) const {
    return scores[sample][static_cast<std::size_t>(assignment[sample])];
  }
  /// Indices of samples assigned to `chart`.
  std::vector<std::size_t> assigned_to(int chart) const;
};

/// Throws kUncoveredPoint if some sample has no chart scoring above the
/// threshold (a tolerance problem: the charts always cover M).
CoverAtlas build_cover(const ImplicitManifold& m, const std::vector<PointOnM>& samples,
                       double membership_threshold = 1e-3);

/// Half the distance from `seed` to the nearest sample whose score in
/// `chart` is below the threshold; +inf if there is none.
double chart_radius(const CoverAtlas& atlas, int chart, const Vec& seed);

}  // namespace morsekit
