#include "morsekit/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "morsekit/error.hpp"

namespace morsekit {

Vec Chart::project(const Vec& x) const {
  Vec u(dim());
  for (int j = 0; j < dim(); ++j) u(j) = x(sigma(j));
  return u;
}

std::string Chart::label() const {
  std::string s = "{";
  for (std::size_t j = 0; j < index_set.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(index_set[j] + 1);
  }
  return s + "}";
}

Chart make_chart(std::vector<int> index_set, int ambient_dim) {
  std::sort(index_set.begin(), index_set.end());
  if (std::adjacent_find(index_set.begin(), index_set.end()) != index_set.end() ||
      index_set.empty() || index_set.front() < 0 || index_set.back() >= ambient_dim) {
    throw Error(ErrorCode::kInvalidArgument, "invalid chart index set");
  }
  Chart c;
  c.index_set = std::move(index_set);
  for (int i = 0; i < ambient_dim; ++i) {
    if (!std::binary_search(c.index_set.begin(), c.index_set.end(), i)) c.complement.push_back(i);
  }
  return c;
}

std::vector<Chart> enumerate_charts(int ambient_dim, int intrinsic_dim) {
  std::vector<Chart> out;
  std::vector<int> idx(static_cast<std::size_t>(intrinsic_dim));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    out.push_back(make_chart(idx, ambient_dim));
    int j = intrinsic_dim - 1;
    while (j >= 0 && idx[j] == ambient_dim - intrinsic_dim + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int k = j + 1; k < intrinsic_dim; ++k) idx[k] = idx[k - 1] + 1;
  }
  return out;
}

double membership_score(const LocalFrame& frame, const Chart& chart) {
  const int d = chart.dim();
  Mat rows(d, d);
  for (int j = 0; j < d; ++j) rows.row(j) = frame.tangent.row(chart.sigma(j));
  return std::abs(rows.determinant());
}

double membership_score(const ImplicitManifold& m, const Vec& x, const Chart& chart) {
  return membership_score(local_frame(m, x), chart);
}

namespace {

// Leibniz expansion; codimension is tiny at desk scale.
Expr symbolic_det(const std::vector<std::vector<Expr>>& a) {
  const int q = static_cast<int>(a.size());
  std::vector<int> perm(static_cast<std::size_t>(q));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Expr> terms;
  do {
    int inversions = 0;
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Expr t = Expr::constant(1.0);
    for (int i = 0; i < q; ++i) t = t * a[i][perm[i]];
    terms.push_back(inversions % 2 ? -t : t);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum(terms);
}

}  // namespace

Expr chart_score_squared(const ImplicitManifold& m, const Chart& chart) {
  const int n = m.ambient_dim();
  const int q = m.codim();
  std::vector<std::vector<Expr>> jac(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    for (int j = 0; j < n; ++j) jac[k].push_back(differentiate(m.constraints()[k].expr(), j));
  }
  std::vector<std::vector<Expr>> minor(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    for (int j : chart.complement) minor[k].push_back(jac[k][j]);
  }
  std::vector<std::vector<Expr>> gram(static_cast<std::size_t>(q), std::vector<Expr>(q));
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      std::vector<Expr> terms;
      for (int j = 0; j < n; ++j) terms.push_back(jac[a][j] * jac[b][j]);
      gram[a][b] = sum(terms);
    }
  }
  return pow(symbolic_det(minor), 2) / symbolic_det(gram);
}

PointOnM solve_parametrization(const ImplicitManifold& m, const Chart& chart, const Vec& u,
                               const Vec& seed, double membership_threshold) {
  if (u.size() != chart.dim()) throw Error(ErrorCode::kInvalidArgument, "u has wrong dimension");
  const double seed_score = membership_score(m, seed, chart);
  if (!(seed_score > membership_threshold)) {
    throw Error(ErrorCode::kChartMembership,
                "seed is not in chart " + chart.label() + " (score " + std::to_string(seed_score) + ")");
  }
  const int q = m.codim();
  Vec x = seed;
  for (int j = 0; j < chart.dim(); ++j) x(chart.sigma(j)) = u(j);
  for (int it = 0;; ++it) {
    const Vec c = eval_constraints(m, x);
    const double residual = c.cwiseAbs().maxCoeff();
    if (residual <= m.projection_tol()) {
      const double jump = (x - seed).norm();
      const double moved = (u - chart.project(seed)).norm();
      if (jump > 10.0 * moved + 1e-6) {
        throw Error(ErrorCode::kSheetJump, "parametrization converged on a different sheet");
      }
      return PointOnM{x, residual};
    }
    if (it >= 100) break;
    const Mat j = constraint_jacobian(m, x);
    Mat jy(q, q);
    for (int k = 0; k < q; ++k) jy.col(k) = j.col(chart.complement[k]);
    Eigen::FullPivLU<Mat> lu(jy);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::kChartMembership, "chart lost invertibility during parametrization");
    }
    const Vec dy = lu.solve(c);
    for (int k = 0; k < q; ++k) x(chart.complement[k]) -= dy(k);
  }
  throw Error(ErrorCode::kMaxIterations, "parametrization Newton did not converge in 100 steps");
}

std::vector<std::size_t> CoverAtlas::assigned_to(int chart) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == chart) out.push_back(i);
  }
  return out;
}

CoverAtlas build_cover(const ImplicitManifold& m, const std::vector<PointOnM>& samples,
                       double membership_threshold) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "build_cover needs samples");
  CoverAtlas atlas;
  atlas.charts = enumerate_charts(m.ambient_dim(), m.intrinsic_dim());
  atlas.membership_threshold = membership_threshold;
  atlas.samples.reserve(samples.size());
  for (const auto& p : samples) {
    const LocalFrame f = local_frame(m, p.coords);
    std::vector<double> row;
    int best = 0;
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
      row.push_back(membership_score(f, atlas.charts[c]));
      if (row.back() > row[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    if (!(row[static_cast<std::size_t>(best)] > membership_threshold)) {
      std::string where;
      for (Eigen::Index i = 0; i < p.coords.size(); ++i) {
        where += (i ? ", " : "") + std::to_string(p.coords(i));
      }
      throw Error(ErrorCode::kUncoveredPoint,
                  "sample (" + where + ") has best membership score " +
                      std::to_string(row[static_cast<std::size_t>(best)]) + " <= threshold");
    }
    atlas.samples.push_back(p.coords);
    atlas.scores.push_back(std::move(row));
    atlas.assignment.push_back(best);
  }
  return atlas;
}

double chart_radius(const CoverAtlas& atlas, int chart, const Vec& seed) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atlas.samples.size(); ++i) {
    if (atlas.scores[i][static_cast<std::size_t>(chart)] < atlas.membership_threshold) {
      best = std::min(best, (atlas.samples[i] - seed).norm());
    }
  }
  return 0.5 * best;
}

}  // namespace morsekit
