#include "morsekit/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morsekit/error.hpp"

namespace morsekit {

Vec projected_field(const ImplicitManifold& m, const Vec& x, int i) {
  if (i < 0 || i >= m.ambient_dim()) throw Error(ErrorCode::kInvalidArgument, "coordinate index out of range");
  const LocalFrame f = local_frame(m, x);
  return f.projector.col(i);
}

ChartDerivatives chart_derivatives(const Jet& f, const LocalFrame& frame, const Chart& chart) {
  const int d = chart.dim();
  const int q = static_cast<int>(chart.complement.size());
  const int n = d + q;
  Mat ju(q, d);
  Mat jy(q, q);
  for (int j = 0; j < d; ++j) ju.col(j) = frame.jacobian.col(chart.sigma(j));
  for (int k = 0; k < q; ++k) jy.col(k) = frame.jacobian.col(chart.complement[k]);
  const Eigen::PartialPivLU<Mat> lu(jy);

  // E = d tau / du: identity on chart rows, -J_y^{-1} J_u on the others.
  const Mat dy = -lu.solve(ju);
  Mat e = Mat::Zero(n, d);
  for (int j = 0; j < d; ++j) e(chart.sigma(j), j) = 1.0;
  for (int k = 0; k < q; ++k) e.row(chart.complement[k]) = dy.row(k);

  Vec grad_y(q);
  for (int k = 0; k < q; ++k) grad_y(k) = f.gradient(chart.complement[k]);
  const Vec mu = lu.transpose().solve(grad_y);

  Mat lagrangian = f.hessian;
  for (int k = 0; k < q; ++k) lagrangian -= mu(k) * frame.hessians[k];

  ChartDerivatives out;
  out.gradient = e.transpose() * f.gradient;
  const Mat h = e.transpose() * lagrangian * e;
  out.hessian = 0.5 * (h + h.transpose());
  return out;
}

namespace {

LocalFrame frame_in_chart(const ImplicitManifold& m, const Chart& chart, const Vec& x,
                          double membership_threshold) {
  LocalFrame frame = local_frame(m, x);
  const double score = membership_score(frame, chart);
  if (!(score > membership_threshold)) {
    throw Error(ErrorCode::kChartMembership,
                "point is outside chart " + chart.label() + " (score " + std::to_string(score) + ")");
  }
  return frame;
}

}  // namespace

Vec chart_gradient(const ScalarField& f, const ImplicitManifold& m, const Chart& chart, const Vec& x,
                   double membership_threshold) {
  const LocalFrame frame = frame_in_chart(m, chart, x, membership_threshold);
  return chart_derivatives(f.jet(x), frame, chart).gradient;
}

Mat chart_hessian(const ScalarField& f, const ImplicitManifold& m, const Chart& chart, const Vec& x,
                  double membership_threshold) {
  const LocalFrame frame = frame_in_chart(m, chart, x, membership_threshold);
  return chart_derivatives(f.jet(x), frame, chart).hessian;
}

TierFrame tier_frame(const ImplicitManifold& m, const Vec& x) {
  TierFrame tf{local_frame(m, x), {}};
  const int n = m.ambient_dim();
  tf.projector_derivatives.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    tf.projector_derivatives.push_back(projector_derivative(tf.frame, tf.frame.projector.col(a)));
  }
  return tf;
}

std::vector<TierFrame> tier_frames(const ImplicitManifold& m, const std::vector<Vec>& points) {
  std::vector<TierFrame> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(tier_frame(m, x));
  return out;
}

double Tiers::max_abs() const {
  double v = std::abs(value);
  if (first.size()) v = std::max(v, first.cwiseAbs().maxCoeff());
  if (second.size()) v = std::max(v, second.cwiseAbs().maxCoeff());
  return v;
}

Tiers d_tiers(const Jet& jet, const TierFrame& tf) {
  const Mat& p = tf.frame.projector;
  const int n = static_cast<int>(p.rows());
  Tiers t;
  t.value = jet.value;
  t.first = p * jet.gradient;
  t.second.resize(n, n);
  const Mat hp = jet.hessian * p;
  for (int a = 0; a < n; ++a) {
    // d/dv_a of (P grad phi), v_a = P e_a.
    const Vec col = tf.projector_derivatives[a] * jet.gradient + p * hp.col(a);
    t.second.row(a) = col.transpose();
  }
  return t;
}

Tiers d_tiers(const ScalarField& f, const TierFrame& tf) { return d_tiers(f.jet(tf.frame.x), tf); }

double c2_distance(const ScalarField& f, const ScalarField& g, const std::vector<TierFrame>& frames) {
  if (frames.empty()) throw Error(ErrorCode::kInvalidArgument, "c2_distance needs samples");
  double worst = 0.0;
  for (const auto& tf : frames) {
    const Jet a = f.jet(tf.frame.x);
    const Jet b = g.jet(tf.frame.x);
    const Jet diff{a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian};
    worst = std::max(worst, d_tiers(diff, tf).max_abs());
  }
  return worst;
}

double c2_distance(const ScalarField& f, const ScalarField& g, const ImplicitManifold& m,
                   const std::vector<Vec>& samples) {
  return c2_distance(f, g, tier_frames(m, samples));
}

int morse_index(const CriticalPoint& cp, double degenerate_tol) {
  if (!(std::abs(cp.det_hessian) > degenerate_tol)) {
    throw Error(ErrorCode::kDegenerateCriticalPoint,
                "critical point is degenerate (|det H| = " + std::to_string(std::abs(cp.det_hessian)) + ")");
  }
  const Eigen::SelfAdjointEigenSolver<Mat> eig(cp.hessian, Eigen::EigenvaluesOnly);
  return static_cast<int>((eig.eigenvalues().array() < 0.0).count());
}

CriticalPoint classify_point(const ScalarField& f, const ImplicitManifold& m, const Vec& x, int chart,
                             const Chart& chart_def, double degenerate_tol) {
  const LocalFrame frame = local_frame(m, x);
  const ChartDerivatives cd = chart_derivatives(f.jet(x), frame, chart_def);
  CriticalPoint cp;
  cp.location = PointOnM{x, frame.values.cwiseAbs().maxCoeff()};
  cp.chart = chart;
  cp.gradient = cd.gradient;
  cp.grad_norm = cd.gradient.norm();
  cp.hessian = cd.hessian;
  cp.det_hessian = cd.hessian.determinant();
  cp.degenerate = !(std::abs(cp.det_hessian) > degenerate_tol);
  if (!cp.degenerate) cp.morse_index = morse_index(cp, degenerate_tol);
  cp.margin = cd.gradient.cwiseAbs().sum() + std::abs(cp.det_hessian);
  return cp;
}

namespace {

struct Candidate {
  Vec x;
  int chart;
  double score;
};

// Newton with a pseudo-inverse step. Once the gradient is below critical_tol
// the iteration keeps polishing while it still reduces the gradient, so that
// slow (degenerate) convergence from different seeds lands on one point.
std::optional<Vec> newton_in_chart(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                   int chart, const Vec& seed, const Tolerances& tol) {
  const Chart& c = atlas.charts[static_cast<std::size_t>(chart)];
  const double cap = std::min(tol.max_newton_step, chart_radius(atlas, chart, seed));
  Vec x = seed;
  std::optional<Vec> best;
  double best_norm = std::numeric_limits<double>::infinity();
  try {
    for (int it = 0; it < tol.max_newton_iterations; ++it) {
      const LocalFrame frame = local_frame(m, x);
      if (!(membership_score(frame, c) > atlas.membership_threshold)) break;
      const ChartDerivatives cd = chart_derivatives(f.jet(x), frame, c);
      const double gnorm = cd.gradient.norm();
      if (gnorm <= tol.critical_tol) {
        if (gnorm >= best_norm) break;  // polishing stalled
        best = x;
        best_norm = gnorm;
        if (gnorm == 0.0) break;
      } else if (best) {
        break;
      }
      const Eigen::SelfAdjointEigenSolver<Mat> eig(cd.hessian);
      const Vec& lam = eig.eigenvalues();
      const double cutoff = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
      Vec coeff = eig.eigenvectors().transpose() * cd.gradient;
      for (Eigen::Index i = 0; i < coeff.size(); ++i) {
        coeff(i) = std::abs(lam(i)) > cutoff ? coeff(i) / lam(i) : 0.0;
      }
      Vec step = -(eig.eigenvectors() * coeff);
      const double len = step.norm();
      if (len == 0.0) {
        if (!best && gnorm <= tol.critical_tol) best = x;
        break;
      }
      if (len > cap) step *= cap / len;
      x = solve_parametrization(m, c, c.project(x) + step, x, atlas.membership_threshold).coords;
    }
  } catch (const Error&) {
    // Left the chart, jumped sheets or hit a singular Jacobian: drop the seed,
    // unless it had already converged.
  }
  return best;
}

std::vector<CriticalPoint> dedupe(std::vector<Candidate> found, const ScalarField& f,
                                  const ImplicitManifold& m, const CoverAtlas& atlas, const Tolerances& tol) {
  auto lex_less = [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  // Best-conditioned chart first, so each merged group keeps its most reliable member.
  std::sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.chart != b.chart) return a.chart < b.chart;
    return lex_less(a.x, b.x);
  });
  std::vector<Candidate> kept;
  for (auto& cand : found) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return (k.x - cand.x).norm() <= tol.dedupe_radius;
    });
    if (!dup) kept.push_back(std::move(cand));
  }
  std::sort(kept.begin(), kept.end(), [&](const Candidate& a, const Candidate& b) { return lex_less(a.x, b.x); });
  std::vector<CriticalPoint> out;
  out.reserve(kept.size());
  for (const auto& k : kept) {
    out.push_back(classify_point(f, m, k.x, k.chart, atlas.charts[static_cast<std::size_t>(k.chart)],
                                 tol.degenerate_tol));
  }
  return out;
}

}  // namespace

CriticalSearch find_critical_points_in_chart(const ScalarField& f, const ImplicitManifold& m,
                                             const CoverAtlas& atlas, int chart,
                                             const std::vector<std::size_t>& seeds, const Tolerances& tol,
                                             const std::function<bool(const Vec&)>& keep) {
  CriticalSearch search;
  std::vector<Candidate> found;
  const Chart& c = atlas.charts[static_cast<std::size_t>(chart)];
  for (std::size_t s : seeds) {
    ++search.seeds;
    auto x = newton_in_chart(f, m, atlas, chart, atlas.samples[s], tol);
    if (!x) {
      ++search.dropped;
      continue;
    }
    ++search.converged;
    if (keep && !keep(*x)) continue;
    found.push_back({*x, chart, membership_score(m, *x, c)});
  }
  search.points = dedupe(std::move(found), f, m, atlas, tol);
  return search;
}

CriticalSearch find_critical_points(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                    const Tolerances& tol) {
  CriticalSearch search;
  std::vector<Candidate> found;
  for (std::size_t s = 0; s < atlas.num_samples(); ++s) {
    ++search.seeds;
    const int chart = atlas.assignment[s];
    auto x = newton_in_chart(f, m, atlas, chart, atlas.samples[s], tol);
    if (!x) {
      ++search.dropped;
      continue;
    }
    ++search.converged;
    found.push_back({*x, chart, membership_score(m, *x, atlas.charts[static_cast<std::size_t>(chart)])});
  }
  search.points = dedupe(std::move(found), f, m, atlas, tol);
  return search;
}

}  // namespace morsekit
