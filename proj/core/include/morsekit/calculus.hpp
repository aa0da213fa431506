#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "morsekit/chart.hpp"
#include "morsekit/manifold.hpp"
#include "morsekit/options.hpp"
#include "morsekit/scalar_field.hpp"

namespace morsekit {

/// D_i(x) = P(x) e_i, the projection of the i-th coordinate field onto T_xM.
Vec projected_field(const ImplicitManifold& m, const Vec& x, int i);

/// Gradient and Hessian of f o tau, where tau is the local graph
/// parametrization over `chart`.
struct ChartDerivatives {
  Vec gradient;  // d
  Mat hessian;   // d x d, exactly symmetric
};

/// Exact: H = E^T (Hess f - sum_k mu_k Hess c_k) E, with E = d tau / du and
/// mu the Lagrange multipliers J_y^{-T} grad_y f.
ChartDerivatives chart_derivatives(const Jet& f, const LocalFrame& frame, const Chart& chart);

/// Both throw kChartMembership when the chart score at x is not above the
/// threshold.
Vec chart_gradient(const ScalarField& f, const ImplicitManifold& m, const Chart& chart, const Vec& x,
                   double membership_threshold = 1e-3);
Mat chart_hessian(const ScalarField& f, const ImplicitManifold& m, const Chart& chart, const Vec& x,
                  double membership_threshold = 1e-3);

/// A LocalFrame plus the derivatives of the tangent projector along each
/// D_a, which is what second-tier D-derivatives need.
struct TierFrame {
  LocalFrame frame;
  std::vector<Mat> projector_derivatives;  // d/dv_a P, v_a = P e_a
};

TierFrame tier_frame(const ImplicitManifold& m, const Vec& x);
std::vector<TierFrame> tier_frames(const ImplicitManifold& m, const std::vector<Vec>& points);

/// The three tiers of the C^2 seminorm at one point: the value, D_j phi for
/// every ambient j, and D_a D_b phi for every pair (second(a, b) = D_a(D_b phi);
/// not symmetric in general).
struct Tiers {
  double value = 0.0;
  Vec first;
  Mat second;

  double max_abs() const;
};

Tiers d_tiers(const Jet& jet, const TierFrame& tf);
Tiers d_tiers(const ScalarField& f, const TierFrame& tf);

/// Sampled C^2 distance: max over samples of |f - g|, |D_j (f - g)| and
/// |D_a D_b (f - g)|. g lies in the sampled neighbourhood V_{f, eps} iff the
/// result is below eps.
double c2_distance(const ScalarField& f, const ScalarField& g, const std::vector<TierFrame>& frames);
double c2_distance(const ScalarField& f, const ScalarField& g, const ImplicitManifold& m,
                   const std::vector<Vec>& samples);

struct CriticalPoint {
  PointOnM location;
  int chart = 0;
  Vec gradient;
  double grad_norm = 0.0;
  Mat hessian;
  double det_hessian = 0.0;
  bool degenerate = false;
  std::optional<int> morse_index;  // set iff !degenerate
  double margin = 0.0;             // sum_j |gradient_j| + |det_hessian|
};

/// Number of negative Hessian eigenvalues. Throws kDegenerateCriticalPoint
/// when |det| <= degenerate_tol.
int morse_index(const CriticalPoint& cp, double degenerate_tol = 1e-6);

struct CriticalSearch {
  std::vector<CriticalPoint> points;  // deduplicated, sorted by coordinates
  int seeds = 0;
  int converged = 0;
  int dropped = 0;  // seeds whose Newton run left the chart or did not converge
};

/// Newton on chart_gradient = 0 from every sample, each in its assigned
/// chart. Completeness is limited by the sample density.
CriticalSearch find_critical_points(const ScalarField& f, const ImplicitManifold& m,
                                    const CoverAtlas& atlas, const Tolerances& tol = {});

/// Newton from the given sample indices, all in `chart`. Points where
/// `keep` returns false are discarded after convergence.
CriticalSearch find_critical_points_in_chart(const ScalarField& f, const ImplicitManifold& m,
                                             const CoverAtlas& atlas, int chart,
                                             const std::vector<std::size_t>& seeds,
                                             const Tolerances& tol = {},
                                             const std::function<bool(const Vec&)>& keep = {});

/// Builds the record for a point already known to be critical in `chart`.
CriticalPoint classify_point(const ScalarField& f, const ImplicitManifold& m, const Vec& x, int chart,
                             const Chart& chart_def, double degenerate_tol);

}  // namespace morsekit
