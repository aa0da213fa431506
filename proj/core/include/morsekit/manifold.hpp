#pragma once

#include <string>
#include <vector>

#include "morsekit/linalg.hpp"
#include "morsekit/scalar_field.hpp"

namespace morsekit {

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x) const;
  double diameter() const { return (hi - lo).norm(); }
};

/// Compact regular level set M = {c_1 = ... = c_{n-d} = 0} inside a box.
class ImplicitManifold {
 public:
  ImplicitManifold(int ambient_dim, int intrinsic_dim, std::vector<ScalarField> constraints,
                   Box domain, double regularity_tol = 1e-6, double projection_tol = 1e-10);

  int ambient_dim() const { return n_; }
  int intrinsic_dim() const { return d_; }
  int codim() const { return n_ - d_; }
  const std::vector<ScalarField>& constraints() const { return constraints_; }
  const Box& domain() const { return domain_; }
  double regularity_tol() const { return regularity_tol_; }
  double projection_tol() const { return projection_tol_; }

  /// Optional label carried into reports.
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 private:
  int n_;
  int d_;
  std::vector<ScalarField> constraints_;
  Box domain_;
  double regularity_tol_;
  double projection_tol_;
  std::string name_;
};

/// A point that has been verified to lie on M. residual = max_j |c_j(coords)|.
struct PointOnM {
  Vec coords;
  double residual = 0.0;
};

/// Constraint values c(x).
Vec eval_constraints(const ImplicitManifold& m, const Vec& x);

/// (n-d) x n constraint Jacobian.
Mat constraint_jacobian(const ImplicitManifold& m, const Vec& x);

double constraint_residual(const ImplicitManifold& m, const Vec& x);

/// Everything second-order about M at one point, computed once and shared by
/// the chart and calculus layers.
struct LocalFrame {
  Vec x;
  Vec values;                       // c(x)
  Mat jacobian;                     // J, (n-d) x n
  std::vector<Mat> hessians;        // Hess c_k, n x n each
  Mat tangent;                      // T, n x d, orthonormal, J T = 0
  Mat projector;                    // P = T T^T
  double min_singular_value = 0.0;  // of J
};

/// Builds the frame; throws kNotRegularPoint if sigma_min(J) < regularity_tol.
LocalFrame local_frame(const ImplicitManifold& m, const Vec& x);

/// Orthonormal basis of ker J(x) as the columns of an n x d matrix.
Mat tangent_basis(const ImplicitManifold& m, const Vec& x);

/// Directional derivative of the tangent projector along v. Uses the ambient
/// formula P = I - J^T (J J^T)^{-1} J, so it is exact for any v.
Mat projector_derivative(const LocalFrame& frame, const Vec& v);

/// Gauss-Newton on the constraints (minimum-norm steps).
///
/// Throws kNotRegularPoint when an iterate has a rank-deficient Jacobian
/// (e.g. the centre of the circle), kMaxIterations after 100 steps, and
/// kProjectionTooFar when the result is farther than 2 |c(x0)| / regularity_tol
/// from x0. `projection_tol <= 0` uses the manifold default.
PointOnM project_to_manifold(const ImplicitManifold& m, const Vec& x0, double projection_tol = 0.0);

/// Projects the grid_density^n lattice of cell centres of the domain box onto
/// M and keeps points at least sample_spacing(m, grid_density) / 2 apart.
/// Lattice points that fail to project, or land outside the box, are
/// skipped. Output order is the lattice order, so it is deterministic.
std::vector<PointOnM> sample_points(const ImplicitManifold& m, int grid_density);

/// h = box diameter / grid_density.
double sample_spacing(const ImplicitManifold& m, int grid_density);

std::vector<Vec> coordinates(const std::vector<PointOnM>& points);

}  // namespace morsekit
