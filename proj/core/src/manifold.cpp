#include "morsekit/manifold.hpp"

#include <cmath>
#include <unordered_map>

#include "morsekit/error.hpp"

namespace morsekit {

bool Box::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= lo(i) && x(i) <= hi(i))) return false;
  }
  return true;
}

ImplicitManifold::ImplicitManifold(int ambient_dim, int intrinsic_dim,
                                   std::vector<ScalarField> constraints, Box domain,
                                   double regularity_tol, double projection_tol)
    : n_(ambient_dim),
      d_(intrinsic_dim),
      constraints_(std::move(constraints)),
      domain_(std::move(domain)),
      regularity_tol_(regularity_tol),
      projection_tol_(projection_tol) {
  if (n_ <= 0 || d_ <= 0 || d_ >= n_) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < intrinsic_dim < ambient_dim");
  }
  if (n_ > kMaxAmbientDim) {
    throw Error(ErrorCode::kInvalidArgument, "ambient dimension above supported maximum");
  }
  if (static_cast<int>(constraints_.size()) != n_ - d_) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(n_ - d_) + " constraints, got " +
                    std::to_string(constraints_.size()));
  }
  for (const auto& c : constraints_) {
    if (c.ambient_dim() != n_) {
      throw Error(ErrorCode::kInvalidArgument, "constraint dimension mismatch");
    }
  }
  if (domain_.dim() != n_ || domain_.hi.size() != n_) {
    throw Error(ErrorCode::kInvalidArgument, "domain box dimension mismatch");
  }
  for (int i = 0; i < n_; ++i) {
    if (!(domain_.lo(i) < domain_.hi(i))) {
      throw Error(ErrorCode::kInvalidArgument, "domain box must have lo < hi on every axis");
    }
  }
  if (!(regularity_tol_ > 0.0) || !(projection_tol_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
  }
}

Vec eval_constraints(const ImplicitManifold& m, const Vec& x) {
  if (!x.allFinite()) throw Error(ErrorCode::kDomainError, "point is not finite");
  Vec c(m.codim());
  for (int k = 0; k < m.codim(); ++k) c(k) = m.constraints()[k].value(x);
  return c;
}

Mat constraint_jacobian(const ImplicitManifold& m, const Vec& x) {
  Mat j(m.codim(), m.ambient_dim());
  for (int k = 0; k < m.codim(); ++k) j.row(k) = m.constraints()[k].gradient(x).transpose();
  return j;
}

double constraint_residual(const ImplicitManifold& m, const Vec& x) {
  return eval_constraints(m, x).cwiseAbs().maxCoeff();
}

LocalFrame local_frame(const ImplicitManifold& m, const Vec& x) {
  const int n = m.ambient_dim();
  const int q = m.codim();
  LocalFrame f;
  f.x = x;
  f.values.resize(q);
  f.jacobian.resize(q, n);
  f.hessians.reserve(q);
  for (int k = 0; k < q; ++k) {
    Jet jet = m.constraints()[k].jet(x);
    f.values(k) = jet.value;
    f.jacobian.row(k) = jet.gradient.transpose();
    f.hessians.push_back(std::move(jet.hessian));
  }
  Eigen::JacobiSVD<Mat> svd(f.jacobian, Eigen::ComputeFullV);
  f.min_singular_value = svd.singularValues().minCoeff();
  if (!(f.min_singular_value >= m.regularity_tol())) {
    throw Error(ErrorCode::kNotRegularPoint,
                "constraint Jacobian is rank deficient (sigma_min = " +
                    std::to_string(f.min_singular_value) + ")");
  }
  f.tangent = svd.matrixV().rightCols(m.intrinsic_dim());
  f.projector = f.tangent * f.tangent.transpose();
  return f;
}

Mat tangent_basis(const ImplicitManifold& m, const Vec& x) { return local_frame(m, x).tangent; }

Mat projector_derivative(const LocalFrame& frame, const Vec& v) {
  const Mat& j = frame.jacobian;
  const int q = static_cast<int>(j.rows());
  Mat dj(q, j.cols());
  for (int k = 0; k < q; ++k) dj.row(k) = (frame.hessians[k] * v).transpose();
  const Mat g = j * j.transpose();
  const Eigen::LDLT<Mat> ginv(g);
  // A = J^T G^{-1}; P = I - A J.
  const Mat a = ginv.solve(j).transpose();
  const Mat dg = dj * j.transpose() + j * dj.transpose();
  const Mat da = ginv.solve(dj).transpose() - a * dg * ginv.solve(Mat::Identity(q, q));
  return -(da * j + a * dj);
}

PointOnM project_to_manifold(const ImplicitManifold& m, const Vec& x0, double projection_tol) {
  const double tol = projection_tol > 0.0 ? projection_tol : m.projection_tol();
  const Vec c0 = eval_constraints(m, x0);
  Vec x = x0;
  Vec c = c0;
  for (int it = 0; it <= 100; ++it) {
    const double residual = c.cwiseAbs().maxCoeff();
    if (residual <= tol) {
      const double limit = 2.0 * c0.norm() / m.regularity_tol();
      if ((x - x0).norm() > limit) {
        throw Error(ErrorCode::kProjectionTooFar, "projection moved farther than 2|c(x0)|/tol");
      }
      return PointOnM{x, residual};
    }
    if (it == 100) break;
    const Mat j = constraint_jacobian(m, x);
    Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (!(svd.singularValues().minCoeff() >= m.regularity_tol())) {
      throw Error(ErrorCode::kNotRegularPoint, "projection hit a point with singular Jacobian");
    }
    x -= svd.solve(c);
    c = eval_constraints(m, x);
  }
  throw Error(ErrorCode::kMaxIterations, "Gauss-Newton projection did not converge in 100 steps");
}

double sample_spacing(const ImplicitManifold& m, int grid_density) {
  return m.domain().diameter() / grid_density;
}

namespace {

struct CellHash {
  std::size_t operator()(const std::vector<long long>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

std::vector<PointOnM> sample_points(const ImplicitManifold& m, int grid_density) {
  if (grid_density < 2) throw Error(ErrorCode::kInvalidArgument, "grid_density must be >= 2");
  const int n = m.ambient_dim();
  const Box& box = m.domain();
  const double radius = 0.5 * sample_spacing(m, grid_density);

  std::unordered_map<std::vector<long long>, std::vector<int>, CellHash> grid;
  auto cell_of = [&](const Vec& x) {
    std::vector<long long> k(n);
    for (int i = 0; i < n; ++i) k[i] = static_cast<long long>(std::floor((x(i) - box.lo(i)) / radius));
    return k;
  };

  std::vector<PointOnM> kept;
  std::vector<long long> counter(n, 0);
  Vec x0(n);
  std::vector<long long> probe(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      x0(i) = box.lo(i) + (counter[i] + 0.5) * (box.hi(i) - box.lo(i)) / grid_density;
    }
    try {
      PointOnM p = project_to_manifold(m, x0);
      if (box.contains(p.coords)) {
        const auto key = cell_of(p.coords);
        bool close = false;
        // Scan the 3^n neighbouring cells.
        std::vector<int> off(n, -1);
        for (;;) {
          for (int i = 0; i < n; ++i) probe[i] = key[i] + off[i];
          auto it = grid.find(probe);
          if (it != grid.end()) {
            for (int idx : it->second) {
              if ((kept[idx].coords - p.coords).norm() < radius) {
                close = true;
                break;
              }
            }
          }
          if (close) break;
          int i = 0;
          while (i < n && off[i] == 1) off[i++] = -1;
          if (i == n) break;
          ++off[i];
        }
        if (!close) {
          grid[key].push_back(static_cast<int>(kept.size()));
          kept.push_back(std::move(p));
        }
      }
    } catch (const Error&) {
      // Lattice points that cannot be projected are simply not sampled.
    }
    int i = 0;
    while (i < n && counter[i] == grid_density - 1) counter[i++] = 0;
    if (i == n) break;
    ++counter[i];
  }
  return kept;
}

std::vector<Vec> coordinates(const std::vector<PointOnM>& points) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.coords);
  return out;
}

}  // namespace morsekit
