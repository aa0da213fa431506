#pragma once

#include <cmath>

#include <Eigen/Core>

namespace morsekit {

/// Largest ambient dimension supported by the forward-mode jets.
inline constexpr int kMaxAmbientDim = 8;

using JetVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbientDim, 1>;
using JetMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbientDim,
                             kMaxAmbientDim>;

/// Second-order forward-mode dual number: value, gradient and Hessian with
/// respect to n seed variables, propagated exactly through arithmetic.
///
/// Storage is inline (no heap) up to kMaxAmbientDim variables. Hessians stay
/// symmetric by construction because every update is a symmetric form.
class Dual2 {
 public:
  Dual2() = default;

  /// Constant with zero derivatives in `n` variables.
  Dual2(double value, int n) : v_(value), g_(JetVec::Zero(n)), h_(JetMat::Zero(n, n)) {}

  /// The i-th seed variable x_i evaluated at `value`.
  static Dual2 variable(double value, int i, int n) {
    Dual2 d(value, n);
    d.g_(i) = 1.0;
    return d;
  }

  static Dual2 make(double value, JetVec grad, JetMat hess) {
    Dual2 d;
    d.v_ = value;
    d.g_ = std::move(grad);
    d.h_ = std::move(hess);
    return d;
  }

  double value() const { return v_; }
  const JetVec& gradient() const { return g_; }
  const JetMat& hessian() const { return h_; }
  int size() const { return static_cast<int>(g_.size()); }

  /// phi(u) for a scalar function with derivatives phi', phi'' at u.
  Dual2 chain(double phi, double dphi, double ddphi) const {
    return make(phi, dphi * g_, dphi * h_ + ddphi * (g_ * g_.transpose()));
  }

  friend Dual2 operator+(const Dual2& a, const Dual2& b) {
    return make(a.v_ + b.v_, a.g_ + b.g_, a.h_ + b.h_);
  }
  friend Dual2 operator-(const Dual2& a, const Dual2& b) {
    return make(a.v_ - b.v_, a.g_ - b.g_, a.h_ - b.h_);
  }
  friend Dual2 operator-(const Dual2& a) { return make(-a.v_, -a.g_, -a.h_); }

  friend Dual2 operator*(const Dual2& a, const Dual2& b) {
    JetMat cross = a.g_ * b.g_.transpose();
    return make(a.v_ * b.v_, a.v_ * b.g_ + b.v_ * a.g_,
                a.v_ * b.h_ + b.v_ * a.h_ + cross + cross.transpose());
  }

  /// Quotient rule in the form q' = (a' - q b') / b, so that a/a has exactly
  /// zero derivatives whenever both operands carry identical jets.
  friend Dual2 operator/(const Dual2& a, const Dual2& b) {
    const double q = a.v_ / b.v_;
    JetVec gq = (a.g_ - q * b.g_) / b.v_;
    JetMat cross = gq * b.g_.transpose();
    JetMat hq = (a.h_ - q * b.h_ - cross - cross.transpose()) / b.v_;
    return make(q, std::move(gq), std::move(hq));
  }

 private:
  double v_ = 0.0;
  JetVec g_;
  JetMat h_;
};

inline Dual2 exp(const Dual2& u) {
  const double e = std::exp(u.value());
  return u.chain(e, e, e);
}

/// u^k for integer k (k may be negative; u must then be nonzero).
inline Dual2 ipow(const Dual2& u, int k) {
  const double x = u.value();
  if (k == 0) return Dual2(1.0, u.size());
  if (k == 1) return u;
  const double p2 = k == 2 ? 1.0 : std::pow(x, k - 2);
  const double p1 = p2 * x;
  return u.chain(p1 * x, k * p1, static_cast<double>(k) * (k - 1) * p2);
}

/// max(u, 0). Only C^0 on its own; pos(u)^3 is C^2.
inline Dual2 pos(const Dual2& u) {
  if (u.value() > 0.0) return u;
  return Dual2(0.0, u.size());
}

}  // namespace morsekit
