#pragma once

#include <memory>
#include <string>
#include <vector>

#include "morsekit/dual.hpp"
#include "morsekit/expression.hpp"
#include "morsekit/linalg.hpp"

namespace morsekit {

/// Flattened, common-subexpression-eliminated form of an Expr.
///
/// Identical subtrees (same op, payload and operands, constants compared by
/// bit pattern) share one slot, so DAGs that print as very long text still
/// evaluate in time linear in their distinct nodes.
class Tape {
 public:
  struct Instr {
    Op op;
    int a = -1;  // operand slots
    int b = -1;
    int index = 0;  // variable index or integer exponent
    double value = 0.0;
  };

  explicit Tape(const Expr& e);

  std::size_t size() const { return code_.size(); }
  const std::vector<Instr>& code() const { return code_; }

  /// Value only. Throws kDomainError on division by zero or non-finite results.
  double eval(const Vec& x) const;
  /// Value, gradient and Hessian via second-order forward duals.
  Dual2 eval2(const Vec& x) const;

 private:
  std::vector<Instr> code_;
};

/// Value plus exact first and second ambient derivatives at a point.
struct Jet {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

/// A twice-differentiable function on the ambient space R^n.
///
/// Cheap to copy: the expression and its compiled tape are shared.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(Expr expr, int ambient_dim);

  /// Parses `text` in the expression grammar over x1..x{ambient_dim}.
  static ScalarField parse(const std::string& text, int ambient_dim);

  int ambient_dim() const { return dim_; }
  const Expr& expr() const { return expr_; }
  std::string to_string() const { return morsekit::to_string(expr_); }

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  Jet jet(const Vec& x) const;

  /// Distinct instructions after common-subexpression elimination.
  std::size_t tape_size() const { return tape_ ? tape_->size() : 0; }

 private:
  void check_point(const Vec& x) const;

  Expr expr_;
  int dim_ = 0;
  std::shared_ptr<const Tape> tape_;
};

}  // namespace morsekit
