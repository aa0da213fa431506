#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace morsekit {

enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow, kExp, kPos };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::kConst;
  double value = 0.0;  // kConst
  int index = 0;       // kVar: 0-based coordinate; kPow: integer exponent
  NodePtr lhs;
  NodePtr rhs;
};

/// Immutable arithmetic expression over ambient coordinates x1..xn.
///
/// Expressions are shared DAGs. The overloaded operators fold constants and
/// drop exact identities (x+0, x*1, --x); the `raw_*` constructors do not,
/// and are what the parser uses so that printing and re-parsing reproduces
/// the original tree node for node.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value);
  /// 0-based coordinate index; prints as x{i+1}.
  static Expr variable(int index);

  static Expr from_node(NodePtr node) { return Expr(std::move(node)); }

  static Expr raw_binary(Op op, const Expr& lhs, const Expr& rhs);
  static Expr raw_unary(Op op, const Expr& arg);
  static Expr raw_pow(const Expr& base, int exponent);

  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }

  bool is_constant() const { return node_->op == Op::kConst; }
  bool is_constant(double v) const { return is_constant() && node_->value == v; }

  /// Largest 0-based variable index referenced, or -1 for constants.
  int max_variable_index() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  explicit Expr(NodePtr node) : node_(std::move(node)) {}
  NodePtr node_;
};

Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& arg);
/// Positive part max(u, 0).
Expr pos(const Expr& arg);

/// Sum of a list; the empty sum is 0.
Expr sum(const std::vector<Expr>& terms);

/// Symbolic partial derivative with respect to x_{index+1}.
/// pos(u) is differentiable only under an integer power >= 2; a bare pos()
/// throws kDomainError.
Expr differentiate(const Expr& e, int index);

/// Canonical text form. parse_expression(to_string(e)) is structurally
/// identical to e, including the exact bits of every constant.
std::string to_string(const Expr& e);

/// Parses the expression grammar
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' '-'? integer)?
///   primary := number | 'x'<k> | ('exp' | 'pos') '(' sum ')' | '(' sum ')'
/// Variables must satisfy 1 <= k <= ambient_dim (ambient_dim <= 0 skips the
/// check). `line` / `column` give the 1-based position of text[0] for error
/// reporting.
Expr parse_expression(std::string_view text, int ambient_dim = 0, int line = 1,
                      int column = 1);

/// Node-for-node equality; constants compare by bit pattern.
bool structurally_equal(const Expr& a, const Expr& b);

/// Number of distinct nodes reachable (shared subtrees counted once).
std::size_t dag_size(const Expr& e);

}  // namespace morsekit
