#include "morsekit/scalar_field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <unordered_map>

#include "morsekit/error.hpp"

namespace morsekit {

namespace {

using Key = std::tuple<int, int, int, int, std::uint64_t>;

double ipow(double x, int k) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  const double p2 = k == 2 ? 1.0 : std::pow(x, k - 2);
  return p2 * x * x;
}

[[noreturn]] void domain_error(const char* what) {
  throw Error(ErrorCode::kDomainError, what);
}

}  // namespace

Tape::Tape(const Expr& e) {
  std::unordered_map<const Node*, int> slot_of;
  std::map<Key, int> interned;

  // Iterative post-order walk; expressions built by the cutoff machinery can
  // be deep.
  struct Frame {
    const Node* node;
    bool expanded;
  };
  std::vector<Frame> stack{{&e.node(), false}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Node* n = f.node;
    if (slot_of.count(n)) {
      stack.pop_back();
      continue;
    }
    if (!f.expanded) {
      f.expanded = true;
      if (n->rhs && !slot_of.count(n->rhs.get())) stack.push_back({n->rhs.get(), false});
      if (n->lhs && !slot_of.count(n->lhs.get())) stack.push_back({n->lhs.get(), false});
      continue;
    }
    stack.pop_back();
    Instr ins;
    ins.op = n->op;
    ins.index = n->index;
    ins.value = n->value;
    ins.a = n->lhs ? slot_of.at(n->lhs.get()) : -1;
    ins.b = n->rhs ? slot_of.at(n->rhs.get()) : -1;
    const Key key{static_cast<int>(ins.op), ins.a, ins.b, ins.index,
                  std::bit_cast<std::uint64_t>(ins.value)};
    auto [it, inserted] = interned.try_emplace(key, static_cast<int>(code_.size()));
    if (inserted) code_.push_back(ins);
    slot_of[n] = it->second;
  }
}

double Tape::eval(const Vec& x) const {
  std::vector<double> r(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& c = code_[i];
    switch (c.op) {
      case Op::kConst:
        r[i] = c.value;
        break;
      case Op::kVar:
        r[i] = x(c.index);
        break;
      case Op::kAdd:
        r[i] = r[c.a] + r[c.b];
        break;
      case Op::kSub:
        r[i] = r[c.a] - r[c.b];
        break;
      case Op::kMul:
        r[i] = r[c.a] * r[c.b];
        break;
      case Op::kDiv:
        if (r[c.b] == 0.0) domain_error("division by zero");
        r[i] = r[c.a] / r[c.b];
        break;
      case Op::kNeg:
        r[i] = -r[c.a];
        break;
      case Op::kPow:
        if (r[c.a] == 0.0 && c.index < 0) domain_error("zero to a negative power");
        r[i] = ipow(r[c.a], c.index);
        break;
      case Op::kExp:
        r[i] = std::exp(r[c.a]);
        break;
      case Op::kPos:
        r[i] = r[c.a] > 0.0 ? r[c.a] : 0.0;
        break;
    }
  }
  const double v = r.back();
  if (!std::isfinite(v)) domain_error("expression evaluated to a non-finite value");
  return v;
}

Dual2 Tape::eval2(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  if (n > kMaxAmbientDim) {
    throw Error(ErrorCode::kInvalidArgument, "ambient dimension exceeds kMaxAmbientDim");
  }
  std::vector<Dual2> r(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& c = code_[i];
    switch (c.op) {
      case Op::kConst:
        r[i] = Dual2(c.value, n);
        break;
      case Op::kVar:
        r[i] = Dual2::variable(x(c.index), c.index, n);
        break;
      case Op::kAdd:
        r[i] = r[c.a] + r[c.b];
        break;
      case Op::kSub:
        r[i] = r[c.a] - r[c.b];
        break;
      case Op::kMul:
        r[i] = r[c.a] * r[c.b];
        break;
      case Op::kDiv:
        if (r[c.b].value() == 0.0) domain_error("division by zero");
        r[i] = r[c.a] / r[c.b];
        break;
      case Op::kNeg:
        r[i] = -r[c.a];
        break;
      case Op::kPow:
        if (r[c.a].value() == 0.0 && c.index < 0) domain_error("zero to a negative power");
        r[i] = ipow(r[c.a], c.index);
        break;
      case Op::kExp:
        r[i] = exp(r[c.a]);
        break;
      case Op::kPos:
        r[i] = pos(r[c.a]);
        break;
    }
  }
  Dual2 out = std::move(r.back());
  if (!std::isfinite(out.value()) || !out.gradient().allFinite() || !out.hessian().allFinite()) {
    domain_error("expression derivatives are not finite");
  }
  return out;
}

ScalarField::ScalarField(Expr expr, int ambient_dim)
    : expr_(std::move(expr)), dim_(ambient_dim) {
  if (ambient_dim <= 0) throw Error(ErrorCode::kInvalidArgument, "ambient dimension must be positive");
  if (expr_.max_variable_index() >= ambient_dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "expression references x" + std::to_string(expr_.max_variable_index() + 1) +
                    " beyond ambient dimension " + std::to_string(ambient_dim));
  }
  tape_ = std::make_shared<const Tape>(expr_);
}

ScalarField ScalarField::parse(const std::string& text, int ambient_dim) {
  return ScalarField(parse_expression(text, ambient_dim), ambient_dim);
}

void ScalarField::check_point(const Vec& x) const {
  if (x.size() != dim_) throw Error(ErrorCode::kInvalidArgument, "point has wrong dimension");
  if (!x.allFinite()) throw Error(ErrorCode::kDomainError, "point is not finite");
}

double ScalarField::value(const Vec& x) const {
  check_point(x);
  return tape_->eval(x);
}

Vec ScalarField::gradient(const Vec& x) const { return jet(x).gradient; }

Mat ScalarField::hessian(const Vec& x) const { return jet(x).hessian; }

Jet ScalarField::jet(const Vec& x) const {
  check_point(x);
  const Dual2 d = tape_->eval2(x);
  return Jet{d.value(), Vec(d.gradient()), Mat(d.hessian())};
}

}  // namespace morsekit
