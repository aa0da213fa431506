#include "morsekit/expression.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "morsekit/error.hpp"

namespace morsekit {

namespace {

NodePtr make_node(Op op, double value, int index, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

double fold_pow(double x, int k) {
  // Must match the evaluator bit for bit.
  if (k == 0) return 1.0;
  if (k == 1) return x;
  const double p2 = k == 2 ? 1.0 : std::pow(x, k - 2);
  return p2 * x * x;
}

}  // namespace

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kDomainError, "non-finite constant in expression");
  }
  return Expr(make_node(Op::kConst, value, 0, nullptr, nullptr));
}

Expr Expr::variable(int index) {
  if (index < 0) throw Error(ErrorCode::kInvalidArgument, "negative variable index");
  return Expr(make_node(Op::kVar, 0.0, index, nullptr, nullptr));
}

Expr Expr::raw_binary(Op op, const Expr& lhs, const Expr& rhs) {
  return Expr(make_node(op, 0.0, 0, lhs.node_, rhs.node_));
}

Expr Expr::raw_unary(Op op, const Expr& arg) {
  // Neg(constant) has no text form of its own; it always reads back as a constant.
  if (op == Op::kNeg && arg.is_constant()) return constant(-arg.node().value);
  return Expr(make_node(op, 0.0, 0, arg.node_, nullptr));
}

Expr Expr::raw_pow(const Expr& base, int exponent) {
  return Expr(make_node(Op::kPow, 0.0, exponent, base.node_, nullptr));
}

int Expr::max_variable_index() const {
  int best = -1;
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{node_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->op == Op::kVar) best = std::max(best, n->index);
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return best;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value + b.node().value);
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::raw_binary(Op::kAdd, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value - b.node().value);
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::raw_binary(Op::kSub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value * b.node().value);
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr::raw_binary(Op::kMul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) throw Error(ErrorCode::kDomainError, "division by constant zero");
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value / b.node().value);
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::raw_binary(Op::kDiv, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.node().value);
  if (a.node().op == Op::kNeg) return Expr(a.node().lhs);
  return Expr::raw_unary(Op::kNeg, a);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    const double v = base.node().value;
    if (v == 0.0 && exponent < 0) throw Error(ErrorCode::kDomainError, "0 to a negative power");
    return Expr::constant(fold_pow(v, exponent));
  }
  return Expr::raw_pow(base, exponent);
}

Expr exp(const Expr& arg) {
  if (arg.is_constant()) return Expr::constant(std::exp(arg.node().value));
  return Expr::raw_unary(Op::kExp, arg);
}

Expr pos(const Expr& arg) {
  if (arg.is_constant()) return Expr::constant(arg.node().value > 0.0 ? arg.node().value : 0.0);
  return Expr::raw_unary(Op::kPos, arg);
}

Expr sum(const std::vector<Expr>& terms) {
  Expr total = Expr::constant(0.0);
  for (const auto& t : terms) total = total + t;
  return total;
}

Expr differentiate(const Expr& e, int index) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::kConst:
      return Expr::constant(0.0);
    case Op::kVar:
      return Expr::constant(n.index == index ? 1.0 : 0.0);
    default:
      break;
  }
  const Expr a = Expr::from_node(n.lhs);
  switch (n.op) {
    case Op::kNeg:
      return -differentiate(a, index);
    case Op::kExp:
      return e * differentiate(a, index);
    case Op::kPos:
      throw Error(ErrorCode::kDomainError, "pos() is not differentiable; use pos(u)^k, k >= 2");
    case Op::kPow: {
      const int k = n.index;
      if (a.node().op == Op::kPos && k >= 2) {
        const Expr u = Expr::from_node(a.node().lhs);
        return Expr::constant(k) * pow(a, k - 1) * differentiate(u, index);
      }
      return Expr::constant(k) * pow(a, k - 1) * differentiate(a, index);
    }
    default:
      break;
  }
  const Expr b = Expr::from_node(n.rhs);
  const Expr da = differentiate(a, index);
  const Expr db = differentiate(b, index);
  switch (n.op) {
    case Op::kAdd:
      return da + db;
    case Op::kSub:
      return da - db;
    case Op::kMul:
      return da * b + a * db;
    case Op::kDiv:
      return (da * b - a * db) / pow(b, 2);
    default:
      throw Error(ErrorCode::kInvalidArgument, "unknown expression node");
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kPrimary = 5 };

bool is_negative_constant(const Node& n) {
  return n.op == Op::kConst && std::signbit(n.value);
}

int precedence(const Node& n) {
  switch (n.op) {
    case Op::kAdd:
    case Op::kSub:
      return kSum;
    case Op::kMul:
    case Op::kDiv:
      return kProduct;
    case Op::kNeg:
      return kUnary;
    case Op::kPow:
      return kPower;
    case Op::kConst:
      return is_negative_constant(n) ? kUnary : kPrimary;
    default:
      return kPrimary;
  }
}

void format_number(double v, std::string& out) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

void print(const Node& n, std::string& out);

void print_operand(const Node& n, int min_prec, std::string& out, bool wrap_unary = false) {
  const int p = precedence(n);
  if (p < min_prec || (wrap_unary && p == kUnary)) {
    out.push_back('(');
    print(n, out);
    out.push_back(')');
  } else {
    print(n, out);
  }
}

void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::kConst:
      format_number(n.value, out);
      return;
    case Op::kVar:
      out.push_back('x');
      out += std::to_string(n.index + 1);
      return;
    case Op::kAdd:
    case Op::kSub:
      print_operand(*n.lhs, kSum, out);
      out += n.op == Op::kAdd ? " + " : " - ";
      // Right operands of a left-associative chain keep their parentheses.
      print_operand(*n.rhs, kProduct, out, true);
      return;
    case Op::kMul:
    case Op::kDiv:
      print_operand(*n.lhs, kProduct, out);
      out += n.op == Op::kMul ? " * " : " / ";
      print_operand(*n.rhs, kUnary, out, true);
      return;
    case Op::kNeg:
      out.push_back('-');
      print_operand(*n.lhs, kPower, out);
      return;
    case Op::kPow:
      print_operand(*n.lhs, kPrimary, out);
      out.push_back('^');
      out += std::to_string(n.index);
      return;
    case Op::kExp:
    case Op::kPos:
      out += n.op == Op::kExp ? "exp(" : "pos(";
      print(*n.lhs, out);
      out.push_back(')');
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e.node(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int ambient_dim, int line, int column)
      : text_(text), dim_(ambient_dim), line0_(line), col0_(column) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    int line = line0_;
    int col = col0_;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::raw_binary(Op::kAdd, lhs, parse_product());
      } else if (accept('-')) {
        lhs = Expr::raw_binary(Op::kSub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::raw_binary(Op::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::raw_binary(Op::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) {
      Expr arg = parse_unary();
      // Negative literals are constants, never Neg(constant).
      if (arg.is_constant()) return Expr::constant(-arg.node().value);
      return Expr::raw_unary(Op::kNeg, arg);
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) fail_at("exponent must be an integer literal", start);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail_at("exponent must be an integer literal", start);
    }
    int k = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, k);
    if (ec != std::errc()) fail_at("exponent out of range", start);
    (void)ptr;
    return Expr::raw_pow(base, negative ? -k : k);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (!digit(p)) fail_at("malformed exponent in number", pos_);
      pos_ = p;
      while (digit(pos_)) ++pos_;
    }
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    // from_chars rejects a leading '+' and accepts "1." / ".5" in general format.
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail_at("malformed number", start);
    if (!std::isfinite(v)) fail_at("number out of range", start);
    return Expr::constant(v);
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "exp" || word == "pos") {
        expect('(');
        Expr arg = parse_sum();
        expect(')');
        return Expr::raw_unary(word == "exp" ? Op::kExp : Op::kPos, arg);
      }
      if (word.size() >= 2 && word[0] == 'x') {
        int k = 0;
        auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), k);
        if (ec == std::errc() && ptr == word.data() + word.size() && word[1] != '0' && k >= 1) {
          if (dim_ > 0 && k > dim_) {
            fail_at("variable " + std::string(word) + " exceeds ambient dimension " +
                        std::to_string(dim_),
                    start);
          }
          return Expr::variable(k - 1);
        }
      }
      fail_at("unknown identifier '" + std::string(word) + "'", start);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;
  int line0_;
  int col0_;
};

bool equal_nodes(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::kConst:
      return std::bit_cast<std::uint64_t>(a->value) == std::bit_cast<std::uint64_t>(b->value);
    case Op::kVar:
      return a->index == b->index;
    case Op::kPow:
      return a->index == b->index && equal_nodes(a->lhs.get(), b->lhs.get());
    case Op::kNeg:
    case Op::kExp:
    case Op::kPos:
      return equal_nodes(a->lhs.get(), b->lhs.get());
    default:
      return equal_nodes(a->lhs.get(), b->lhs.get()) && equal_nodes(a->rhs.get(), b->rhs.get());
  }
}

}  // namespace

Expr parse_expression(std::string_view text, int ambient_dim, int line, int column) {
  return Parser(text, ambient_dim, line, column).parse();
}

bool structurally_equal(const Expr& a, const Expr& b) {
  return equal_nodes(&a.node(), &b.node());
}

std::size_t dag_size(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{&e.node()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return seen.size();
}

}  // namespace morsekit
