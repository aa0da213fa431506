#include "morsekit/manifold_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "morsekit/error.hpp"

namespace morsekit {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int column0 = 1;  // column of text[0]

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, column0 + static_cast<int>(pos));
  }
  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  void expect(char c) {
    skip();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  bool accept(char c) {
    skip();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  double number() {
    skip();
    std::size_t end = pos;
    while (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) ||
                                 text[end] == '.' || text[end] == '-' || text[end] == '+')) {
      ++end;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, v);
    if (ec != std::errc() || ptr != text.data() + end || !std::isfinite(v)) fail("malformed number");
    pos = end;
    return v;
  }
  bool at_end() {
    skip();
    return pos >= text.size();
  }
};

int parse_int(const std::string& value, int line, int column) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("expected an integer", line, column);
  }
  return v;
}

double parse_real(const std::string& value, int line, int column) {
  Cursor c{value, 0, line, column};
  const double v = c.number();
  if (!c.at_end()) c.fail("trailing characters after number");
  return v;
}

Box parse_box(const std::string& value, int line, int column) {
  Cursor c{value, 0, line, column};
  std::vector<double> lo;
  std::vector<double> hi;
  do {
    c.expect('[');
    lo.push_back(c.number());
    c.expect(',');
    hi.push_back(c.number());
    c.expect(']');
  } while (c.accept('x'));
  if (!c.at_end()) c.fail("expected 'x' between intervals");
  Box box{Vec(lo.size()), Vec(hi.size())};
  for (std::size_t i = 0; i < lo.size(); ++i) {
    box.lo(static_cast<Eigen::Index>(i)) = lo[i];
    box.hi(static_cast<Eigen::Index>(i)) = hi[i];
  }
  return box;
}

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

}  // namespace

ManifoldDefinition parse_manifold_definition(const std::string& text) {
  std::optional<int> n;
  std::optional<int> d;
  std::optional<Box> box;
  double regularity_tol = 1e-6;
  double projection_tol = 1e-10;
  std::string name;
  std::string oracle;
  std::optional<int> euler;
  struct PendingConstraint {
    std::string text;
    int line;
    int column;
  };
  std::vector<PendingConstraint> pending;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::size_t lead = 0;
    const std::string body = trim(raw, &lead);
    if (body.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, static_cast<int>(lead) + 1);
    const std::string key = trim(raw.substr(0, eq));
    std::size_t vlead = 0;
    const std::string value = trim(raw.substr(eq + 1), &vlead);
    const int vcol = static_cast<int>(eq + 1 + vlead) + 1;
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line, vcol);

    if (key == "ambient_dim") {
      n = parse_int(value, line, vcol);
    } else if (key == "intrinsic_dim") {
      d = parse_int(value, line, vcol);
    } else if (key == "constraint") {
      pending.push_back({value, line, vcol});
    } else if (key == "domain") {
      box = parse_box(value, line, vcol);
    } else if (key == "regularity_tol") {
      regularity_tol = parse_real(value, line, vcol);
    } else if (key == "projection_tol") {
      projection_tol = parse_real(value, line, vcol);
    } else if (key == "name") {
      name = value;
    } else if (key == "oracle") {
      oracle = value;
    } else if (key == "euler_characteristic") {
      euler = parse_int(value, line, vcol);
    } else {
      throw ParseError("unknown key '" + key + "'", line, static_cast<int>(lead) + 1);
    }
  }
  if (!n) throw ParseError("missing 'ambient_dim'", line, 1);
  if (!d) throw ParseError("missing 'intrinsic_dim'", line, 1);
  if (!box) throw ParseError("missing 'domain'", line, 1);
  if (pending.empty()) throw ParseError("missing 'constraint'", line, 1);

  std::vector<ScalarField> constraints;
  for (const auto& p : pending) {
    constraints.emplace_back(parse_expression(p.text, *n, p.line, p.column), *n);
  }
  ImplicitManifold m(*n, *d, std::move(constraints), *box, regularity_tol, projection_tol);
  m.set_name(name);
  return ManifoldDefinition{std::move(m), oracle, euler};
}

ManifoldDefinition load_manifold_definition(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot open manifold file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_manifold_definition(ss.str());
}

std::string format_manifold_definition(const ManifoldDefinition& def) {
  const ImplicitManifold& m = def.manifold;
  std::ostringstream out;
  if (!m.name().empty()) out << "name = " << m.name() << "\n";
  out << "ambient_dim = " << m.ambient_dim() << "\n";
  out << "intrinsic_dim = " << m.intrinsic_dim() << "\n";
  for (const auto& c : m.constraints()) out << "constraint = " << c.to_string() << "\n";
  out << "domain = ";
  for (int i = 0; i < m.ambient_dim(); ++i) {
    if (i) out << " x ";
    out << "[" << format_double(m.domain().lo(i)) << ", " << format_double(m.domain().hi(i)) << "]";
  }
  out << "\n";
  out << "regularity_tol = " << format_double(m.regularity_tol()) << "\n";
  out << "projection_tol = " << format_double(m.projection_tol()) << "\n";
  if (!def.oracle.empty()) out << "oracle = " << def.oracle << "\n";
  if (def.euler_characteristic) out << "euler_characteristic = " << *def.euler_characteristic << "\n";
  return out.str();
}

}  // namespace morsekit
