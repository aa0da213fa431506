#include "morsekit/verification.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "morsekit/error.hpp"

namespace morsekit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegenerateTol = 1e-6;
constexpr double kRootTol = 1e-12;

Embedding circle_embed(const Vec& t, const Vec&) {
  const double c = std::cos(t(0));
  const double s = std::sin(t(0));
  Embedding e;
  e.x = Vec{{c, s}};
  e.jacobian = Mat{{-s}, {c}};
  e.second = {Mat::Constant(1, 1, -c), Mat::Constant(1, 1, -s)};
  return e;
}

// params: (pole axis, first equatorial axis, second equatorial axis).
Embedding sphere_embed(const Vec& t, const Vec& params) {
  const double ca = std::cos(t(0)), sa = std::sin(t(0));
  const double cb = std::cos(t(1)), sb = std::sin(t(1));
  const int w = static_cast<int>(params(0)), p = static_cast<int>(params(1)), q = static_cast<int>(params(2));
  Embedding e;
  e.x = Vec::Zero(3);
  e.jacobian = Mat::Zero(3, 2);
  e.second.assign(3, Mat::Zero(2, 2));
  e.x(w) = ca;
  e.x(p) = sa * cb;
  e.x(q) = sa * sb;
  e.jacobian.row(w) << -sa, 0.0;
  e.jacobian.row(p) << ca * cb, -sa * sb;
  e.jacobian.row(q) << ca * sb, sa * cb;
  e.second[w] << -ca, 0.0, 0.0, 0.0;
  e.second[p] << -sa * cb, -ca * sb, -ca * sb, -sa * cb;
  e.second[q] << -sa * sb, ca * cb, ca * cb, -sa * sb;
  return e;
}

// params: (R, r, axis, first planar axis, second planar axis); t = (theta, phi).
Embedding torus_embed(const Vec& t, const Vec& params) {
  const double big = params(0), small = params(1);
  const int a = static_cast<int>(params(2)), p = static_cast<int>(params(3)), q = static_cast<int>(params(4));
  const double ct = std::cos(t(0)), st = std::sin(t(0));
  const double cf = std::cos(t(1)), sf = std::sin(t(1));
  const double rho = big + small * cf;
  const double rho_f = -small * sf;
  const double rho_ff = -small * cf;
  Embedding e;
  e.x = Vec::Zero(3);
  e.jacobian = Mat::Zero(3, 2);
  e.second.assign(3, Mat::Zero(2, 2));
  e.x(p) = rho * ct;
  e.x(q) = rho * st;
  e.x(a) = small * sf;
  e.jacobian.row(p) << -rho * st, rho_f * ct;
  e.jacobian.row(q) << rho * ct, rho_f * st;
  e.jacobian.row(a) << 0.0, small * cf;
  e.second[p] << -rho * ct, -rho_f * st, -rho_f * st, rho_ff * ct;
  e.second[q] << -rho * st, rho_f * ct, rho_f * ct, rho_ff * st;
  e.second[a] << 0.0, 0.0, 0.0, -small * sf;
  return e;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Pullback F = f o x: value, gradient and Hessian in the parameters.
struct Pullback {
  double value;
  Vec gradient;
  Mat hessian;
  Vec x;
};

Pullback pullback(const Patch& patch, const ScalarField& f, const Vec& t) {
  const Embedding e = patch.embed(t, patch.params);
  const Jet j = f.jet(e.x);
  Pullback out{j.value, e.jacobian.transpose() * j.gradient,
               e.jacobian.transpose() * j.hessian * e.jacobian, e.x};
  for (Eigen::Index k = 0; k < e.x.size(); ++k) out.hessian += j.gradient(k) * e.second[k];
  out.hessian = 0.5 * (out.hessian + out.hessian.transpose());
  return out;
}

double pullback_derivative(const Patch& patch, const ScalarField& f, double t) {
  return pullback(patch, f, Vec::Constant(1, t)).gradient(0);
}

OraclePoint classify(const Patch& patch, int patch_index, const ScalarField& f, const Vec& t) {
  const Pullback pb = pullback(patch, f, t);
  const Eigen::SelfAdjointEigenSolver<Mat> eig(pb.hessian, Eigen::EigenvaluesOnly);
  OraclePoint pt;
  pt.parameters = t;
  pt.patch = patch_index;
  pt.ambient = pb.x;
  pt.degenerate = eig.eigenvalues().cwiseAbs().minCoeff() < kDegenerateTol;
  if (!pt.degenerate) pt.index = static_cast<int>((eig.eigenvalues().array() < 0.0).count());
  return pt;
}

double axis_step(const Patch& patch, int axis, int resolution) {
  const double span = patch.hi(axis) - patch.lo(axis);
  return patch.periodic[axis] ? span / resolution : span / (resolution - 1);
}

std::vector<Vec> sweep_1d(const Patch& patch, const ScalarField& f, int resolution) {
  const int count = resolution;
  const double h = axis_step(patch, 0, resolution);
  std::vector<double> t(static_cast<std::size_t>(count));
  std::vector<double> g(static_cast<std::size_t>(count));
  double scale = 1.0;
  for (int i = 0; i < count; ++i) {
    t[i] = patch.lo(0) + i * h;
    g[i] = pullback_derivative(patch, f, t[i]);
    scale = std::max(scale, std::abs(g[i]));
  }
  std::vector<Vec> roots;
  auto at = [&](int i) {
    return patch.periodic[0] ? (i % count + count) % count : std::clamp(i, 0, count - 1);
  };
  // Parameter of grid point i unwrapped so intervals never straddle the seam.
  auto param = [&](int i) { return patch.lo(0) + i * h; };
  const int last = patch.periodic[0] ? count : count - 1;
  for (int i = 0; i < last; ++i) {
    const double g0 = g[at(i)];
    const double g1 = g[at(i + 1)];
    if (g0 == 0.0) {
      roots.push_back(Vec::Constant(1, param(i)));
    } else if (g0 * g1 < 0.0) {
      double a = param(i), b = param(i + 1);
      double ga = g0;
      while (b - a > kRootTol) {
        const double mid = 0.5 * (a + b);
        const double gm = pullback_derivative(patch, f, mid);
        if (gm == 0.0) {
          a = b = mid;
          break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      roots.push_back(Vec::Constant(1, 0.5 * (a + b)));
    }
  }
  // Touching roots: local minima of |F'| without a neighbouring sign change.
  const int first = patch.periodic[0] ? 0 : 1;
  const int stop = patch.periodic[0] ? count : count - 1;
  for (int i = first; i < stop; ++i) {
    const double gl = g[at(i - 1)], gc = g[at(i)], gr = g[at(i + 1)];
    if (!(std::abs(gc) < std::abs(gl) && std::abs(gc) <= std::abs(gr))) continue;
    if (gl * gc <= 0.0 || gc * gr <= 0.0) continue;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = param(i - 1), b = param(i + 1);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = std::abs(pullback_derivative(patch, f, c)), fd = std::abs(pullback_derivative(patch, f, d));
    while (b - a > kRootTol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = std::abs(pullback_derivative(patch, f, c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = std::abs(pullback_derivative(patch, f, d));
      }
    }
    const double tm = 0.5 * (a + b);
    if (std::abs(pullback_derivative(patch, f, tm)) <= 1e-9 * scale) roots.push_back(Vec::Constant(1, tm));
  }
  return roots;
}

std::vector<Vec> sweep_2d(const Patch& patch, const ScalarField& f, int resolution) {
  int count[2];
  double h[2];
  for (int a = 0; a < 2; ++a) {
    count[a] = resolution;
    h[a] = axis_step(patch, a, resolution);
  }
  std::vector<Vec> grads(static_cast<std::size_t>(count[0] * count[1]));
  for (int i = 0; i < count[0]; ++i) {
    for (int j = 0; j < count[1]; ++j) {
      const Vec t{{patch.lo(0) + i * h[0], patch.lo(1) + j * h[1]}};
      grads[static_cast<std::size_t>(i * count[1] + j)] = pullback(patch, f, t).gradient;
    }
  }
  auto grad_at = [&](int i, int j) -> const Vec& {
    i %= count[0];
    j %= count[1];
    return grads[static_cast<std::size_t>(i * count[1] + j)];
  };
  std::vector<Vec> roots;
  const int ci = patch.periodic[0] ? count[0] : count[0] - 1;
  const int cj = patch.periodic[1] ? count[1] : count[1] - 1;
  for (int i = 0; i < ci; ++i) {
    for (int j = 0; j < cj; ++j) {
      bool changes[2] = {false, false};
      for (int a = 0; a < 2; ++a) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj) {
            const double v = grad_at(i + di, j + dj)(a);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        changes[a] = lo <= 0.0 && hi >= 0.0;
      }
      if (!changes[0] || !changes[1]) continue;
      Vec t{{patch.lo(0) + (i + 0.5) * h[0], patch.lo(1) + (j + 0.5) * h[1]}};
      const Vec centre = t;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const Pullback pb = pullback(patch, f, t);
        const Vec step = pb.hessian.fullPivLu().solve(-pb.gradient);
        if (!step.allFinite()) break;
        t += step;
        if (step.norm() < kRootTol) {
          converged = true;
          break;
        }
      }
      if (!converged) continue;
      // Must stay within one cell of where the sign change was seen.
      if (std::abs(t(0) - centre(0)) > 1.5 * h[0] || std::abs(t(1) - centre(1)) > 1.5 * h[1]) continue;
      bool inside = true;
      for (int a = 0; a < 2; ++a) {
        if (!patch.periodic[a] && (t(a) < patch.lo(a) || t(a) > patch.hi(a))) inside = false;
      }
      if (inside) roots.push_back(t);
    }
  }
  return roots;
}

bool ambient_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

Parametrization circle_parametrization() {
  Parametrization p{"circle", 2, 1, {}};
  p.patches.push_back(Patch{Vec::Constant(1, 0.0), Vec::Constant(1, kTwoPi), {true}, &circle_embed, Vec()});
  return p;
}

Parametrization sphere_parametrization() {
  // A band of pi/5 around each patch's poles; the other patch covers it
  // because sin(pi/5) < cos(pi/5).
  const double band = std::numbers::pi / 5.0;
  Parametrization p{"sphere", 3, 2, {}};
  const Vec lo{{band, 0.0}};
  const Vec hi{{std::numbers::pi - band, kTwoPi}};
  p.patches.push_back(Patch{lo, hi, {false, true}, &sphere_embed, Vec{{0.0, 1.0, 2.0}}});
  p.patches.push_back(Patch{lo, hi, {false, true}, &sphere_embed, Vec{{1.0, 2.0, 0.0}}});
  return p;
}

Parametrization torus_parametrization(double major, double minor, int axis) {
  if (!(major > minor) || !(minor > 0.0) || axis < 0 || axis > 2) {
    throw Error(ErrorCode::kInvalidArgument, "torus needs R > r > 0 and axis in 1..3");
  }
  Parametrization p{"torus(" + format_number(major) + ", " + format_number(minor) + ", " +
                        std::to_string(axis + 1) + ")",
                    3, 2, {}};
  int planar[2];
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != axis) planar[k++] = i;
  p.patches.push_back(Patch{Vec{{0.0, 0.0}}, Vec{{kTwoPi, kTwoPi}}, {true, true}, &torus_embed,
                            Vec{{major, minor, double(axis), double(planar[0]), double(planar[1])}}});
  return p;
}

Parametrization parse_parametrization(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "circle") return circle_parametrization();
  if (s == "sphere") return sphere_parametrization();
  if (s == "torus") return torus_parametrization();
  if (s.rfind("torus(", 0) == 0 && s.back() == ')') {
    std::vector<double> args;
    std::stringstream in(s.substr(6, s.size() - 7));
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "malformed torus argument '" + item + "'");
      }
    }
    if (args.size() == 3 && args[2] == std::floor(args[2])) {
      return torus_parametrization(args[0], args[1], static_cast<int>(args[2]) - 1);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown oracle '" + text + "'");
}

OracleResult oracle_critical_census(const Parametrization& p, const ScalarField& f, int resolution) {
  if (f.ambient_dim() != p.ambient_dim) {
    throw Error(ErrorCode::kInvalidArgument, "field and parametrization disagree on ambient dimension");
  }
  if ((p.dim == 1 && resolution < 10000) || (p.dim == 2 && resolution < 100)) {
    throw Error(ErrorCode::kInvalidArgument, "oracle resolution too low");
  }
  if (p.dim != 1 && p.dim != 2) throw Error(ErrorCode::kInvalidArgument, "oracle supports d = 1, 2 only");
  OracleResult out{p.id, f.to_string(), {}, resolution};
  for (int k = 0; k < static_cast<int>(p.patches.size()); ++k) {
    const Patch& patch = p.patches[static_cast<std::size_t>(k)];
    const std::vector<Vec> roots = p.dim == 1 ? sweep_1d(patch, f, resolution) : sweep_2d(patch, f, resolution);
    for (const auto& t : roots) {
      OraclePoint pt = classify(patch, k, f, t);
      const bool dup = std::any_of(out.critical_points.begin(), out.critical_points.end(),
                                   [&](const OraclePoint& q) { return (q.ambient - pt.ambient).norm() < 1e-7; });
      if (!dup) out.critical_points.push_back(std::move(pt));
    }
  }
  std::sort(out.critical_points.begin(), out.critical_points.end(),
            [](const OraclePoint& a, const OraclePoint& b) { return ambient_less(a.ambient, b.ambient); });
  return out;
}

int euler_check(const OracleResult& census) {
  int chi = 0;
  for (const auto& pt : census.critical_points) {
    if (pt.degenerate || !pt.index) throw Error(ErrorCode::kDegeneratePresent, "census has a degenerate point");
    chi += (*pt.index % 2 == 0) ? 1 : -1;
  }
  return chi;
}

int euler_check(const std::vector<CriticalPoint>& census) {
  int chi = 0;
  for (const auto& cp : census) {
    if (cp.degenerate || !cp.morse_index) {
      throw Error(ErrorCode::kDegeneratePresent, "census has a degenerate point");
    }
    chi += (*cp.morse_index % 2 == 0) ? 1 : -1;
  }
  return chi;
}

AgreementReport agreement(const std::vector<CriticalPoint>& engine, const OracleResult& oracle,
                          double match_radius) {
  struct Pair {
    double dist;
    std::size_t e;
    std::size_t o;
  };
  std::vector<Pair> pairs;
  for (std::size_t e = 0; e < engine.size(); ++e) {
    for (std::size_t o = 0; o < oracle.critical_points.size(); ++o) {
      const double dist = (engine[e].location.coords - oracle.critical_points[o].ambient).norm();
      if (dist <= match_radius) pairs.push_back({dist, e, o});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.dist != b.dist ? a.dist < b.dist : (a.e != b.e ? a.e < b.e : a.o < b.o);
  });
  std::vector<bool> used_e(engine.size()), used_o(oracle.critical_points.size());
  AgreementReport report;
  auto describe = [](const std::optional<int>& idx) { return idx ? std::to_string(*idx) : std::string("degenerate"); };
  for (const auto& p : pairs) {
    if (used_e[p.e] || used_o[p.o]) continue;
    used_e[p.e] = used_o[p.o] = true;
    ++report.matched;
    report.max_distance = std::max(report.max_distance, p.dist);
    const auto& ei = engine[p.e].morse_index;
    const auto& oi = oracle.critical_points[p.o].index;
    if (ei != oi) {
      report.discrepancies.push_back({"index-mismatch", engine[p.e].location.coords,
                                      "engine " + describe(ei) + ", oracle " + describe(oi)});
    }
  }
  for (std::size_t e = 0; e < engine.size(); ++e) {
    if (!used_e[e]) {
      report.discrepancies.push_back({"unmatched-engine", engine[e].location.coords,
                                      "engine index " + describe(engine[e].morse_index)});
    }
  }
  for (std::size_t o = 0; o < oracle.critical_points.size(); ++o) {
    if (!used_o[o]) {
      report.discrepancies.push_back({"unmatched-oracle", oracle.critical_points[o].ambient,
                                      "oracle index " + describe(oracle.critical_points[o].index)});
    }
  }
  return report;
}

}  // namespace morsekit
