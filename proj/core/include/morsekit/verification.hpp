#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morsekit/calculus.hpp"
#include "morsekit/linalg.hpp"
#include "morsekit/scalar_field.hpp"

namespace morsekit {

/// A parametrization t -> x(t) with its first and second derivatives.
struct Embedding {
  Vec x;
  Mat jacobian;             // n x d
  std::vector<Mat> second;  // per ambient coordinate, d x d
};

/// One parameter box of a parametrization. Periodic axes wrap.
struct Patch {
  Vec lo;
  Vec hi;
  std::vector<bool> periodic;
  Embedding (*embed)(const Vec& t, const Vec& params) = nullptr;
  Vec params;  // shape constants handed to embed
};

/// Known global parametrization of a library manifold, independent of the
/// chart machinery. The sphere uses two angle patches with rotated poles,
/// each dropping a band around its own poles.
struct Parametrization {
  std::string id;  // canonical text, e.g. "torus(2, 1, 2)"
  int ambient_dim = 0;
  int dim = 0;
  std::vector<Patch> patches;
};

Parametrization circle_parametrization();
Parametrization sphere_parametrization();
/// Tube radius r around a circle of radius R in the plane orthogonal to the
/// 0-based ambient coordinate `axis`, matching library::torus.
Parametrization torus_parametrization(double major = 2.0, double minor = 1.0, int axis = 1);

/// Parses "circle", "sphere" or "torus(R, r, axis)" with a 1-based axis.
/// Throws kInvalidArgument.
Parametrization parse_parametrization(const std::string& text);

struct OraclePoint {
  Vec parameters;
  int patch = 0;
  Vec ambient;
  std::optional<int> index;  // unset when degenerate
  bool degenerate = false;
};

struct OracleResult {
  std::string manifold;
  std::string field;
  std::vector<OraclePoint> critical_points;  // sorted by ambient coordinates
  int resolution = 0;                        // grid points per parameter axis
};

/// Dense-sweep critical census of f o x(t).
///
/// 1-D: sign changes of F' refined by bisection, plus local minima of |F'|
/// refined by golden section (double roots do not change sign). 2-D: cells
/// where both partials change sign, refined by Newton. Roots are located to
/// 1e-10 in the parameter; a root is degenerate when |F''| (1-D) or the
/// smallest |eigenvalue| of the parameter Hessian (2-D) is below 1e-6.
/// Throws kInvalidArgument when resolution < 1e4 in 1-D or < 100 in 2-D.
OracleResult oracle_critical_census(const Parametrization& p, const ScalarField& f, int resolution);

/// Alternating index sum. Throws kDegeneratePresent on a degenerate point.
int euler_check(const OracleResult& census);
int euler_check(const std::vector<CriticalPoint>& census);

struct Discrepancy {
  std::string kind;  // "unmatched-engine", "unmatched-oracle", "index-mismatch"
  Vec location;
  std::string detail;
};

struct AgreementReport {
  int matched = 0;
  double max_distance = 0.0;
  std::vector<Discrepancy> discrepancies;

  bool ok() const { return discrepancies.empty(); }
};

/// Bijective matching in ambient coordinates: pairs within match_radius
/// are taken closest first; matched pairs must agree in degeneracy and
/// index.
AgreementReport agreement(const std::vector<CriticalPoint>& engine, const OracleResult& oracle,
                          double match_radius = 1e-4);

}  // namespace morsekit
