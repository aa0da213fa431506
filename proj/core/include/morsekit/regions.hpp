#pragma once

#include <string>
#include <vector>

#include "morsekit/chart.hpp"
#include "morsekit/manifold.hpp"
#include "morsekit/scalar_field.hpp"

namespace morsekit {

enum class RegionKind { kSublevel, kSuperlevel, kZeroSet };

std::string_view region_kind_name(RegionKind kind);

/// A closed subset of M cut out by one field: {phi <= c}, {phi >= c} or
/// {phi = c}.
struct RegionDescriptor {
  RegionKind kind = RegionKind::kSublevel;
  ScalarField field;
  double level = 0.0;

  /// Sampled membership. Sub- and superlevel sets are tested exactly; a
  /// zero set tests |phi - c| <= tolerance.
  bool contains(const Vec& x, double tolerance = 0.0) const;
};

RegionDescriptor sublevel(ScalarField field, double level);
RegionDescriptor superlevel(ScalarField field, double level);
RegionDescriptor zero_set(ScalarField field, double level = 0.0);

/// An open subset of M, stored as the closed set it leaves out.
struct OpenRegion {
  RegionDescriptor complement;

  bool contains(const Vec& x) const { return !complement.contains(x); }
};

/// C^2 field g >= 0 vanishing exactly on X: max(phi - c, 0)^3 for
/// sublevels, max(c - phi, 0)^3 for superlevels, (phi - c)^2 for zero sets.
ScalarField zero_set_function(const RegionDescriptor& x);

/// g^2 / (g^2 + h^2) with g, h the zero-set functions of X and Y: 0 on X, 1
/// on Y. Throws kOverlappingSets if a sample has both g and h below 1e-12.
ScalarField separation_function(const RegionDescriptor& x, const RegionDescriptor& y,
                                const std::vector<Vec>& samples);

/// V = {h < 1/2} for h = separation_function(C, M \ U), together with the
/// closed set {h <= 1/2} standing in for its closure.
struct MiddleSet {
  OpenRegion interior;      // V
  RegionDescriptor closure;  // {h <= 1/2}
  ScalarField h;
};

/// Throws kNotNested unless every C-sample lies in V and every sample
/// within `dilation` of a closure-sample lies in U.
MiddleSet middle_set(const RegionDescriptor& c, const OpenRegion& u, const std::vector<Vec>& samples,
                     double dilation);

/// Shrinks an open cover {U_i} to {V_i} with closures nested in U_i, one
/// region at a time in index order:
///     C_k = M \ (V_1 u ... u V_{k-1} u U_{k+1} u ... u U_m),
///     V_k = middle_set(C_k, U_k).
/// Throws kCoverFailure naming the first sample the input or output cover
/// misses, kNotNested if a closure escapes its U_k.
std::vector<MiddleSet> shrink_cover(const std::vector<OpenRegion>& cover, const std::vector<Vec>& samples,
                                    double dilation);

/// lambda = separation_function(M \ U, C): 0 off U, 1 on C.
struct Cutoff {
  ScalarField lambda;
  int support_chart = 0;
  RegionDescriptor inner;  // C
  RegionDescriptor outer;  // M \ U
};

/// Throws kNotNested if some C-sample (dilated) leaves U.
Cutoff build_cutoff(const OpenRegion& u, const RegionDescriptor& c, int support_chart,
                    const std::vector<Vec>& samples, double dilation);

/// Chart regions U_i = {score_i^2 > tau}, their shrinkage and cutoffs.
///
/// The squared scores sum to 1 at every point, so tau = 1 / (4k) with k
/// charts leaves every point in some U_i with a score of at least
/// 1/sqrt(k), well above any membership threshold.
struct FineCover {
  double tau = 0.0;
  std::vector<ScalarField> score_squared;
  std::vector<OpenRegion> regions;  // U_i
  std::vector<MiddleSet> shrunk;    // V_i, C_i
  std::vector<Cutoff> cutoffs;      // lambda_i
};

FineCover build_fine_cover(const ImplicitManifold& m, const CoverAtlas& atlas, double dilation);

}  // namespace morsekit
