#include "morsekit/regions.hpp"

#include <cmath>
#include <sstream>

#include "morsekit/error.hpp"
#include "point_index.hpp"

namespace morsekit {

std::string_view region_kind_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::kSublevel: return "sublevel";
    case RegionKind::kSuperlevel: return "superlevel";
    case RegionKind::kZeroSet: return "zero-set";
  }
  return "unknown";
}

bool RegionDescriptor::contains(const Vec& x, double tolerance) const {
  const double v = field.value(x);
  switch (kind) {
    case RegionKind::kSublevel: return v <= level;
    case RegionKind::kSuperlevel: return v >= level;
    case RegionKind::kZeroSet: return std::abs(v - level) <= tolerance;
  }
  return false;
}

RegionDescriptor sublevel(ScalarField field, double level) {
  return {RegionKind::kSublevel, std::move(field), level};
}
RegionDescriptor superlevel(ScalarField field, double level) {
  return {RegionKind::kSuperlevel, std::move(field), level};
}
RegionDescriptor zero_set(ScalarField field, double level) {
  return {RegionKind::kZeroSet, std::move(field), level};
}

ScalarField zero_set_function(const RegionDescriptor& x) {
  const Expr phi = x.field.expr();
  const Expr c = Expr::constant(x.level);
  Expr g;
  switch (x.kind) {
    case RegionKind::kSublevel: g = pow(pos(phi - c), 3); break;
    case RegionKind::kSuperlevel: g = pow(pos(c - phi), 3); break;
    case RegionKind::kZeroSet: g = pow(phi - c, 2); break;
  }
  return ScalarField(g, x.field.ambient_dim());
}

namespace {

constexpr double kOverlapTol = 1e-12;

std::string describe_point(const Vec& x) {
  std::ostringstream out;
  out << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x(i);
  out << ")";
  return out.str();
}

ScalarField separation_from(const ScalarField& g, const ScalarField& h) {
  const Expr g2 = pow(g.expr(), 2);
  return ScalarField(g2 / (g2 + pow(h.expr(), 2)), g.ambient_dim());
}

void check_disjoint(const ScalarField& g, const ScalarField& h, const std::vector<Vec>& samples) {
  for (const auto& x : samples) {
    if (g.value(x) < kOverlapTol && h.value(x) < kOverlapTol) {
      throw Error(ErrorCode::kOverlappingSets, "regions meet at sample " + describe_point(x));
    }
  }
}

// Every sample within `dilation` of a sample of `closed` must lie in `u`.
void check_dilated(const RegionDescriptor& closed, const OpenRegion& u, const std::vector<Vec>& samples,
                   double dilation, const std::string& what) {
  const detail::PointIndex index(samples, dilation);
  for (const auto& x : samples) {
    if (!closed.contains(x)) continue;
    if (!u.contains(x)) throw Error(ErrorCode::kNotNested, what + " leaves U at " + describe_point(x));
    index.for_each_within(x, dilation, [&](std::size_t j) {
      if (!u.contains(samples[j])) {
        throw Error(ErrorCode::kNotNested,
                    what + " dilated by " + std::to_string(dilation) + " leaves U at " + describe_point(samples[j]));
      }
    });
  }
}

}  // namespace

ScalarField separation_function(const RegionDescriptor& x, const RegionDescriptor& y,
                                const std::vector<Vec>& samples) {
  const ScalarField g = zero_set_function(x);
  const ScalarField h = zero_set_function(y);
  check_disjoint(g, h, samples);
  return separation_from(g, h);
}

MiddleSet middle_set(const RegionDescriptor& c, const OpenRegion& u, const std::vector<Vec>& samples,
                     double dilation) {
  for (const auto& x : samples) {
    if (c.contains(x) && !u.contains(x)) {
      throw Error(ErrorCode::kNotNested, "C is not contained in U at " + describe_point(x));
    }
  }
  ScalarField h;
  try {
    h = separation_function(c, u.complement, samples);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kOverlappingSets) throw;
    throw Error(ErrorCode::kNotNested, std::string("C touches the complement of U: ") + e.what());
  }
  MiddleSet v{OpenRegion{superlevel(h, 0.5)}, sublevel(h, 0.5), h};
  for (const auto& x : samples) {
    if (c.contains(x) && !v.interior.contains(x)) {
      throw Error(ErrorCode::kNotNested, "C-sample outside V at " + describe_point(x));
    }
  }
  check_dilated(v.closure, u, samples, dilation, "closure of V");
  return v;
}

std::vector<MiddleSet> shrink_cover(const std::vector<OpenRegion>& cover, const std::vector<Vec>& samples,
                                    double dilation) {
  if (cover.empty()) throw Error(ErrorCode::kInvalidArgument, "shrink_cover needs at least one region");
  auto first_uncovered = [&](auto&& in_some) -> const Vec* {
    for (const auto& x : samples) {
      if (!in_some(x)) return &x;
    }
    return nullptr;
  };
  if (const Vec* miss = first_uncovered([&](const Vec& x) {
        for (const auto& u : cover)
          if (u.contains(x)) return true;
        return false;
      })) {
    throw Error(ErrorCode::kCoverFailure, "input regions miss sample " + describe_point(*miss));
  }

  const int n = cover.front().complement.field.ambient_dim();
  std::vector<MiddleSet> out;
  for (std::size_t k = 0; k < cover.size(); ++k) {
    // C_k is the intersection of {h_i >= 1/2} (i < k) and M \ U_i (i > k);
    // a sum of their zero-set functions vanishes exactly there.
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back(zero_set_function(out[i].interior.complement).expr());
    for (std::size_t i = k + 1; i < cover.size(); ++i) terms.push_back(zero_set_function(cover[i].complement).expr());
    const RegionDescriptor ck = zero_set(ScalarField(terms.empty() ? Expr::constant(0.0) : sum(terms), n), 0.0);
    try {
      out.push_back(middle_set(ck, cover[k], samples, dilation));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotNested) throw;
      throw Error(ErrorCode::kCoverFailure,
                  "region " + std::to_string(k + 1) + " cannot absorb what the others leave: " + e.what());
    }
  }

  if (const Vec* miss = first_uncovered([&](const Vec& x) {
        for (const auto& v : out)
          if (v.interior.contains(x)) return true;
        return false;
      })) {
    throw Error(ErrorCode::kCoverFailure, "shrunken regions miss sample " + describe_point(*miss));
  }
  return out;
}

Cutoff build_cutoff(const OpenRegion& u, const RegionDescriptor& c, int support_chart,
                    const std::vector<Vec>& samples, double dilation) {
  check_dilated(c, u, samples, dilation, "C");
  ScalarField lambda;
  try {
    lambda = separation_function(u.complement, c, samples);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kOverlappingSets) throw;
    throw Error(ErrorCode::kNotNested, std::string("C touches the complement of U: ") + e.what());
  }
  return Cutoff{lambda, support_chart, c, u.complement};
}

FineCover build_fine_cover(const ImplicitManifold& m, const CoverAtlas& atlas, double dilation) {
  FineCover fc;
  const int k = static_cast<int>(atlas.charts.size());
  fc.tau = 1.0 / (4.0 * k);
  for (const auto& chart : atlas.charts) {
    fc.score_squared.emplace_back(chart_score_squared(m, chart), m.ambient_dim());
    fc.regions.push_back(OpenRegion{sublevel(fc.score_squared.back(), fc.tau)});
  }
  fc.shrunk = shrink_cover(fc.regions, atlas.samples, dilation);
  for (int i = 0; i < k; ++i) {
    fc.cutoffs.push_back(build_cutoff(fc.regions[i], fc.shrunk[i].closure, i, atlas.samples, dilation));
  }
  return fc;
}

}  // namespace morsekit
