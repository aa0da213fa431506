#include "morsekit/sard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "morsekit/calculus.hpp"
#include "morsekit/error.hpp"
#include "point_index.hpp"

namespace morsekit {

namespace {

struct GammaSet {
  std::vector<Vec> images;  // H at each degenerate point
  Vec lo;
  Vec hi;
};

struct ChartSample {
  Vec x;
  Vec h;
  double det;
};

GammaSet collect(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas, int chart,
                 const Tolerances& tol) {
  const Chart& c = atlas.charts[static_cast<std::size_t>(chart)];
  std::vector<ChartSample> pts;
  for (std::size_t s : atlas.assigned_to(chart)) {
    const LocalFrame frame = local_frame(m, atlas.samples[s]);
    const ChartDerivatives cd = chart_derivatives(f.jet(frame.x), frame, c);
    pts.push_back({frame.x, cd.gradient, cd.hessian.determinant()});
  }
  GammaSet out;
  const int d = c.dim();
  out.lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
  out.hi = Vec::Constant(d, -std::numeric_limits<double>::infinity());
  if (pts.empty()) {
    out.lo.setZero();
    out.hi.setOnes();
    return out;
  }
  for (const auto& p : pts) {
    out.lo = out.lo.cwiseMin(p.h);
    out.hi = out.hi.cwiseMax(p.h);
    if (std::abs(p.det) < tol.degenerate_tol) out.images.push_back(p.h);
  }

  // Neighbour radius: a little over the largest nearest-neighbour gap.
  std::vector<Vec> xs;
  for (const auto& p : pts) xs.push_back(p.x);
  const double gap = detail::max_nearest_gap(xs);
  if (gap > 0.0) {
    const double radius = 1.5 * gap;
    const detail::PointIndex index(xs, radius);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      index.for_each_within(pts[i].x, radius, [&](std::size_t j) {
        if (j <= i || !(pts[i].det * pts[j].det < 0.0)) return;
        // Bisect det along the chart-coordinate segment, lifted to M.
        const Vec ua = c.project(pts[i].x);
        const Vec ub = c.project(pts[j].x);
        double t0 = 0.0;
        double t1 = 1.0;
        const double s0 = pts[i].det;
        Vec x = pts[i].x;
        Vec h = pts[i].h;
        try {
          for (int it = 0; it < 60; ++it) {
            const double t = 0.5 * (t0 + t1);
            x = solve_parametrization(m, c, (1.0 - t) * ua + t * ub, pts[i].x, atlas.membership_threshold).coords;
            const LocalFrame frame = local_frame(m, x);
            const ChartDerivatives cd = chart_derivatives(f.jet(x), frame, c);
            h = cd.gradient;
            const double det = cd.hessian.determinant();
            if (det == 0.0) break;
            ((det > 0.0) == (s0 > 0.0) ? t0 : t1) = t;
          }
        } catch (const Error&) {
          return;  // segment leaves the chart
        }
        out.images.push_back(h);
      });
    }
  }
  return out;
}

SardEstimate occupancy(const GammaSet& gamma, int chart, int value_grid) {
  if (value_grid < 1) throw Error(ErrorCode::kInvalidArgument, "value_grid must be positive");
  SardEstimate est;
  est.chart = chart;
  est.value_grid = value_grid;
  est.range_lo = gamma.lo;
  est.range_hi = gamma.hi;
  const int d = static_cast<int>(gamma.lo.size());
  for (int a = 0; a < d; ++a) {
    if (!(est.range_hi(a) > est.range_lo(a))) {
      est.range_lo(a) -= 0.5;
      est.range_hi(a) += 0.5;
    }
  }
  est.total_cells = std::pow(static_cast<double>(value_grid), d);
  est.gamma_points = static_cast<int>(gamma.images.size());
  std::unordered_set<long long> cells;
  for (const auto& v : gamma.images) {
    long long key = 0;
    for (int a = 0; a < d; ++a) {
      // Roots found between samples can land just past the sampled range;
      // they count in the boundary cell.
      const double r = (v(a) - est.range_lo(a)) / (est.range_hi(a) - est.range_lo(a));
      const long long cell = std::clamp(static_cast<long long>(std::floor(r * value_grid)), 0LL,
                                        static_cast<long long>(value_grid) - 1);
      key = key * value_grid + cell;
    }
    cells.insert(key);
  }
  est.occupied = static_cast<long long>(cells.size());
  est.fraction = static_cast<double>(est.occupied) / est.total_cells;
  return est;
}

}  // namespace

SardEstimate sard_measure_estimate(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                   int chart, int value_grid, const Tolerances& tol) {
  if (chart < 0 || chart >= static_cast<int>(atlas.charts.size())) {
    throw Error(ErrorCode::kInvalidArgument, "chart index out of range");
  }
  return occupancy(collect(f, m, atlas, chart, tol), chart, value_grid);
}

std::vector<SardRow> sard_table(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                const std::vector<int>& value_grids, const Tolerances& tol) {
  std::vector<GammaSet> gammas;
  for (int c = 0; c < static_cast<int>(atlas.charts.size()); ++c) gammas.push_back(collect(f, m, atlas, c, tol));
  std::vector<SardRow> rows;
  for (int grid : value_grids) {
    SardRow row;
    row.value_grid = grid;
    for (int c = 0; c < static_cast<int>(gammas.size()); ++c) {
      row.charts.push_back(occupancy(gammas[static_cast<std::size_t>(c)], c, grid));
      row.max_fraction = std::max(row.max_fraction, row.charts.back().fraction);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace morsekit
