#include "morsekit/morsifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "morsekit/error.hpp"
#include "point_index.hpp"

namespace morsekit {

Vec gradient_map(const ScalarField& f, const ImplicitManifold& m, const Chart& chart, const Vec& x,
                 double membership_threshold) {
  return chart_gradient(f, m, chart, x, membership_threshold);
}

MorseReport is_morse(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                     const Tolerances& tol, const PointFilter& region) {
  MorseReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (auto& cp : find_critical_points(f, m, atlas, tol).points) {
    if (region && !region(cp.location.coords)) continue;
    report.min_margin = std::min(report.min_margin, cp.margin);
    if (cp.degenerate) report.degenerate_points.push_back(cp);
    report.critical_points.push_back(std::move(cp));
  }
  report.morse = report.degenerate_points.empty();
  return report;
}

namespace {

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Expr linear_combination(const Chart& chart, const Vec& a) {
  std::vector<Expr> terms;
  for (int l = 0; l < chart.dim(); ++l) terms.push_back(Expr::constant(a(l)) * Expr::variable(chart.sigma(l)));
  return sum(terms);
}

std::vector<std::size_t> seeds_for(const CoverAtlas& atlas, int chart, const PointFilter& region) {
  std::vector<std::size_t> seeds;
  for (std::size_t s = 0; s < atlas.num_samples(); ++s) {
    const bool take = region ? (region(atlas.samples[s]) &&
                                atlas.scores[s][static_cast<std::size_t>(chart)] > atlas.membership_threshold)
                             : atlas.assignment[s] == chart;
    if (take) seeds.push_back(s);
  }
  return seeds;
}

Jet difference(const Jet& a, const Jet& b) {
  return Jet{a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian};
}

std::vector<double> margins_of(const std::vector<CriticalPoint>& points) {
  std::vector<double> out;
  for (const auto& cp : points) out.push_back(cp.margin);
  return out;
}

// G = sum_j |D_sigma(j) h| + |det(D_sigma D_sigma h)| and the largest
// second-tier entry, at one point.
struct OpennessValues {
  double g = 0.0;
  double l = 0.0;
};

OpennessValues openness_values(const Tiers& t, const Chart& chart) {
  const int d = chart.dim();
  Mat block(d, d);
  double first = 0.0;
  for (int a = 0; a < d; ++a) {
    first += std::abs(t.first(chart.sigma(a)));
    for (int b = 0; b < d; ++b) block(a, b) = t.second(chart.sigma(a), chart.sigma(b));
  }
  return {first + std::abs(block.determinant()), block.cwiseAbs().maxCoeff()};
}

void accumulate(const OpennessValues& v, OpennessChart& acc) {
  acc.k = std::min(acc.k, v.g);
  acc.l = std::max(acc.l, v.l);
}

// Compass search in chart coordinates for a smaller value of `score` over
// the part of C reachable from `seed` on its sheet. G is only Lipschitz
// (absolute values, determinants), so no derivatives are used. Returns the
// best value seen, never worse than score(seed).
template <typename Score>
double compass_search(const ImplicitManifold& m, const Chart& chart, const RegionDescriptor& c, const Vec& seed,
                      double step, double membership_threshold, const Score& score) {
  const int d = chart.dim();
  Vec u = chart.project(seed);
  Vec x = seed;
  double best = score(seed);
  int evaluations = 0;
  while (step > 1e-9 && evaluations < 400) {
    bool moved = false;
    for (int a = 0; a < d && !moved; ++a) {
      for (double sgn : {1.0, -1.0}) {
        Vec trial = u;
        trial(a) += sgn * step;
        ++evaluations;
        try {
          const Vec y = solve_parametrization(m, chart, trial, x, membership_threshold).coords;
          if (!c.contains(y)) continue;
          const double v = score(y);
          if (v < best) {
            best = v;
            u = trial;
            x = y;
            moved = true;
            break;
          }
        } catch (const Error&) {
          // Off the sheet or out of the chart: not a candidate.
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

OpennessResult openness_impl(const ScalarField& h, const ImplicitManifold& m, const CoverAtlas& atlas,
                             const FineCover& cover, std::vector<int> charts, const Tolerances& tol,
                             const std::vector<TierFrame>& frames) {
  if (charts.empty()) {
    for (int i = 0; i < static_cast<int>(atlas.charts.size()); ++i) charts.push_back(i);
  }
  auto in_listed = [&](const Vec& x) {
    return std::any_of(charts.begin(), charts.end(),
                       [&](int j) { return cover.shrunk[static_cast<std::size_t>(j)].closure.contains(x); });
  };
  const MorseReport report = is_morse(h, m, atlas, tol, in_listed);
  if (!report.morse) {
    throw Error(ErrorCode::kNotMorse, std::to_string(report.degenerate_points.size()) +
                                          " degenerate critical point(s) on the certified charts");
  }
  const double gap = detail::max_nearest_gap(atlas.samples);

  OpennessResult result;
  result.epsilon = std::numeric_limits<double>::infinity();
  for (int j : charts) {
    const Chart& chart = atlas.charts[static_cast<std::size_t>(j)];
    const RegionDescriptor& cj = cover.shrunk[static_cast<std::size_t>(j)].closure;
    OpennessChart acc;
    acc.chart = j;
    acc.k = std::numeric_limits<double>::infinity();

    std::vector<Vec> xs;
    std::vector<OpennessValues> vals;
    for (const auto& tf : frames) {
      if (!cj.contains(tf.frame.x)) continue;
      xs.push_back(tf.frame.x);
      vals.push_back(openness_values(d_tiers(h, tf), chart));
      accumulate(vals.back(), acc);
      ++acc.samples;
    }
    // Samples straddle the critical points, where G is smallest.
    for (const auto& cp : report.critical_points) {
      if (cj.contains(cp.location.coords)) {
        accumulate(openness_values(d_tiers(h, tier_frame(m, cp.location.coords)), chart), acc);
      }
    }
    // The sampled min of G and max of L can be off by a Lipschitz constant
    // times the spacing, on the unsafe side. Polish every sampled local
    // extremum by a search on M.
    if (gap > 0.0 && !xs.empty()) {
      const double radius = 1.5 * gap;
      const detail::PointIndex index(xs, radius);
      auto g_at = [&](const Vec& x) { return openness_values(d_tiers(h, tier_frame(m, x)), chart).g; };
      auto neg_l_at = [&](const Vec& x) { return -openness_values(d_tiers(h, tier_frame(m, x)), chart).l; };
      for (std::size_t s = 0; s < xs.size(); ++s) {
        bool min_g = true;
        bool max_l = true;
        index.for_each_within(xs[s], radius, [&](std::size_t t) {
          if (t == s) return;
          min_g = min_g && (vals[s].g < vals[t].g || (vals[s].g == vals[t].g && s < t));
          max_l = max_l && (vals[s].l > vals[t].l || (vals[s].l == vals[t].l && s < t));
        });
        if (min_g) acc.k = std::min(acc.k, compass_search(m, chart, cj, xs[s], gap, tol.membership_threshold, g_at));
        if (max_l) {
          acc.l = std::max(acc.l, -compass_search(m, chart, cj, xs[s], gap, tol.membership_threshold, neg_l_at));
        }
      }
    }
    if (acc.samples == 0) {
      acc.k = 0.0;
      acc.epsilon = std::numeric_limits<double>::infinity();
    } else {
      if (!(acc.k > 0.0)) {
        throw Error(ErrorCode::kNotMorse, "nondegeneracy margin vanishes on chart " + chart.label());
      }
      acc.epsilon = solve_openness_inequality(acc.k, acc.l, chart.dim());
    }
    result.epsilon = std::min(result.epsilon, acc.epsilon);
    result.charts.push_back(acc);
  }
  return result;
}

}  // namespace

ShiftChoice choose_regular_shift(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                 int chart, double bound, std::uint64_t rng_seed, const Tolerances& tol,
                                 const PointFilter& region) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient bound must be positive and finite");
  }
  if (chart < 0 || chart >= static_cast<int>(atlas.charts.size())) {
    throw Error(ErrorCode::kInvalidArgument, "chart index out of range");
  }
  const Chart& c = atlas.charts[static_cast<std::size_t>(chart)];
  const std::vector<std::size_t> seeds = seeds_for(atlas, chart, region);
  std::mt19937_64 rng(rng_seed);
  for (int draw = 1; draw <= tol.max_draws; ++draw) {
    Vec a(c.dim());
    for (int l = 0; l < c.dim(); ++l) a(l) = bound * (2.0 * open_unit(rng) - 1.0);
    const ScalarField phi(f.expr() - linear_combination(c, a), f.ambient_dim());
    CriticalSearch search = find_critical_points_in_chart(phi, m, atlas, chart, seeds, tol, region);
    const bool clean = std::none_of(search.points.begin(), search.points.end(),
                                    [](const CriticalPoint& cp) { return cp.degenerate; });
    if (clean) return ShiftChoice{a, draw, std::move(search.points)};
  }
  throw Error(ErrorCode::kRejectionBudgetExceeded,
              "no regular shift found in " + std::to_string(tol.max_draws) + " draws on chart " + c.label());
}

double solve_openness_inequality(double k, double l, int d) {
  if (!(k > 0.0) || !(l >= 0.0) || d < 1) {
    throw Error(ErrorCode::kInvalidArgument, "openness inequality needs K > 0, L >= 0, d >= 1");
  }
  double factorial = 1.0;
  for (int i = 2; i <= d; ++i) factorial *= i;
  // (L + e)^d - L^d expanded so small e does not cancel.
  auto lhs = [&](double e) {
    double diff = 0.0;
    double binom = 1.0;
    for (int j = 1; j <= d; ++j) {
      binom = binom * (d - j + 1) / j;
      diff += binom * std::pow(l, d - j) * std::pow(e, j);
    }
    return factorial * diff + d * e;
  };
  double lo = 0.0;
  double hi = k / d;  // lhs(e) >= d e
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) < k ? lo : hi) = mid;
  }
  return lo;
}

OpennessResult openness_radius(const ScalarField& h, const ImplicitManifold& m, const CoverAtlas& atlas,
                               const FineCover& cover, const std::vector<int>& charts, const Tolerances& tol) {
  return openness_impl(h, m, atlas, cover, charts, tol, tier_frames(m, atlas.samples));
}

double linear_shift_bound(const Chart& chart, const std::optional<ScalarField>& lambda,
                          const std::vector<TierFrame>& frames, double inflation) {
  double worst = 0.0;
  for (const auto& tf : frames) {
    const Vec& x = tf.frame.x;
    const int n = static_cast<int>(x.size());
    const Jet lam = lambda ? lambda->jet(x) : Jet{1.0, Vec::Zero(n), Mat::Zero(n, n)};
    for (int l = 0; l < chart.dim(); ++l) {
      const int s = chart.sigma(l);
      Vec e = Vec::Zero(n);
      e(s) = 1.0;
      Jet prod;
      prod.value = lam.value * x(s);
      prod.gradient = lam.gradient * x(s) + lam.value * e;
      prod.hessian = lam.hessian * x(s) + lam.gradient * e.transpose() + e * lam.gradient.transpose();
      worst = std::max(worst, d_tiers(prod, tf).max_abs());
    }
  }
  return inflation * worst;
}

MorsifyResult morsify(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                      const FineCover& cover, double epsilon, std::uint64_t rng_seed, const Tolerances& tol) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  }
  if (cover.cutoffs.size() != atlas.charts.size()) {
    throw Error(ErrorCode::kCoverFailure, "fine cover does not match the atlas");
  }
  const std::vector<TierFrame> frames = tier_frames(m, atlas.samples);
  const int k = static_cast<int>(atlas.charts.size());

  MorsifyTrace trace;
  trace.epsilon_requested = epsilon;
  trace.epsilon_prime = epsilon / k;

  ScalarField g = f;
  for (int i = 0; i < k; ++i) {
    const Chart& chart = atlas.charts[static_cast<std::size_t>(i)];
    const OpenRegion& ui = cover.regions[static_cast<std::size_t>(i)];
    const PointFilter in_ui = [&ui](const Vec& x) { return ui.contains(x); };
    const std::vector<std::size_t> seeds = seeds_for(atlas, i, in_ui);

    PerturbationStep step;
    step.chart_index = i;
    step.margins_before = margins_of(find_critical_points_in_chart(g, m, atlas, i, seeds, tol, in_ui).points);

    std::optional<ScalarField> lambda;
    if (i == 0) {
      step.openness = std::numeric_limits<double>::infinity();
      step.delta_budget = trace.epsilon_prime;
    } else {
      std::vector<int> clean(static_cast<std::size_t>(i));
      for (int j = 0; j < i; ++j) clean[static_cast<std::size_t>(j)] = j;
      step.openness = openness_impl(g, m, atlas, cover, clean, tol, frames).epsilon;
      step.delta_budget = std::min(trace.epsilon_prime, step.openness);
      lambda = cover.cutoffs[static_cast<std::size_t>(i)].lambda;
      step.has_cutoff = true;
    }
    step.k_bound = linear_shift_bound(chart, lambda, frames, tol.k_inflation);
    step.coefficient_bound = step.delta_budget / (2.0 * step.k_bound * chart.dim());

    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(i)};
    const std::uint64_t step_seed = std::mt19937_64(seq)();
    const ShiftChoice choice =
        choose_regular_shift(g, m, atlas, i, step.coefficient_bound, step_seed, tol, in_ui);
    step.draws = choice.draws;
    step.coefficients = -choice.a;

    const Expr shift = linear_combination(chart, step.coefficients);
    const ScalarField g_prime(g.expr() + shift, m.ambient_dim());
    const ScalarField g_next = lambda ? ScalarField(g.expr() + lambda->expr() * shift, m.ambient_dim()) : g_prime;

    step.c2_spent = c2_distance(g_next, g, frames);
    const RegionDescriptor& ci = cover.shrunk[static_cast<std::size_t>(i)].closure;
    for (const auto& tf : frames) {
      if (!ci.contains(tf.frame.x)) continue;
      const Jet diff = difference(g_next.jet(tf.frame.x), g_prime.jet(tf.frame.x));
      step.gluing_residual = std::max(step.gluing_residual, d_tiers(diff, tf).max_abs());
    }
    step.margins_after =
        margins_of(find_critical_points_in_chart(g_next, m, atlas, i, seeds, tol, in_ui).points);
    g = g_next;
    trace.steps.push_back(std::move(step));
  }

  const MorseReport final_report = is_morse(g, m, atlas, tol);
  trace.final_critical_points = final_report.critical_points;
  trace.final_margins = margins_of(final_report.critical_points);
  trace.total_c2 = c2_distance(f, g, frames);
  return MorsifyResult{g, std::move(trace)};
}

}  // namespace morsekit
