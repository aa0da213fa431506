#include "morsekit/report.hpp"

#include <charconv>
#include <cmath>

namespace morsekit {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

namespace {

// JSON has no infinities; they appear as strings.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(format_real(v)); }

Json reals(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(real(v));
  return out;
}

}  // namespace

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(real(v(i)));
  return out;
}

Json to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vec(m.row(i).transpose())));
  return out;
}

Json to_json(const Tolerances& tol) {
  return Json{{"critical_tol", tol.critical_tol},
              {"degenerate_tol", tol.degenerate_tol},
              {"dedupe_radius", tol.dedupe_radius},
              {"membership_threshold", tol.membership_threshold},
              {"match_radius", tol.match_radius},
              {"max_newton_step", tol.max_newton_step},
              {"max_newton_iterations", tol.max_newton_iterations},
              {"max_draws", tol.max_draws},
              {"k_inflation", tol.k_inflation}};
}

Json to_json(const CriticalPoint& cp) {
  Json out;
  out["location"] = to_json(cp.location.coords);
  out["residual"] = real(cp.location.residual);
  out["chart"] = cp.chart;
  out["gradient"] = to_json(cp.gradient);
  out["hessian"] = to_json(cp.hessian);
  out["det_hessian"] = real(cp.det_hessian);
  out["degenerate"] = cp.degenerate;
  out["morse_index"] = cp.morse_index ? Json(*cp.morse_index) : Json(nullptr);
  out["margin"] = real(cp.margin);
  return out;
}

Json to_json(const std::vector<CriticalPoint>& points) {
  Json out = Json::array();
  for (const auto& cp : points) out.push_back(to_json(cp));
  return out;
}

Json to_json(const CoverAtlas& atlas) {
  Json charts = Json::array();
  for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
    int assigned = 0;
    double worst = 1.0;
    for (std::size_t s = 0; s < atlas.num_samples(); ++s) {
      if (atlas.assignment[s] == static_cast<int>(c)) {
        ++assigned;
        worst = std::min(worst, atlas.best_score(s));
      }
    }
    charts.push_back(Json{{"index", c},
                          {"label", atlas.charts[c].label()},
                          {"assigned_samples", assigned},
                          {"min_assigned_score", assigned ? real(worst) : Json(nullptr)}});
  }
  Json out;
  out["membership_threshold"] = atlas.membership_threshold;
  out["samples"] = atlas.num_samples();
  out["charts"] = std::move(charts);
  return out;
}

Json to_json(const RegionDescriptor& region) {
  return Json{{"kind", std::string(region_kind_name(region.kind))},
              {"field", region.field.to_string()},
              {"level", real(region.level)}};
}

Json to_json(const FineCover& cover) {
  Json regions = Json::array();
  for (std::size_t i = 0; i < cover.regions.size(); ++i) {
    regions.push_back(Json{{"chart", i},
                           {"open_region_complement", to_json(cover.regions[i].complement)},
                           {"closure_of_shrunk", to_json(cover.shrunk[i].closure)},
                           {"cutoff", cover.cutoffs[i].lambda.to_string()}});
  }
  return Json{{"tau", cover.tau}, {"regions", std::move(regions)}};
}

Json to_json(const OpennessResult& result) {
  Json charts = Json::array();
  for (const auto& c : result.charts) {
    charts.push_back(Json{{"chart", c.chart},
                          {"K", real(c.k)},
                          {"L", real(c.l)},
                          {"epsilon", real(c.epsilon)},
                          {"points", c.samples}});
  }
  return Json{{"epsilon", real(result.epsilon)}, {"charts", std::move(charts)}};
}

Json to_json(const PerturbationStep& step) {
  Json out;
  out["chart"] = step.chart_index;
  out["coefficients"] = to_json(step.coefficients);
  out["delta_budget"] = real(step.delta_budget);
  out["openness_radius"] = real(step.openness);
  out["K"] = real(step.k_bound);
  out["coefficient_bound"] = real(step.coefficient_bound);
  out["draws"] = step.draws;
  out["cutoff"] = step.has_cutoff;
  out["margins_before"] = reals(step.margins_before);
  out["margins_after"] = reals(step.margins_after);
  out["c2_spent"] = real(step.c2_spent);
  out["gluing_residual"] = real(step.gluing_residual);
  return out;
}

Json to_json(const MorsifyTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps) steps.push_back(to_json(s));
  Json out;
  out["epsilon_requested"] = real(trace.epsilon_requested);
  out["epsilon_prime"] = real(trace.epsilon_prime);
  out["total_c2"] = real(trace.total_c2);
  out["steps"] = std::move(steps);
  out["final_margins"] = reals(trace.final_margins);
  out["final_critical_points"] = to_json(trace.final_critical_points);
  return out;
}

Json to_json(const SardEstimate& est) {
  return Json{{"chart", est.chart},
              {"value_grid", est.value_grid},
              {"occupied", est.occupied},
              {"total_cells", real(est.total_cells)},
              {"fraction", real(est.fraction)},
              {"gamma_points", est.gamma_points},
              {"range_lo", to_json(est.range_lo)},
              {"range_hi", to_json(est.range_hi)}};
}

Json to_json(const std::vector<SardRow>& table) {
  Json out = Json::array();
  for (const auto& row : table) {
    Json charts = Json::array();
    for (const auto& c : row.charts) charts.push_back(to_json(c));
    out.push_back(Json{{"value_grid", row.value_grid},
                       {"max_fraction", real(row.max_fraction)},
                       {"charts", std::move(charts)}});
  }
  return out;
}

Json to_json(const OracleResult& oracle) {
  Json points = Json::array();
  for (const auto& p : oracle.critical_points) {
    points.push_back(Json{{"parameters", to_json(p.parameters)},
                          {"patch", p.patch},
                          {"ambient", to_json(p.ambient)},
                          {"degenerate", p.degenerate},
                          {"index", p.index ? Json(*p.index) : Json(nullptr)}});
  }
  return Json{{"manifold", oracle.manifold},
              {"field", oracle.field},
              {"resolution", oracle.resolution},
              {"critical_points", std::move(points)}};
}

Json to_json(const AgreementReport& report) {
  Json issues = Json::array();
  for (const auto& d : report.discrepancies) {
    issues.push_back(Json{{"kind", d.kind}, {"location", to_json(d.location)}, {"detail", d.detail}});
  }
  return Json{{"ok", report.ok()},
              {"matched", report.matched},
              {"max_distance", real(report.max_distance)},
              {"discrepancies", std::move(issues)}};
}

}  // namespace morsekit
