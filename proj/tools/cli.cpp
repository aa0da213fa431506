#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "morsekit/error.hpp"
#include "morsekit/manifold_file.hpp"
#include "morsekit/report.hpp"

namespace morsekit::cli {

std::string command_name(Command c) {
  switch (c) {
    case Command::kAnalyze: return "analyze";
    case Command::kMorsify: return "morsify";
    case Command::kCover: return "cover";
    case Command::kVerify: return "verify";
    case Command::kSard: return "sard";
  }
  return "unknown";
}

namespace {

constexpr const char* kOutDirEnv = "MORSEKIT_OUT_DIR";
const std::vector<int> kSardGrids = {64, 128, 256, 512, 1024};

std::string csv_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Csv {
  std::ostringstream text;

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((text << (first ? "" : ",") << cell(cells), first = false), ...);
    text << "\n";
  }
  static std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  static std::string cell(const char* s) { return cell(std::string(s)); }
  static std::string cell(double v) { return csv_real(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
};

std::string join_vec(const Vec& v, const std::string& sep = ",") {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? sep : "") + csv_real(v(i));
  return out;
}

std::string coordinate_header(int n) {
  std::string out;
  for (int i = 1; i <= n; ++i) out += (i > 1 ? "," : "") + ("x" + std::to_string(i));
  return out;
}

Json config_json(const RunConfig& c, const Tolerances& tol) {
  Json overrides = Json::object();
  for (const auto& [k, v] : c.tolerance_overrides) overrides[k] = v;
  Json out;
  out["command"] = command_name(c.command);
  out["manifold_file"] = c.manifold_file;
  out["field"] = c.field_expression;
  out["epsilon"] = c.epsilon;
  out["seed"] = c.rng_seed;
  out["grid"] = c.grid_density;
  out["format"] = c.format == Format::kJson ? "json" : "csv";
  out["output"] = c.output;
  out["tolerance_overrides"] = std::move(overrides);
  out["tolerances"] = to_json(tol);
  return out;
}

// Shared state every command needs.
struct Session {
  RunConfig config;
  Tolerances tol;
  std::optional<ManifoldDefinition> def;
  std::vector<PointOnM> samples;
  CoverAtlas atlas;
  std::optional<ScalarField> field;

  const ImplicitManifold& m() const { return def->manifold; }
};

ScalarField parse_field(const std::string& text, int n) {
  if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "this command needs --field");
  return ScalarField(parse_expression(text, n, 1, 1), n);
}

struct Outcome {
  std::string body;
  int status = kExitOk;
};

Json manifold_json(const Session& s) {
  return Json{{"name", s.m().name()},
              {"ambient_dim", s.m().ambient_dim()},
              {"intrinsic_dim", s.m().intrinsic_dim()},
              {"samples", s.samples.size()}};
}

Json header(const Session& s) {
  Json out;
  out["tool"] = "morsekit";
  out["config"] = config_json(s.config, s.tol);
  out["manifold"] = manifold_json(s);
  return out;
}

std::optional<int> euler_or_none(const std::vector<CriticalPoint>& points) {
  try {
    return euler_check(points);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Outcome analyze(const Session& s) {
  const CriticalSearch search = find_critical_points(*s.field, s.m(), s.atlas, s.tol);
  const bool morse = std::none_of(search.points.begin(), search.points.end(),
                                  [](const CriticalPoint& cp) { return cp.degenerate; });
  if (s.config.format == Format::kCsv) {
    Csv csv;
    csv.text << coordinate_header(s.m().ambient_dim()) << ",chart,det_hessian,degenerate,morse_index,margin\n";
    for (const auto& cp : search.points) {
      csv.text << join_vec(cp.location.coords) << ",";
      csv.row(cp.chart, cp.det_hessian, cp.degenerate,
              cp.morse_index ? std::to_string(*cp.morse_index) : std::string(), cp.margin);
    }
    return {csv.text.str()};
  }
  Json out = header(s);
  out["field"] = s.field->to_string();
  out["seeds"] = search.seeds;
  out["converged_seeds"] = search.converged;
  out["morse"] = morse;
  const auto chi = euler_or_none(search.points);
  out["euler_characteristic"] = chi ? Json(*chi) : Json(nullptr);
  out["critical_points"] = to_json(search.points);
  return {out.dump(2) + "\n"};
}

Outcome cover(const Session& s) {
  const FineCover fc = build_fine_cover(s.m(), s.atlas, s.tol.dedupe_radius);
  if (s.config.format == Format::kCsv) {
    Csv csv;
    csv.text << coordinate_header(s.m().ambient_dim()) << ",chart";
    for (const auto& c : s.atlas.charts) csv.text << ",score" << Csv::cell(c.label());
    csv.text << "\n";
    for (std::size_t i = 0; i < s.atlas.num_samples(); ++i) {
      csv.text << join_vec(s.atlas.samples[i]) << "," << s.atlas.assignment[i];
      for (double v : s.atlas.scores[i]) csv.text << "," << csv_real(v);
      csv.text << "\n";
    }
    return {csv.text.str()};
  }
  Json out = header(s);
  out["atlas"] = to_json(s.atlas);
  out["fine_cover"] = to_json(fc);
  return {out.dump(2) + "\n"};
}

Outcome morsify_command(const Session& s) {
  const FineCover fc = build_fine_cover(s.m(), s.atlas, s.tol.dedupe_radius);
  const MorsifyResult r = morsify(*s.field, s.m(), s.atlas, fc, s.config.epsilon, s.config.rng_seed, s.tol);
  const bool morse = std::none_of(r.trace.final_critical_points.begin(), r.trace.final_critical_points.end(),
                                  [](const CriticalPoint& cp) { return cp.degenerate; });
  const int status = morse && r.trace.total_c2 < s.config.epsilon ? kExitOk : kExitVerificationFailed;
  if (s.config.format == Format::kCsv) {
    Csv csv;
    csv.text << "chart,coefficients,delta_budget,K,coefficient_bound,draws,c2_spent,gluing_residual\n";
    for (const auto& st : r.trace.steps) {
      csv.row(st.chart_index, join_vec(st.coefficients, " "), st.delta_budget, st.k_bound, st.coefficient_bound,
              st.draws, st.c2_spent, st.gluing_residual);
    }
    return {csv.text.str(), status};
  }
  Json out = header(s);
  out["input_field"] = s.field->to_string();
  out["output_field"] = r.g.to_string();
  out["morse"] = morse;
  out["trace"] = to_json(r.trace);
  return {out.dump(2) + "\n", status};
}

Outcome sard_command(const Session& s) {
  const auto table = sard_table(*s.field, s.m(), s.atlas, kSardGrids, s.tol);
  if (s.config.format == Format::kCsv) {
    Csv csv;
    csv.text << "value_grid,chart,occupied,total_cells,fraction,gamma_points\n";
    for (const auto& row : table) {
      for (const auto& c : row.charts) {
        csv.row(c.value_grid, c.chart, c.occupied, c.total_cells, c.fraction, c.gamma_points);
      }
    }
    return {csv.text.str()};
  }
  Json out = header(s);
  out["field"] = s.field->to_string();
  out["table"] = to_json(table);
  return {out.dump(2) + "\n"};
}

struct Check {
  std::string name;
  std::string status;  // pass, fail, skip
  std::string detail;
};

// Runs one check body; a thrown module error is a failure, not a crash.
template <typename Fn>
void check(std::vector<Check>& checks, const std::string& name, Fn&& fn) {
  try {
    auto [ok, detail] = fn();
    checks.push_back({name, ok ? "pass" : "fail", detail});
  } catch (const Error& e) {
    checks.push_back({name, "fail", "error[" + std::string(error_code_name(e.code())) + "]: " + e.what()});
  }
}

Outcome verify(const Session& s) {
  std::vector<Check> checks;
  const ImplicitManifold& m = s.m();
  const ScalarField& f = *s.field;
  std::optional<Parametrization> oracle;
  if (!s.def->oracle.empty()) oracle = parse_parametrization(s.def->oracle);
  const int resolution = m.intrinsic_dim() == 1 ? 100000 : 400;

  checks.push_back({"cover", "pass", std::to_string(s.atlas.num_samples()) + " samples covered"});
  std::optional<FineCover> fc;
  check(checks, "shrink", [&] {
    fc = build_fine_cover(m, s.atlas, s.tol.dedupe_radius);
    return std::pair{true, std::string("shrunken cover covers every sample; closures nest under dilation")};
  });

  const CriticalSearch search = find_critical_points(f, m, s.atlas, s.tol);
  if (oracle) {
    check(checks, "oracle-agreement", [&] {
      const AgreementReport rep = agreement(search.points, oracle_critical_census(*oracle, f, resolution),
                                            s.tol.match_radius);
      return std::pair{rep.ok(), std::to_string(rep.matched) + " matched, " +
                                     std::to_string(rep.discrepancies.size()) + " discrepancies"};
    });
  } else {
    checks.push_back({"oracle-agreement", "skip", "no oracle for this manifold"});
  }
  if (s.def->euler_characteristic) {
    check(checks, "euler", [&] {
      const int chi = euler_check(search.points);
      return std::pair{chi == *s.def->euler_characteristic,
                       "sum (-1)^index = " + std::to_string(chi) + ", expected " +
                           std::to_string(*s.def->euler_characteristic)};
    });
  } else {
    checks.push_back({"euler", "skip", "no stored Euler characteristic"});
  }

  const bool morse = std::none_of(search.points.begin(), search.points.end(),
                                  [](const CriticalPoint& cp) { return cp.degenerate; });
  if (fc && morse) {
    check(checks, "openness", [&] {
      const double eps = openness_radius(f, m, s.atlas, *fc, {}, s.tol).epsilon;
      return std::pair{eps > 0.0, "radius " + format_real(eps)};
    });
  } else {
    checks.push_back({"openness", "skip", fc ? "field is not Morse" : "no shrunken cover"});
  }

  if (fc) {
    std::optional<MorsifyResult> r;
    check(checks, "morsify", [&] {
      r = morsify(f, m, s.atlas, *fc, s.config.epsilon, s.config.rng_seed, s.tol);
      const bool clean = std::none_of(r->trace.final_critical_points.begin(), r->trace.final_critical_points.end(),
                                      [](const CriticalPoint& cp) { return cp.degenerate; });
      return std::pair{clean, std::to_string(r->trace.final_critical_points.size()) + " critical points, total_c2 " +
                                  format_real(r->trace.total_c2)};
    });
    if (r) {
      const MorsifyTrace& t = r->trace;
      check(checks, "budget-ledger", [&] {
        bool ok = t.total_c2 < t.epsilon_requested;
        for (const auto& st : t.steps) ok = ok && st.c2_spent < t.epsilon_prime && st.c2_spent < st.delta_budget;
        return std::pair{ok, "total " + format_real(t.total_c2) + " < " + format_real(t.epsilon_requested)};
      });
      check(checks, "gluing", [&] {
        double worst = 0.0;
        for (const auto& st : t.steps) worst = std::max(worst, st.gluing_residual);
        return std::pair{worst <= 1e-10, "max residual " + format_real(worst)};
      });
      check(checks, "replay", [&] {
        const ScalarField g = ScalarField::parse(r->g.to_string(), m.ambient_dim());
        const MorseReport rep = is_morse(g, m, s.atlas, s.tol);
        bool ok = rep.critical_points.size() == t.final_margins.size();
        double worst = 0.0;
        for (std::size_t i = 0; ok && i < t.final_margins.size(); ++i) {
          worst = std::max(worst, std::abs(rep.critical_points[i].margin - t.final_margins[i]));
        }
        return std::pair{ok && worst <= 1e-9, "margin drift " + format_real(worst)};
      });
      if (oracle) {
        check(checks, "morsify-oracle-agreement", [&] {
          const AgreementReport rep = agreement(t.final_critical_points,
                                                oracle_critical_census(*oracle, r->g, resolution), s.tol.match_radius);
          return std::pair{rep.ok(), std::to_string(rep.matched) + " matched, " +
                                         std::to_string(rep.discrepancies.size()) + " discrepancies"};
        });
      }
    }
  }

  check(checks, "sard-monotone", [&] {
    const auto table = sard_table(f, m, s.atlas, kSardGrids, s.tol);
    bool ok = true;
    for (std::size_t i = 1; i < table.size(); ++i) ok = ok && table[i].max_fraction <= table[i - 1].max_fraction;
    return std::pair{ok, "fraction at " + std::to_string(table.back().value_grid) + ": " +
                             format_real(table.back().max_fraction)};
  });

  const bool passed = std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == "fail"; });
  const int status = passed ? kExitOk : kExitVerificationFailed;
  if (s.config.format == Format::kCsv) {
    Csv csv;
    csv.text << "check,status,detail\n";
    for (const auto& c : checks) csv.row(c.name, c.status, c.detail);
    return {csv.text.str(), status};
  }
  Json out = header(s);
  out["field"] = f.to_string();
  out["passed"] = passed;
  Json rows = Json::array();
  for (const auto& c : checks) rows.push_back(Json{{"check", c.name}, {"status", c.status}, {"detail", c.detail}});
  out["checks"] = std::move(rows);
  return {out.dump(2) + "\n", status};
}

bool is_input_error(ErrorCode code) {
  return code == ErrorCode::kParseError || code == ErrorCode::kInvalidArgument;
}

void emit(const RunConfig& c, const std::string& body, std::ostream& out) {
  std::string path = c.output;
  if (path.empty()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) {
      path = (std::filesystem::path(dir) / (command_name(c.command) + (c.format == Format::kJson ? ".json" : ".csv")))
                 .string();
    }
  }
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write report to '" + path + "'");
  f << body;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    Session s;
    s.config = config;
    apply_overrides(s.tol, config.tolerance_overrides);
    if (config.manifold_file.empty()) throw Error(ErrorCode::kInvalidArgument, "--manifold is required");
    if (config.command == Command::kMorsify && !(config.epsilon > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "--epsilon must be positive");
    }
    s.def = load_manifold_definition(config.manifold_file);
    if (s.config.grid_density == 0) s.config.grid_density = s.m().intrinsic_dim() == 1 ? 64 : 24;
    if (s.config.grid_density < 2) throw Error(ErrorCode::kInvalidArgument, "--grid must be at least 2");
    if (config.command != Command::kCover || !config.field_expression.empty()) {
      s.field = parse_field(config.field_expression, s.m().ambient_dim());
    }
    s.samples = sample_points(s.m(), s.config.grid_density);
    s.atlas = build_cover(s.m(), s.samples, s.tol.membership_threshold);

    Outcome result;
    switch (config.command) {
      case Command::kAnalyze: result = analyze(s); break;
      case Command::kMorsify: result = morsify_command(s); break;
      case Command::kCover: result = cover(s); break;
      case Command::kVerify: result = verify(s); break;
      case Command::kSard: result = sard_command(s); break;
    }
    emit(config, result.body, out);
    return result.status;
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInputError : kExitVerificationFailed;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chart decomposition, critical points and Morsification of implicit manifolds"};
  app.require_subcommand(1);
  RunConfig config;
  std::string format = "json";
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifold", config.manifold_file, "manifold definition file")->required();
    sub->add_option("--field", config.field_expression, "field expression over x1..xn");
    sub->add_option("--epsilon", config.epsilon, "C^2 budget for morsify")->capture_default_str();
    sub->add_option("--seed", config.rng_seed, "random seed")->capture_default_str();
    sub->add_option("--grid", config.grid_density, "sampling lattice points per axis (default 64 for curves, 24 otherwise)");
    sub->add_option("--out", config.output, "report path (default $MORSEKIT_OUT_DIR/<command>.<ext>, else stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--tolerance-overrides", overrides, "key=value tolerance overrides");
  };
  const std::vector<std::pair<Command, std::string>> commands = {
      {Command::kAnalyze, "find and classify critical points"},
      {Command::kMorsify, "perturb the field into a Morse function"},
      {Command::kCover, "report the chart atlas and the shrunken cover"},
      {Command::kVerify, "run the invariant checks"},
      {Command::kSard, "critical-value occupancy table"},
  };
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(command_name(cmd), help);
    add_common(sub);
    sub->callback([&config, cmd = cmd] { config.command = cmd; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[InvalidArgument]: " << e.what() << "\n";
    return kExitInputError;
  }
  config.format = format == "csv" ? Format::kCsv : Format::kJson;
  for (const auto& item : overrides) {
    std::stringstream in(item);
    std::string kv;
    while (std::getline(in, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        err << "error[InvalidArgument]: tolerance override '" << kv << "' is not key=value\n";
        return kExitInputError;
      }
      config.tolerance_overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return run(config, out, err);
}

}  // namespace morsekit::cli
