#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace morsekit::cli;

namespace {

std::string data(const std::string& name) { return std::string(MORSEKIT_DATA_DIR) + "/" + name + ".mf"; }

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(const RunConfig& c) {
  std::ostringstream out, err;
  const int status = run(c, out, err);
  return {status, out.str(), err.str()};
}

Outcome invoke(std::vector<const char*> argv) {
  argv.insert(argv.begin(), "morsekit");
  std::ostringstream out, err;
  const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

// The environment variable would redirect reports away from the stream.
struct NoOutDir {
  NoOutDir() { unsetenv("MORSEKIT_OUT_DIR"); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("analyze the circle") {
    NoOutDir guard;
    RunConfig c;
    c.command = Command::kAnalyze;
    c.manifold_file = data("circle");
    c.field_expression = "x2";
    const Outcome o = invoke(c);
    REQUIRE(o.status == kExitOk);
    CHECK(o.err.empty());
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["morse"] == true);
    CHECK(j["euler_characteristic"] == 0);
    CHECK(j["critical_points"].size() == 2);
    CHECK(j["config"]["field"] == "x2");
  }

  TEST_CASE("morsify the cube of the height") {
    NoOutDir guard;
    const Outcome o = invoke({"morsify", "--manifold", data("circle").c_str(), "--field", "x2^3", "--epsilon", "0.01"});
    REQUIRE(o.status == kExitOk);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["morse"] == true);
    CHECK(j["trace"]["total_c2"].get<double>() < 0.01);
  }

  TEST_CASE("input errors exit 2") {
    NoOutDir guard;
    const Outcome bad_field = invoke({"analyze", "--manifold", data("circle").c_str(), "--field", "x1 +"});
    CHECK(bad_field.status == kExitInputError);
    CHECK(bad_field.err.rfind("error[ParseError]", 0) == 0);

    const Outcome missing = invoke({"analyze", "--manifold", "/nonexistent.mf", "--field", "x1"});
    CHECK(missing.status == kExitInputError);

    const Outcome unknown_key =
        invoke({"analyze", "--manifold", data("circle").c_str(), "--field", "x1", "--tolerance-overrides", "nope=1"});
    CHECK(unknown_key.status == kExitInputError);
    CHECK(unknown_key.err.find("InvalidArgument") != std::string::npos);

    const Outcome no_command = invoke(std::vector<const char*>{});
    CHECK(no_command.status == kExitInputError);

    const Outcome bad_format = invoke({"analyze", "--manifold", data("circle").c_str(), "--format", "xml"});
    CHECK(bad_format.status == kExitInputError);
  }

  TEST_CASE("tolerance overrides are applied and reported") {
    NoOutDir guard;
    const Outcome o = invoke({"analyze", "--manifold", data("circle").c_str(), "--field", "x2",
                              "--tolerance-overrides", "degenerate_tol=1e-5,max_draws=10"});
    REQUIRE(o.status == kExitOk);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["config"]["tolerances"]["degenerate_tol"].get<double>() == 1e-5);
    CHECK(j["config"]["tolerances"]["max_draws"] == 10);
  }

  TEST_CASE("reports are byte-identical across runs") {
    NoOutDir guard;
    RunConfig c;
    c.command = Command::kMorsify;
    c.manifold_file = data("circle");
    c.field_expression = "x2^3";
    c.rng_seed = 9;
    const Outcome a = invoke(c);
    const Outcome b = invoke(c);
    CHECK(a.status == kExitOk);
    CHECK(a.out == b.out);
  }

  TEST_CASE("csv output") {
    NoOutDir guard;
    RunConfig c;
    c.command = Command::kAnalyze;
    c.manifold_file = data("circle");
    c.field_expression = "x2";
    c.format = Format::kCsv;
    const Outcome o = invoke(c);
    REQUIRE(o.status == kExitOk);
    std::istringstream lines(o.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header.find(',') != std::string::npos);
    int rows = 0;
    while (std::getline(lines, row)) rows += row.empty() ? 0 : 1;
    CHECK(rows == 2);
  }

  TEST_CASE("output directory from the environment") {
    const auto dir = std::filesystem::temp_directory_path() / "morsekit_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    setenv("MORSEKIT_OUT_DIR", dir.c_str(), 1);
    RunConfig c;
    c.command = Command::kSard;
    c.manifold_file = data("circle");
    c.field_expression = "x2^3";
    const Outcome o = invoke(c);
    unsetenv("MORSEKIT_OUT_DIR");
    CHECK(o.status == kExitOk);
    CHECK(o.out.empty());
    std::ifstream in(dir / "sard.json");
    REQUIRE(in.good());
    const auto j = nlohmann::json::parse(in);
    CHECK(j["table"].size() == 5);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("verify passes on the sphere") {
    NoOutDir guard;
    RunConfig c;
    c.command = Command::kVerify;
    c.manifold_file = data("sphere");
    c.field_expression = "x3";
    c.epsilon = 0.05;
    const Outcome o = invoke(c);
    CHECK(o.status == kExitOk);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["passed"] == true);
  }
}
