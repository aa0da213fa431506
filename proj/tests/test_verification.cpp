#include <doctest.h>

#include <cmath>

#include "morsekit/error.hpp"
#include "morsekit/verification.hpp"
#include "support.hpp"

using namespace morsekit;
using morsekit::testing::v;

TEST_SUITE("verification") {
  TEST_CASE("parametrizations lie on the library manifolds") {
    struct Case {
      Parametrization p;
      ImplicitManifold m;
    };
    const Case cases[] = {{circle_parametrization(), library::circle()},
                          {sphere_parametrization(), library::sphere()},
                          {torus_parametrization(), library::torus()}};
    for (const auto& c : cases) {
      for (const Patch& patch : c.p.patches) {
        for (int i = 0; i <= 10; ++i) {
          const Vec t = patch.lo + (patch.hi - patch.lo) * (i / 10.0);
          const Embedding e = patch.embed(t, patch.params);
          CHECK(std::abs(eval_constraints(c.m, e.x)(0)) < 1e-12);
          // The parameter derivatives are tangent.
          CHECK((local_frame(c.m, e.x).jacobian * e.jacobian).norm() < 1e-12);
        }
      }
    }
  }

  TEST_CASE("parsing parametrization names") {
    CHECK(parse_parametrization("circle").id == "circle");
    CHECK(parse_parametrization("sphere").patches.size() == 2);
    CHECK(parse_parametrization("torus").id == "torus(2, 1, 2)");
    CHECK(parse_parametrization("torus(2, 1, 2)").id == "torus(2, 1, 2)");
    CHECK(parse_parametrization("torus(3, 0.5, 3)").ambient_dim == 3);
    CHECK_THROWS_AS(parse_parametrization("klein"), Error);
    CHECK_THROWS_AS(parse_parametrization("torus(1, 2, 2)"), Error);  // r >= R self-intersects
    CHECK_THROWS_AS(parse_parametrization("torus(2, 1, 4)"), Error);
  }

  TEST_CASE("oracle census on the circle") {
    const OracleResult r = oracle_critical_census(circle_parametrization(), ScalarField::parse("x2", 2), 10000);
    REQUIRE(r.critical_points.size() == 2);
    for (const auto& p : r.critical_points) {
      const bool top = p.ambient(1) > 0;
      CHECK((p.ambient - v({0, top ? 1.0 : -1.0})).norm() < 1e-9);
      CHECK(p.index == (top ? 1 : 0));
    }
    CHECK(euler_check(r) == 0);
    CHECK_THROWS_AS(oracle_critical_census(circle_parametrization(), ScalarField::parse("x2", 2), 100), Error);
  }

  TEST_CASE("oracle finds double roots") {
    // y^3 has inflection-type critical points at (+-1, 0).
    const OracleResult r = oracle_critical_census(circle_parametrization(), ScalarField::parse("x2^3", 2), 10000);
    int degenerate = 0;
    for (const auto& p : r.critical_points) degenerate += p.degenerate ? 1 : 0;
    CHECK(degenerate == 2);
    CHECK(r.critical_points.size() == 4);
    try {
      euler_check(r);
      FAIL("expected DegeneratePresent");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegeneratePresent);
    }
  }

  TEST_CASE("oracle census on the sphere and torus") {
    const OracleResult s = oracle_critical_census(sphere_parametrization(), ScalarField::parse("x3", 3), 200);
    REQUIRE(s.critical_points.size() == 2);
    CHECK(euler_check(s) == 2);
    const OracleResult t = oracle_critical_census(torus_parametrization(), ScalarField::parse("x3", 3), 200);
    REQUIRE(t.critical_points.size() == 4);
    CHECK(euler_check(t) == 0);
    // A tilted height on the sphere: the poles move to +-(1, 1, 1)/sqrt(3).
    const OracleResult tilt =
        oracle_critical_census(sphere_parametrization(), ScalarField::parse("x1 + x2 + x3", 3), 200);
    REQUIRE(tilt.critical_points.size() == 2);
    const double c = 1 / std::sqrt(3.0);
    for (const auto& p : tilt.critical_points) CHECK((p.ambient.cwiseAbs() - v({c, c, c})).norm() < 1e-9);
  }

  TEST_CASE("agreement between engine and oracle") {
    const auto& fx = testing::torus();
    const ScalarField f = ScalarField::parse("x3", 3);
    const auto engine = find_critical_points(f, fx.m, fx.atlas).points;
    const OracleResult oracle = oracle_critical_census(torus_parametrization(), f, 200);
    const AgreementReport ok = agreement(engine, oracle);
    CHECK(ok.ok());
    CHECK(ok.matched == 4);
    CHECK(ok.max_distance < 1e-6);

    // Negative controls: a different field, a flipped index, a missing point.
    const OracleResult other = oracle_critical_census(torus_parametrization(), ScalarField::parse("x1", 3), 200);
    CHECK(!agreement(engine, other).ok());

    auto flipped = engine;
    flipped[0].morse_index = *flipped[0].morse_index == 0 ? 2 : 0;
    const AgreementReport bad = agreement(flipped, oracle);
    REQUIRE(bad.discrepancies.size() == 1);
    CHECK(bad.discrepancies[0].kind == "index-mismatch");

    auto missing = engine;
    missing.pop_back();
    const AgreementReport short_report = agreement(missing, oracle);
    REQUIRE(short_report.discrepancies.size() == 1);
    CHECK(short_report.discrepancies[0].kind == "unmatched-oracle");
  }

  TEST_CASE("euler check on engine censuses") {
    const auto& fx = testing::sphere();
    const auto pts = find_critical_points(ScalarField::parse("x1", 3), fx.m, fx.atlas).points;
    CHECK(euler_check(pts) == 2);
    const auto flat = find_critical_points(ScalarField::parse("x1^2 + x2^2 + x3^2", 3), fx.m, fx.atlas).points;
    CHECK_THROWS_AS(euler_check(flat), Error);
  }
}
