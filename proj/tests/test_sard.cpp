#include <doctest.h>

#include "morsekit/error.hpp"
#include "morsekit/sard.hpp"
#include "support.hpp"

using namespace morsekit;

TEST_SUITE("sard") {
  TEST_CASE("a function without degenerate points has no critical values") {
    const auto& fx = testing::circle();
    // y over the x chart is sqrt(1 - u^2): the second derivative never vanishes.
    const SardEstimate e = sard_measure_estimate(ScalarField::parse("x2", 2), fx.m, fx.atlas, 0, 256);
    CHECK(e.occupied == 0);
    CHECK(e.fraction == 0.0);
    CHECK(e.gamma_points == 0);
    CHECK(e.total_cells == 256.0);
  }

  TEST_CASE("a linear chart coordinate occupies exactly one cell") {
    const auto& fx = testing::circle();
    // x over the x chart is u itself: every point is degenerate and H = 1.
    for (int grid : {64, 256}) {
      const SardEstimate e = sard_measure_estimate(ScalarField::parse("x1", 2), fx.m, fx.atlas, 0, grid);
      CHECK(e.occupied == 1);
      CHECK(e.fraction == doctest::Approx(1.0 / grid));
      CHECK(e.gamma_points > 0);
      CHECK(e.range_lo(0) == doctest::Approx(e.range_hi(0) - 1.0));
    }
  }

  TEST_CASE("occupancy of the cube of the height shrinks with the grid") {
    const auto& fx = testing::circle();
    const auto table = sard_table(ScalarField::parse("x2^3", 2), fx.m, fx.atlas, {64, 128, 256, 512, 1024});
    REQUIRE(table.size() == 5);
    double prev = 1.0;
    for (const auto& row : table) {
      CHECK(row.charts.size() == 2);
      CHECK(row.max_fraction <= prev);
      CHECK(row.max_fraction > 0.0);  // the two degenerate points are found
      prev = row.max_fraction;
    }
    CHECK(table.back().max_fraction <= 0.05);
  }

  TEST_CASE("bad grids are rejected") {
    const auto& fx = testing::circle();
    CHECK_THROWS_AS(sard_measure_estimate(ScalarField::parse("x2", 2), fx.m, fx.atlas, 0, 0), Error);
    CHECK_THROWS_AS(sard_measure_estimate(ScalarField::parse("x2", 2), fx.m, fx.atlas, 5, 64), Error);
  }
}
