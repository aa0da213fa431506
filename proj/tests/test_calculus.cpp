#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "morsekit/calculus.hpp"
#include "morsekit/error.hpp"
#include "support.hpp"

using namespace morsekit;
using morsekit::testing::v;

namespace {

// f o tau by central differences, tau evaluated with the chart solver.
Mat fd_chart_hessian(const ScalarField& f, const ImplicitManifold& m, const Chart& c, const Vec& x, double h) {
  const Vec u0 = c.project(x);
  const int d = c.dim();
  auto F = [&](const Vec& u) { return f.value(solve_parametrization(m, c, u, x).coords); };
  Mat out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Vec pp = u0, pm = u0, mp = u0, mm = u0;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      out(i, j) = (F(pp) - F(pm) - F(mp) + F(mm)) / (4 * h * h);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("calculus") {
  TEST_CASE("projected coordinate fields") {
    const ImplicitManifold m = library::circle();
    const double r = 1 / std::sqrt(2.0);
    CHECK((projected_field(m, v({r, r}), 0) - v({0.5, -0.5})).norm() < 1e-15);
    CHECK((projected_field(m, v({r, r}), 1) - v({-0.5, 0.5})).norm() < 1e-15);
    CHECK((projected_field(m, v({1, 0}), 0)).norm() < 1e-15);
    CHECK((projected_field(m, v({1, 0}), 1) - v({0, 1})).norm() < 1e-15);
  }

  TEST_CASE("chart derivatives of the height on the circle") {
    const ImplicitManifold m = library::circle();
    const ScalarField y = ScalarField::parse("x2", 2);
    const Chart cx = make_chart({0}, 2);
    // y = sqrt(1 - u^2): y' = -u / y, y'' = -1 / y^3.
    CHECK(chart_gradient(y, m, cx, v({0.6, 0.8}))(0) == doctest::Approx(-0.75).epsilon(1e-13));
    CHECK(chart_hessian(y, m, cx, v({0.6, 0.8}))(0, 0) == doctest::Approx(-1 / 0.512).epsilon(1e-12));
    CHECK(chart_hessian(y, m, cx, v({0, 1}))(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(chart_hessian(y, m, cx, v({0, -1}))(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
    try {
      chart_gradient(y, m, cx, v({1, 0}));
      FAIL("expected ChartMembership");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kChartMembership);
    }
  }

  TEST_CASE("chart Hessian at the sphere pole") {
    const ImplicitManifold m = library::sphere();
    const Mat h = chart_hessian(ScalarField::parse("x3", 3), m, make_chart({0, 1}, 3), v({0, 0, 1}));
    CHECK((h + Mat::Identity(2, 2)).norm() < 1e-13);
  }

  TEST_CASE("chart Hessians agree with finite differences of f o tau") {
    const ImplicitManifold m = library::torus();
    const ScalarField f = ScalarField::parse("x1*x2 + exp(0.3*x3) - x1^2*x3", 3);
    const auto& fx = testing::torus();
    for (std::size_t i = 0; i < fx.samples.size(); i += 97) {
      const Vec& x = fx.samples[i].coords;
      const Chart& c = fx.atlas.charts[static_cast<std::size_t>(fx.atlas.assignment[i])];
      const Mat exact = chart_hessian(f, m, c, x);
      const Mat fd = fd_chart_hessian(f, m, c, x, 1e-4);
      CHECK((exact - exact.transpose()).norm() == 0.0);
      CHECK((exact - fd).cwiseAbs().maxCoeff() <= 1e-5 * (1 + exact.cwiseAbs().maxCoeff()));
    }
  }

  TEST_CASE("second-tier derivatives agree with finite differences") {
    const ImplicitManifold m = library::sphere();
    const ScalarField f = ScalarField::parse("x1^2*x2 - x3 + x1*x3^3", 3);
    const Vec x = project_to_manifold(m, v({0.3, -0.5, 0.7})).coords;
    const TierFrame tf = tier_frame(m, x);
    const Tiers t = d_tiers(f, tf);
    CHECK(t.value == f.value(x));
    // D_b phi extended off M by the ambient projector; along tangent
    // directions this extension differentiates like the intrinsic field.
    auto first = [&](const Vec& y) -> Vec { return local_frame(m, y).projector * f.gradient(y); };
    CHECK((first(x) - t.first).norm() < 1e-14);
    const double h = 1e-6;
    for (int a = 0; a < 3; ++a) {
      const Vec va = tf.frame.projector.col(a);
      const Vec fd = (first(x + h * va) - first(x - h * va)) / (2 * h);
      CHECK((fd.transpose() - t.second.row(a)).cwiseAbs().maxCoeff() < 1e-7);
    }
  }

  TEST_CASE("sampled C2 distance") {
    const ImplicitManifold m = library::circle();
    const auto pts = testing::circle_grid(400);
    const ScalarField f = ScalarField::parse("x2", 2);
    const ScalarField g = ScalarField::parse("x2 + 0.01*x1", 2);
    const double d = c2_distance(f, g, m, pts);
    // Tiers of 0.01 x on the unit circle are bounded by 0.01 (value, D_j x
    // entries of P) and 0.01 times the entries of dP, all at most one.
    CHECK(d > 0.005);
    CHECK(d < 0.05);
    CHECK(c2_distance(f, f, m, pts) == 0.0);
    const ScalarField k = ScalarField::parse("x2 - 0.02*x1^2", 2);
    const auto frames = tier_frames(m, pts);
    CHECK(c2_distance(g, k, frames) <= c2_distance(g, f, frames) + c2_distance(f, k, frames) + 1e-15);
    CHECK(c2_distance(f, g, frames) == c2_distance(g, f, frames));
  }

  TEST_CASE("critical census of the height on the circle") {
    const auto& fx = testing::circle();
    const CriticalSearch s = find_critical_points(ScalarField::parse("x2", 2), fx.m, fx.atlas);
    REQUIRE(s.points.size() == 2);
    for (const auto& p : s.points) {
      const bool top = p.location.coords(1) > 0;
      CHECK((p.location.coords - v({0, top ? 1.0 : -1.0})).norm() < 1e-8);
      CHECK(morse_index(p) == (top ? 1 : 0));
      CHECK(p.morse_index == std::optional<int>(top ? 1 : 0));
    }
  }

  TEST_CASE("critical census of the torus height") {
    const auto& fx = testing::torus();
    const CriticalSearch s = find_critical_points(ScalarField::parse("x3", 3), fx.m, fx.atlas);
    REQUIRE(s.points.size() == 4);
    const double heights[] = {-3, -1, 1, 3};
    const int index[] = {0, 1, 1, 2};
    std::vector<CriticalPoint> sorted = s.points;
    std::sort(sorted.begin(), sorted.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.location.coords(2) < b.location.coords(2); });
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(sorted[i].location.coords(2) - heights[i]) < 1e-8);
      CHECK(sorted[i].morse_index == index[i]);
    }
  }

  TEST_CASE("degenerate critical points") {
    const auto& fx = testing::circle();
    // Constant on M: every sample is a degenerate critical point.
    const CriticalSearch flat = find_critical_points(ScalarField::parse("x1^2 + x2^2", 2), fx.m, fx.atlas);
    CHECK(!flat.points.empty());
    for (const auto& p : flat.points) CHECK(p.degenerate);

    const CriticalSearch cube = find_critical_points(ScalarField::parse("x2^3", 2), fx.m, fx.atlas);
    int degenerate = 0;
    for (const auto& p : cube.points) {
      if (p.degenerate) {
        ++degenerate;
        CHECK(std::abs(p.location.coords(1)) < 1e-4);
        CHECK_THROWS_AS(morse_index(p), Error);
        CHECK(!p.morse_index.has_value());
      }
    }
    CHECK(degenerate == 2);
  }
}
