#include <doctest.h>

#include <cmath>

#include "morsekit/error.hpp"
#include "morsekit/manifold_file.hpp"
#include "support.hpp"

using namespace morsekit;
using morsekit::testing::v;

TEST_SUITE("manifold") {
  TEST_CASE("constraint values") {
    CHECK(eval_constraints(library::circle(), v({1, 0}))(0) == 0.0);
    CHECK(eval_constraints(library::circle(), v({0, 0}))(0) == -1.0);
    // Torus about the x2 axis: (|x|^2 + 3)^2 - 16 (x1^2 + x3^2) at (3, 0, 0) is 144 - 144.
    CHECK(eval_constraints(library::torus(), v({3, 0, 0}))(0) == 0.0);
    CHECK(eval_constraints(library::torus(), v({0, 0, 1}))(0) == 0.0);
  }

  TEST_CASE("tangent bases") {
    const Mat t1 = tangent_basis(library::circle(), v({1, 0}));
    CHECK(std::abs(t1(0, 0)) < 1e-15);
    CHECK(std::abs(std::abs(t1(1, 0)) - 1) < 1e-15);
    const Mat t2 = tangent_basis(library::circle(), v({0, 1}));
    CHECK(std::abs(std::abs(t2(0, 0)) - 1) < 1e-15);
    const Mat t3 = tangent_basis(library::sphere(), v({0, 0, 1}));
    CHECK((t3.transpose() * t3 - Mat::Identity(2, 2)).norm() < 1e-14);
    CHECK(t3.row(2).norm() < 1e-15);
  }

  TEST_CASE("projector derivative matches finite differences along M") {
    const ImplicitManifold m = library::torus();
    const Vec x = project_to_manifold(m, v({2.5, 0.6, 1.1})).coords;
    const LocalFrame f = local_frame(m, x);
    const Vec dir = f.tangent.col(0);
    const double h = 1e-6;
    const Mat pa = local_frame(m, x + h * dir).projector;
    const Mat pb = local_frame(m, x - h * dir).projector;
    // Off-manifold frames are fine: the ambient formula holds at any regular point.
    CHECK(((pa - pb) / (2 * h) - projector_derivative(f, dir)).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("projection") {
    const PointOnM p = project_to_manifold(library::circle(), v({2, 0}));
    CHECK((p.coords - v({1, 0})).norm() < 1e-12);
    CHECK(p.residual <= 1e-10);
    const PointOnM q = project_to_manifold(library::sphere(), v({0, 0, 3}));
    CHECK((q.coords - v({0, 0, 1})).norm() < 1e-12);
    // The centre of the circle is a critical point of the constraint.
    try {
      project_to_manifold(library::circle(), v({0, 0}));
      FAIL("expected NotRegularPoint");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNotRegularPoint);
    }
  }

  TEST_CASE("sampling") {
    const ImplicitManifold circle = library::circle();
    const auto pts = sample_points(circle, 100);
    CHECK(pts.size() >= 100);
    for (const auto& p : pts) CHECK(std::abs(p.coords.squaredNorm() - 1) <= 1e-10);

    const ImplicitManifold sphere = library::sphere();
    const auto sp = sample_points(sphere, 20);
    const double h = sample_spacing(sphere, 20);
    double closest = 1e9;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      CHECK(sp[i].residual <= sphere.projection_tol());
      for (std::size_t j = i + 1; j < sp.size(); ++j) closest = std::min(closest, (sp[i].coords - sp[j].coords).norm());
    }
    CHECK(closest >= h / 2);

    // A box that misses M yields nothing.
    const ImplicitManifold away(2, 1, circle.constraints(), Box{v({5, 5}), v({6, 6})});
    CHECK(sample_points(away, 30).empty());
  }

  TEST_CASE("sampling is deterministic") {
    const auto a = sample_points(library::torus(), 12);
    const auto b = sample_points(library::torus(), 12);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].coords - b[i].coords).norm() == 0.0);
  }

  TEST_CASE("manifold files") {
    const std::string text =
        "# torus\n"
        "name = torus\n"
        "ambient_dim = 3\n"
        "intrinsic_dim = 2\n"
        "constraint = (x1^2 + x2^2 + x3^2 + 3)^2 - 16*(x1^2 + x3^2)\n"
        "domain = [-3.5, 3.5] x [-1.5, 1.5] x [-3.5, 3.5]\n"
        "oracle = torus(2, 1, 2)\n"
        "euler_characteristic = 0\n";
    const ManifoldDefinition def = parse_manifold_definition(text);
    CHECK(def.manifold.ambient_dim() == 3);
    CHECK(def.manifold.intrinsic_dim() == 2);
    CHECK(def.oracle == "torus(2, 1, 2)");
    CHECK(def.euler_characteristic == 0);
    CHECK(def.manifold.domain().hi(1) == 1.5);

    const std::string canon = format_manifold_definition(def);
    const ManifoldDefinition back = parse_manifold_definition(canon);
    CHECK(format_manifold_definition(back) == canon);
    CHECK(structurally_equal(back.manifold.constraints()[0].expr(), def.manifold.constraints()[0].expr()));

    auto where = [](const std::string& t) {
      try {
        parse_manifold_definition(t);
      } catch (const ParseError& e) {
        return std::pair{e.line(), e.column()};
      }
      return std::pair{0, 0};
    };
    CHECK(where("ambient_dim = 2\nintrinsic_dim = 1\nconstraint = x1 +\ndomain = [0, 1] x [0, 1]\n") == std::pair{3, 18});
    CHECK(where("ambient_dim = two\n") == std::pair{1, 15});
    CHECK(where("colour = red\n") == std::pair{1, 1});
    CHECK(where("ambient_dim = 2\nintrinsic_dim = 1\nconstraint = x1\ndomain = [0, 1] x [0 1]\n").first == 4);
    CHECK(where("ambient_dim = 2\nintrinsic_dim = 1\ndomain = [0, 1] x [0, 1]\n").first != 0);
  }

  TEST_CASE("library data files load") {
    for (const char* name : {"circle", "sphere", "torus"}) {
      const ManifoldDefinition def = load_manifold_definition(std::string(MORSEKIT_DATA_DIR) + "/" + name + ".mf");
      CHECK(def.manifold.name() == name);
      CHECK(def.euler_characteristic.has_value());
    }
    CHECK_THROWS_AS(load_manifold_definition("/nonexistent/file.mf"), Error);
  }
}
