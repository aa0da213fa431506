#include "morsekit/library.hpp"

#include "morsekit/error.hpp"

namespace morsekit::library {

namespace {

Box cube(int n, double half) {
  return Box{Vec::Constant(n, -half), Vec::Constant(n, half)};
}

}  // namespace

ImplicitManifold circle() {
  ImplicitManifold m(2, 1, {ScalarField::parse("x1^2 + x2^2 - 1", 2)}, cube(2, 1.5));
  m.set_name("circle");
  return m;
}

ImplicitManifold sphere() {
  ImplicitManifold m(3, 2, {ScalarField::parse("x1^2 + x2^2 + x3^2 - 1", 3)}, cube(3, 1.5));
  m.set_name("sphere");
  return m;
}

ImplicitManifold torus(double major_radius, double minor_radius, int axis) {
  if (axis < 0 || axis > 2) throw Error(ErrorCode::kInvalidArgument, "torus axis must be 0, 1 or 2");
  if (!(major_radius > minor_radius && minor_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "torus needs R > r > 0");
  }
  std::vector<Expr> x{Expr::variable(0), Expr::variable(1), Expr::variable(2)};
  const Expr r2 = pow(x[0], 2) + pow(x[1], 2) + pow(x[2], 2);
  Expr planar;
  for (int i = 0; i < 3; ++i) {
    if (i != axis) planar = planar + pow(x[i], 2);
  }
  const double big = major_radius * major_radius;
  const double small = minor_radius * minor_radius;
  const Expr c = pow(r2 + Expr::constant(big - small), 2) - Expr::constant(4.0 * big) * planar;

  Box box{Vec::Constant(3, -(major_radius + minor_radius + 0.5)),
          Vec::Constant(3, major_radius + minor_radius + 0.5)};
  box.lo(axis) = -(minor_radius + 0.5);
  box.hi(axis) = minor_radius + 0.5;
  ImplicitManifold m(3, 2, {ScalarField(c, 3)}, box);
  m.set_name("torus");
  return m;
}

}  // namespace morsekit::library
