#pragma once

#include "morsekit/manifold.hpp"

namespace morsekit::library {

/// Unit circle x1^2 + x2^2 = 1 in [-1.5, 1.5]^2.
ImplicitManifold circle();

/// Unit sphere in [-1.5, 1.5]^3.
ImplicitManifold sphere();

/// Torus of revolution with tube radius r about a circle of radius R, written
/// as the quartic (|x|^2 + R^2 - r^2)^2 - 4 R^2 (|x|^2 - x_axis^2) so that no
/// square roots appear. `axis` is 0, 1 or 2 for the x, y or z axis.
///
/// With axis = 1 (the default) the height x3 has exactly four critical
/// points, at x3 = -3, -1, 1, 3 for R = 2, r = 1.
ImplicitManifold torus(double major_radius = 2.0, double minor_radius = 1.0, int axis = 1);

}  // namespace morsekit::library
