#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "morsekit/chart.hpp"
#include "morsekit/library.hpp"
#include "morsekit/manifold.hpp"
#include "morsekit/regions.hpp"

namespace morsekit::testing {

// One sampled manifold with its atlas and fine cover, built once per process.
struct Fixture {
  ImplicitManifold m;
  std::vector<PointOnM> samples;
  CoverAtlas atlas;
  FineCover cover;

  Fixture(ImplicitManifold manifold, int grid)
      : m(std::move(manifold)),
        samples(sample_points(m, grid)),
        atlas(build_cover(m, samples)),
        cover(build_fine_cover(m, atlas, 1e-4)) {}
};

inline const Fixture& circle() {
  static const Fixture f(library::circle(), 64);
  return f;
}
inline const Fixture& sphere() {
  static const Fixture f(library::sphere(), 24);
  return f;
}
inline const Fixture& torus() {
  static const Fixture f(library::torus(), 24);
  return f;
}

inline Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

// Exact points (cos t, sin t) at n equally spaced angles.
inline std::vector<Vec> circle_grid(int n) {
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * (i + 0.5) / n;
    out.push_back(v({std::cos(t), std::sin(t)}));
  }
  return out;
}

}  // namespace morsekit::testing
