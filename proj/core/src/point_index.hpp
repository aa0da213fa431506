#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "morsekit/linalg.hpp"

namespace morsekit::detail {

// Uniform-grid hash for fixed-radius neighbour queries.
class PointIndex {
 public:
  PointIndex(const std::vector<Vec>& points, double radius) : points_(points), cell_(radius) {
    for (std::size_t i = 0; i < points_.size(); ++i) buckets_[key(cell_of(points_[i]))].push_back(i);
  }

  template <typename Fn>
  void for_each_within(const Vec& x, double radius, Fn&& fn) const {
    const std::vector<std::int64_t> c = cell_of(x);
    std::vector<std::int64_t> probe(c.size());
    const int n = static_cast<int>(c.size());
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      int rest = code;
      for (int i = 0; i < n; ++i) {
        probe[i] = c[i] + (rest % 3) - 1;
        rest /= 3;
      }
      const auto it = buckets_.find(key(probe));
      if (it == buckets_.end()) continue;
      for (std::size_t j : it->second) {
        if ((points_[j] - x).norm() <= radius) fn(j);
      }
    }
  }

 private:
  std::vector<std::int64_t> cell_of(const Vec& x) const {
    std::vector<std::int64_t> c(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) c[i] = static_cast<std::int64_t>(std::floor(x(i) / cell_));
    return c;
  }
  static std::uint64_t key(const std::vector<std::int64_t>& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return h;
  }

  const std::vector<Vec>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// Largest distance from a point to its nearest neighbour (brute force);
// zero for fewer than two points.
inline double max_nearest_gap(const std::vector<Vec>& points) {
  double gap = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i != j) nearest = std::min(nearest, (points[i] - points[j]).norm());
    }
    if (std::isfinite(nearest)) gap = std::max(gap, nearest);
  }
  return gap;
}

}  // namespace morsekit::detail
