#pragma once

#include <vector>

#include "morsekit/chart.hpp"
#include "morsekit/options.hpp"
#include "morsekit/scalar_field.hpp"

namespace morsekit {

/// Cell occupancy of the critical values of the gradient map H on one chart.
struct SardEstimate {
  int chart = 0;
  int value_grid = 0;
  long long occupied = 0;
  double total_cells = 0.0;  // value_grid^d
  double fraction = 0.0;
  int gamma_points = 0;      // points where |det Hess| is (numerically) zero
  Vec range_lo;              // bounding box of H over the chart's samples
  Vec range_hi;
};

/// The chart's samples are those assigned to it. Points of the degenerate
/// set are the samples with |det| < degenerate_tol plus the roots of det
/// found by bisection along segments between neighbouring samples whose
/// determinants differ in sign. Zero-width ranges are widened to one unit so
/// a constant map occupies exactly one cell.
SardEstimate sard_measure_estimate(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                   int chart, int value_grid, const Tolerances& tol = {});

struct SardRow {
  int value_grid = 0;
  std::vector<SardEstimate> charts;
  double max_fraction = 0.0;
};

/// One row per grid, every chart.
std::vector<SardRow> sard_table(const ScalarField& f, const ImplicitManifold& m, const CoverAtlas& atlas,
                                const std::vector<int>& value_grids, const Tolerances& tol = {});

}  // namespace morsekit
