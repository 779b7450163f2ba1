#pragma once

#include <vector>

#include "dtbh/distributions.hpp"

namespace dtbh {

// Per-sensor p-values, kept alongside the sensor ids so that subsets
// (e.g. after truncation) stay traceable.
struct PValueVector {
  std::vector<double> values;
  std::vector<int> sensor_ids;

  std::size_t size() const { return values.size(); }
};

// Upper-tail p-value P(Y >= y) under the null model (1-D).
double survival_pvalue(const DensityModel& null_model, double y);

// Survival p-values for a batch of observations; ids are 0..n-1.
PValueVector survival_pvalues(const DensityModel& null_model,
                              const std::vector<double>& observations);

// Two-sided fold of a uniform p-value: |1 - 2p|. Maps U(0,1) to U(0,1) and
// sends both tails (p near 0 and p near 1) to small values.
double fold_transform(double p);

// Maps a 2-D observation to the unit square so that draws from `joint`
// become uniform: u1 is the marginal CDF of the first coordinate, u2 the
// conditional CDF of the second given the first. Closed forms are used for
// independent-coordinate models; otherwise the marginal and the conditional
// slice are integrated numerically.
Point sequential_uniformizer(const DensityModel& joint, const Point& x);

// Density of the survival p-value when the observation follows `alt`
// instead of `null_model`. Returned as a piecewise-constant model on [0, 1]
// whose cell masses are exact: cell j holds the alt-probability that the
// p-value lands in [j/cells, (j+1)/cells).
DensityModel pvalue_density_under_alternative(const DensityModel& null_model,
                                              const DensityModel& alt,
                                              int cells = 4096);

}  // namespace dtbh
