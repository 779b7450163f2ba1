#pragma once

#include <vector>

#include "dtbh/distributions.hpp"
#include "dtbh/pvalues.hpp"

namespace dtbh {

// Level-set geometry of a density over the unit cube, discretized on a cell
// grid. For a level y, alpha(y) is the Lebesgue measure of {f >= y} and
// beta(y) the probability mass of the same set; both are non-increasing in y.
struct LevelSetProfile {
  int dim = 1;
  int resolution = 0;        // cells per axis
  double cell_measure = 0.0;

  std::vector<double> cell_values;    // density at cell midpoints, natural order
  std::vector<double> sorted_values;  // the same values, descending

  double y_max = 0.0;      // largest cell value
  double alpha_pos = 0.0;  // measure of the region with positive density

  // A flat stretch of the density of non-negligible measure. The measure map
  // jumps over (alpha_lo, alpha_hi) there, and the mass map over
  // (beta_lo, beta_hi).
  struct Plateau {
    double level = 0.0;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    double beta_lo = 0.0;
    double beta_hi = 0.0;
  };
  std::vector<Plateau> plateaus;

  // Interpolation grid: strictly decreasing levels with their alpha/beta.
  std::vector<double> levels;
  std::vector<double> alpha;
  std::vector<double> beta;

  double alpha_at(double y) const;
  double beta_at(double y) const;
};

// Discretizes f1 (defined over the unit interval or unit square) at the given
// per-axis resolution; 0 picks the default (4096 cells in 1-D, 512x512 in
// 2-D, or the model's own grid for piecewise-constant models).
LevelSetProfile build_profile(const DensityModel& f1, int resolution = 0);

// Decreasing rearrangement of the density and its running integral: a
// piecewise-constant function on [0, 1] with `fhat[k]` on
// (breakpoints[k], breakpoints[k+1]] and `cdf` its integral at breakpoints.
struct TransformTable {
  std::vector<double> breakpoints;  // ascending; front() == 0, back() == 1
  std::vector<double> fhat;         // size breakpoints.size() - 1
  std::vector<double> cdf;          // size breakpoints.size(); cdf.back() == 1

  double value_at(double t) const;
  double cdf_at(double t) const;
  double cdf_inverse(double q) const;
};

TransformTable build_transform(const LevelSetProfile& profile);

// The full package needed to remap values: the alternative-density model, its
// level-set geometry, and the rearrangement table.
struct DomainTransform {
  DensityModel f1;
  LevelSetProfile profile;
  TransformTable table;
};

DomainTransform build_domain_transform(const DensityModel& f1,
                                       int resolution = 0);

// The measure-preserving remap: a uniform draw over the domain maps to
// U(0, 1), while a draw from f1 maps to a value whose density is the
// decreasing rearrangement table.fhat. On flat stretches of f1 the image is
// an interval, resolved by a conditionally uniform draw from `rng`.
double apply_transform(const DomainTransform& dt, const Point& x,
                       RandomStream& rng);

// Remaps a batch of 1-D p-values (sensor ids carried through).
PValueVector transform_pvalues(const DomainTransform& dt,
                               const PValueVector& pv, RandomStream& rng);

// Remaps a batch of 2-D points.
std::vector<double> transform_points(const DomainTransform& dt,
                                     const std::vector<Point>& xs,
                                     RandomStream& rng);

// Exact CDF of the remapped value when the input follows `model` (a 1-D
// piecewise-constant-friendly model on [0, 1]) rather than the uniform null.
// Evaluated at each entry of `grid`; requires a piecewise-constant f1.
std::vector<double> pushforward_cdf(const DomainTransform& dt,
                                    const DensityModel& model,
                                    const std::vector<double>& grid);

}  // namespace dtbh
