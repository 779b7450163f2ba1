#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "dtbh/common.hpp"
#include "dtbh/random.hpp"

namespace dtbh {

// Immutable probability density model on R (1-D) or R^2. Models are cheap to
// copy (shared immutable state) and safe to share across threads.
//
// Supported families:
//   gaussian(mean, stddev)      1-D; stddev 0 gives a point mass usable only
//                               for sampling (pdf/cdf refuse).
//   exponential(rate)           1-D on [0, inf).
//   uniform_cube(dim)           uniform on the unit cube, dim in {1, 2}.
//   mixture{(w_i, model_i)}     finite mixture, equal dimensions.
//   radial2d(profile, center)   2-D on the unit square, density proportional
//                               to profile(distance-to-center); the profile is
//                               renormalized by numerical integration over the
//                               square, which handles truncation at the edges.
//   tabulated(values, dim)      piecewise-constant on the unit cube
//                               (dim 1: N cells, dim 2: N x N cells).
//   product(first, second)      2-D model with independent 1-D coordinates.
//   shifted(base, offset)       1-D model of X + offset with X ~ base.
class DensityModel {
 public:
  enum class Kind {
    gaussian,
    exponential,
    uniform_cube,
    mixture,
    radial2d,
    tabulated,
    product,
    shifted,
  };

  // Defaults to a standard normal so containers of models stay usable.
  DensityModel();

  static DensityModel gaussian(double mean, double stddev);
  static DensityModel exponential(double rate);
  static DensityModel uniform_cube(int dimension);
  static DensityModel mixture(
      std::vector<std::pair<double, DensityModel>> components);
  static DensityModel radial2d(std::function<double(double)> profile,
                               Point center = Point(0.5, 0.5));
  static DensityModel tabulated(std::vector<double> cell_values, int dimension);
  static DensityModel product(DensityModel first, DensityModel second);
  static DensityModel shifted(DensityModel base, double offset);

  Kind kind() const;
  int dimension() const;
  bool degenerate() const;  // point mass (zero-spread gaussian)

  double pdf(const Point& x) const;
  double cdf(double x) const;       // 1-D models only
  double quantile(double u) const;  // 1-D inverse CDF, u in (0, 1)
  double sample1(RandomStream& rng) const;  // 1-D convenience
  Point sample(RandomStream& rng) const;
  Interval support(int axis = 0) const;

  // Introspection used by the p-value and transform layers.
  const std::vector<std::pair<double, DensityModel>>& components() const;
  double radial_profile_value(double r) const;  // normalized density at radius
  Point radial_center() const;
  int tabulated_resolution() const;
  const std::vector<double>& tabulated_values() const;

 private:
  struct Impl;
  explicit DensityModel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace dtbh
