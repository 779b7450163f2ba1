#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dtbh/distributions.hpp"
#include "dtbh/random.hpp"

namespace dtbh {

enum class SensingMode { ideal, nonideal, physics };

// A sensor field: one sensor per pixel of a grid, objects dropped on the
// field, and an observation model. Immutable during simulation.
struct Scenario {
  int grid_width = 100;
  int grid_height = 100;
  int num_objects = 10;
  // Explicit object coordinates; when absent, objects are placed uniformly
  // over the sensor hull [0, W-1] x [0, H-1].
  std::optional<std::vector<Point>> object_positions;
  double r_eff = 2.5;      // effective radius in pixels
  double theta = 2.8;      // object signal amplitude
  double decay_exp = 2.0;  // power-law decay exponent
  std::optional<double> d0;  // interference cutoff; defaults to r_eff
  DensityModel null_noise = DensityModel::gaussian(0.0, 1.0);
  DensityModel alt_noise = DensityModel::gaussian(0.0, 0.05);
  SensingMode sensing = SensingMode::ideal;
  Interval nonideal_xi_range{0.0, 0.1};
  Interval nonideal_theta_range{2.7, 2.8};
  std::uint64_t seed = 0;

  int sensor_count() const { return grid_width * grid_height; }
  double interference_cutoff() const { return d0 ? *d0 : r_eff; }
  void validate() const;
};

struct FieldRealization {
  std::vector<Point> sensor_positions;
  std::vector<bool> labels;  // true = within reach of an object
  std::vector<double> observations;
  std::vector<Point> objects;

  int m1() const;
};

// Sensors at integer pixel coordinates, row-major (y outer, x inner).
std::vector<Point> sensor_positions(const Scenario& sc);

// Object coordinates: the explicit list when provided (validated), otherwise
// uniform over the sensor hull.
std::vector<Point> place_objects(const Scenario& sc, RandomStream& rng);

// A sensor is an alternative when its distance to the nearest object is at
// most r_eff.
std::vector<bool> ground_truth(const Scenario& sc,
                               const std::vector<Point>& sensors,
                               const std::vector<Point>& objects);

// Power-law path gain theta / (d + 1)^decay_exp.
double received_power(double distance, double theta, double decay_exp);

// Draws one field: places objects (unless pinned), labels sensors, then
// samples observations per the sensing mode.
//   ideal     H1: theta + alt-noise          H0: null-noise
//   nonideal  H1: U(theta_range) + alt-noise H0: U(xi_range) + null-noise
//   physics   signal from the nearest object for alternatives, plus the
//             far-field sum over objects beyond the interference cutoff at
//             every sensor, plus the per-label noise
FieldRealization sample_field(const Scenario& sc, RandomStream& rng);

// Observation models the detector assumes when forming p-values: the ideal
// null (pure null noise) and the ideal alternative (theta plus alt noise).
// Under nonideal or physics sensing these are deliberately misspecified.
DensityModel assumed_null(const Scenario& sc);
DensityModel assumed_alt(const Scenario& sc);

}  // namespace dtbh
