#include "dtbh/snet.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dtbh/common.hpp"

namespace dtbh {

void Scenario::validate() const {
  if (grid_width < 1 || grid_height < 1) {
    throw ConfigError("scenario: grid dimensions must be at least 1x1");
  }
  if (num_objects < 0) {
    throw ConfigError("scenario: num_objects must be non-negative");
  }
  if (!(r_eff > 0.0)) {
    throw ConfigError("scenario: r_eff must be positive");
  }
  if (!(theta > 0.0)) {
    throw ConfigError("scenario: theta must be positive");
  }
  if (!(decay_exp > 0.0)) {
    throw ConfigError("scenario: decay_exp must be positive");
  }
  if (d0 && !(*d0 >= 0.0)) {
    throw ConfigError("scenario: interference cutoff must be non-negative");
  }
  if (!(nonideal_xi_range.lo <= nonideal_xi_range.hi) ||
      !(nonideal_theta_range.lo <= nonideal_theta_range.hi)) {
    throw ConfigError("scenario: perturbation ranges must be ordered lo <= hi");
  }
  if (object_positions) {
    if (static_cast<int>(object_positions->size()) != num_objects) {
      throw ConfigError(
          "scenario: explicit object list length must equal num_objects");
    }
    for (const Point& p : *object_positions) {
      if (p.dim != 2) {
        throw ConfigError("scenario: object positions must be 2-D points");
      }
      if (p.x() < 0.0 || p.x() > static_cast<double>(grid_width - 1) ||
          p.y() < 0.0 || p.y() > static_cast<double>(grid_height - 1)) {
        throw ConfigError("scenario: object position outside the sensor hull");
      }
    }
  }
}

int FieldRealization::m1() const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), true));
}

std::vector<Point> sensor_positions(const Scenario& sc) {
  sc.validate();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(sc.sensor_count()));
  for (int y = 0; y < sc.grid_height; ++y) {
    for (int x = 0; x < sc.grid_width; ++x) {
      out.emplace_back(static_cast<double>(x), static_cast<double>(y));
    }
  }
  return out;
}

std::vector<Point> place_objects(const Scenario& sc, RandomStream& rng) {
  sc.validate();
  if (sc.object_positions) {
    return *sc.object_positions;
  }
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(sc.num_objects));
  for (int k = 0; k < sc.num_objects; ++k) {
    const double x = rng.uniform(0.0, static_cast<double>(sc.grid_width - 1));
    const double y = rng.uniform(0.0, static_cast<double>(sc.grid_height - 1));
    out.emplace_back(x, y);
  }
  return out;
}

namespace {

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

}  // namespace

std::vector<bool> ground_truth(const Scenario& sc,
                               const std::vector<Point>& sensors,
                               const std::vector<Point>& objects) {
  std::vector<bool> labels(sensors.size(), false);
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    for (const Point& t : objects) {
      if (distance(sensors[i], t) <= sc.r_eff) {
        labels[i] = true;
        break;
      }
    }
  }
  return labels;
}

double received_power(double dist, double theta, double decay_exp) {
  return theta / std::pow(dist + 1.0, decay_exp);
}

FieldRealization sample_field(const Scenario& sc, RandomStream& rng) {
  sc.validate();
  FieldRealization field;
  field.sensor_positions = sensor_positions(sc);
  field.objects = place_objects(sc, rng);
  field.labels = ground_truth(sc, field.sensor_positions, field.objects);
  const std::size_t m = field.sensor_positions.size();
  field.observations.resize(m);

  auto noise = [&](bool alternative) {
    return alternative ? sc.alt_noise.sample1(rng) : sc.null_noise.sample1(rng);
  };

  switch (sc.sensing) {
    case SensingMode::ideal: {
      for (std::size_t i = 0; i < m; ++i) {
        field.observations[i] =
            (field.labels[i] ? sc.theta : 0.0) + noise(field.labels[i]);
      }
      break;
    }
    case SensingMode::nonideal: {
      for (std::size_t i = 0; i < m; ++i) {
        const double base =
            field.labels[i]
                ? rng.uniform(sc.nonideal_theta_range.lo,
                              sc.nonideal_theta_range.hi)
                : rng.uniform(sc.nonideal_xi_range.lo, sc.nonideal_xi_range.hi);
        field.observations[i] = base + noise(field.labels[i]);
      }
      break;
    }
    case SensingMode::physics: {
      const double cutoff = sc.interference_cutoff();
      for (std::size_t i = 0; i < m; ++i) {
        // The nearest object carries the signal for an alternative sensor;
        // every other object past the cutoff contributes to the far field.
        std::size_t proximal = field.objects.size();
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < field.objects.size(); ++k) {
          const double d = distance(field.sensor_positions[i], field.objects[k]);
          if (d < nearest) {
            nearest = d;
            proximal = k;
          }
        }
        double obs = noise(field.labels[i]);
        for (std::size_t k = 0; k < field.objects.size(); ++k) {
          const double d = distance(field.sensor_positions[i], field.objects[k]);
          if (field.labels[i] && k == proximal) {
            obs += received_power(d, sc.theta, sc.decay_exp);
          } else if (d > cutoff) {
            obs += received_power(d, sc.theta, sc.decay_exp);
          }
        }
        field.observations[i] = obs;
      }
      break;
    }
  }
  return field;
}

DensityModel assumed_null(const Scenario& sc) { return sc.null_noise; }

DensityModel assumed_alt(const Scenario& sc) {
  return DensityModel::shifted(sc.alt_noise, sc.theta);
}

}  // namespace dtbh
