#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dtbh/distributions.hpp"
#include "dtbh/experiment.hpp"
#include "dtbh/snet.hpp"

namespace dtbh {

// Flat `key = value` configuration with `[section]` headers and `#` comments.
// Keys are stored as "section.key"; entries before any header keep the bare
// key. Later duplicates overwrite earlier ones.
struct ConfigMap {
  std::map<std::string, std::string> entries;

  bool has(const std::string& key) const;
  const std::string& require(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  long long get_long(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Density grammar:
//   gaussian(mean, stddev)           stddev >= 0 (0 = point mass)
//   exponential(rate)                rate > 0
//   uniform(dim)                     dim 1 or 2
//   shifted(spec, offset)
//   mixture(w*spec, w*spec, ...)     weights > 0 and summing to 1
//   radial2d(kind, scale[, cx, cy])  kind gauss | cone | quad
DensityModel parse_density(const std::string& spec);

// Builds a Scenario from the [scenario] section. Recognized keys:
// grid_width, grid_height, num_objects, objects ("x,y; x,y" explicit
// positions), r_eff, theta, decay_exp, d0, null_noise, alt_noise,
// sensing (ideal|nonideal|physics), xi_min, xi_max, theta_min, theta_max,
// seed. Missing keys keep the Scenario defaults; the result is validated.
Scenario scenario_from_config(const ConfigMap& cfg);

// Builds an ExperimentConfig from the [experiment] section (procedure,
// gamma, uncorrected_level, epsilon, k_preset, budget, trials, seed, jobs,
// resolution, out) around the [scenario] section.
ExperimentConfig experiment_from_config(const ConfigMap& cfg);

}  // namespace dtbh
