#pragma once

#include <vector>

#include "dtbh/pvalues.hpp"
#include "dtbh/transform.hpp"

namespace dtbh {

struct SelectionResult {
  std::vector<int> selected;     // declared sensor ids, ascending
  int cutoff_index = 0;          // step-up crossing rank (1-based; 0 = none)
  double threshold_level = 0.0;  // the level the crossing rank was held to
};

// Step-up selection: order the p-values ascending, find the largest rank i
// with p_(i) <= i * gamma / m, and declare the i smallest. Ties are ordered
// by sensor id.
SelectionResult bh_select(const PValueVector& pv, double gamma);

// Step-up selection after remapping the p-values through the domain
// transform. `rng` resolves flat stretches of the transform density.
SelectionResult dtbh_select(const DomainTransform& dt, const PValueVector& pv,
                            double gamma, RandomStream& rng);

// Naive per-sensor test: declare every p-value at or below `level`.
SelectionResult uncorrected_select(const PValueVector& pv, double level);

// Clairvoyant reference: declares sensors whose posterior probability of
// being an alternative exceeds one half, using the true models and the true
// alternative fraction.
SelectionResult bayes_oracle_select(const std::vector<double>& observations,
                                    const std::vector<int>& sensor_ids,
                                    const DensityModel& null_model,
                                    const DensityModel& alt, double prior_alt);

}  // namespace dtbh
