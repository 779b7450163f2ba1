#include "dtbh/procedures.hpp"

#include <algorithm>
#include <numeric>

namespace dtbh {

namespace {

void check_level(double level, const char* what) {
  if (!(level > 0.0) || level >= 1.0) {
    throw ConfigError(std::string(what) + ": level must lie in (0, 1)");
  }
}

}  // namespace

SelectionResult bh_select(const PValueVector& pv, double gamma) {
  check_level(gamma, "step-up selection");
  if (pv.values.size() != pv.sensor_ids.size()) {
    throw ConfigError("step-up selection: values and ids differ in length");
  }
  SelectionResult out;
  const std::size_t m = pv.values.size();
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pv.values[a] != pv.values[b]) return pv.values[a] < pv.values[b];
    return pv.sensor_ids[a] < pv.sensor_ids[b];
  });

  std::size_t crossing = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double level = static_cast<double>(i) * gamma / static_cast<double>(m);
    if (pv.values[order[i - 1]] <= level) crossing = i;
  }
  if (crossing == 0) return out;

  out.cutoff_index = static_cast<int>(crossing);
  out.threshold_level =
      static_cast<double>(crossing) * gamma / static_cast<double>(m);
  out.selected.reserve(crossing);
  for (std::size_t i = 0; i < crossing; ++i) {
    out.selected.push_back(pv.sensor_ids[order[i]]);
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

SelectionResult dtbh_select(const DomainTransform& dt, const PValueVector& pv,
                            double gamma, RandomStream& rng) {
  return bh_select(transform_pvalues(dt, pv, rng), gamma);
}

SelectionResult uncorrected_select(const PValueVector& pv, double level) {
  check_level(level, "uncorrected selection");
  SelectionResult out;
  out.threshold_level = level;
  for (std::size_t i = 0; i < pv.values.size(); ++i) {
    if (pv.values[i] <= level) out.selected.push_back(pv.sensor_ids[i]);
  }
  std::sort(out.selected.begin(), out.selected.end());
  out.cutoff_index = static_cast<int>(out.selected.size());
  return out;
}

SelectionResult bayes_oracle_select(const std::vector<double>& observations,
                                    const std::vector<int>& sensor_ids,
                                    const DensityModel& null_model,
                                    const DensityModel& alt,
                                    double prior_alt) {
  if (observations.size() != sensor_ids.size()) {
    throw ConfigError("oracle selection: observations and ids differ");
  }
  if (!(prior_alt > 0.0) || prior_alt >= 1.0) {
    throw ConfigError("oracle selection: prior must lie in (0, 1)");
  }
  SelectionResult out;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const double y = observations[i];
    const double odds_alt = prior_alt * alt.pdf(Point(y));
    const double odds_null = (1.0 - prior_alt) * null_model.pdf(Point(y));
    if (odds_alt > odds_null) out.selected.push_back(sensor_ids[i]);
  }
  std::sort(out.selected.begin(), out.selected.end());
  out.cutoff_index = static_cast<int>(out.selected.size());
  return out;
}

}  // namespace dtbh
