#include "dtbh/transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "dtbh/numerics.hpp"

namespace dtbh {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Cells whose midpoint values differ by less than this relative amount are
// treated as one flat stretch of the density.
constexpr double kTieRelTol = 1e-9;

// Flat stretches below this measure are not reported as plateaus (the zero
// region is always reported).
constexpr double kPlateauMinMeasure = 1e-3;

// The discretization must capture the full unit mass up to this slack.
constexpr double kMassTol = 5e-3;

bool same_tie(double hi, double lo) {
  return lo >= hi - kTieRelTol * std::max(std::abs(hi), 1.0e-300) -
                   1.0e-300;
}

// Half-open index ranges [first, second) of tied runs in a descending array.
std::vector<std::pair<std::size_t, std::size_t>> tie_ranges(
    const std::vector<double>& sorted_desc) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted_desc.size(); ++i) {
    if (i == sorted_desc.size() || !same_tie(sorted_desc[start], sorted_desc[i])) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

std::size_t count_greater(const std::vector<double>& sorted_desc, double y) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted_desc.begin(), sorted_desc.end(), y,
                       std::greater<>()) -
      sorted_desc.begin());
}

std::size_t count_at_least(const std::vector<double>& sorted_desc, double y) {
  return static_cast<std::size_t>(
      std::upper_bound(sorted_desc.begin(), sorted_desc.end(), y,
                       std::greater<>()) -
      sorted_desc.begin());
}

int cell_index_1d(double x, int res) {
  return std::clamp(static_cast<int>(x * res), 0, res - 1);
}

std::size_t cell_index(const Point& x, int dim, int res) {
  if (dim == 1) return static_cast<std::size_t>(cell_index_1d(x.x(), res));
  const std::size_t cx = static_cast<std::size_t>(cell_index_1d(x.x(), res));
  const std::size_t cy = static_cast<std::size_t>(cell_index_1d(x.y(), res));
  return cy * static_cast<std::size_t>(res) + cx;
}

double radial_margin(const DensityModel& f1) {
  const Point c = f1.radial_center();
  return std::min(std::min(c.x(), 1.0 - c.x()),
                  std::min(c.y(), 1.0 - c.y()));
}

}  // namespace

double LevelSetProfile::alpha_at(double y) const {
  if (y <= 0.0) return 1.0;
  if (y >= levels.front()) return alpha.front();
  if (y <= levels.back()) return alpha.back();
  // levels is strictly decreasing: locate levels[i] >= y > levels[i + 1].
  const auto it = std::lower_bound(levels.begin(), levels.end(), y,
                                   std::greater<>());
  const std::size_t j = static_cast<std::size_t>(it - levels.begin());
  const std::size_t i = j - 1;
  const double frac = (levels[i] - y) / (levels[i] - levels[j]);
  return alpha[i] + frac * (alpha[j] - alpha[i]);
}

double LevelSetProfile::beta_at(double y) const {
  if (y <= 0.0) return beta.empty() ? 1.0 : std::max(beta.back(), 1.0);
  if (y >= levels.front()) return beta.front();
  if (y <= levels.back()) return beta.back();
  const auto it = std::lower_bound(levels.begin(), levels.end(), y,
                                   std::greater<>());
  const std::size_t j = static_cast<std::size_t>(it - levels.begin());
  const std::size_t i = j - 1;
  const double frac = (levels[i] - y) / (levels[i] - levels[j]);
  return beta[i] + frac * (beta[j] - beta[i]);
}

LevelSetProfile build_profile(const DensityModel& f1, int resolution) {
  LevelSetProfile pr;
  pr.dim = f1.dimension();
  if (f1.kind() == DensityModel::Kind::tabulated) {
    // Align with the model's own grid so cell values are exact.
    pr.resolution = f1.tabulated_resolution();
  } else if (resolution > 0) {
    pr.resolution = resolution;
  } else {
    pr.resolution = pr.dim == 1 ? 4096 : 512;
  }
  const int res = pr.resolution;
  const std::size_t n_cells = pr.dim == 1
                                  ? static_cast<std::size_t>(res)
                                  : static_cast<std::size_t>(res) * res;
  pr.cell_measure = pr.dim == 1 ? 1.0 / res : 1.0 / (static_cast<double>(res) * res);

  pr.cell_values.resize(n_cells);
  if (pr.dim == 1) {
    for (int i = 0; i < res; ++i) {
      pr.cell_values[static_cast<std::size_t>(i)] =
          f1.pdf(Point((i + 0.5) / res));
    }
  } else {
    for (int iy = 0; iy < res; ++iy) {
      for (int ix = 0; ix < res; ++ix) {
        pr.cell_values[static_cast<std::size_t>(iy) * res + ix] =
            f1.pdf(Point((ix + 0.5) / res, (iy + 0.5) / res));
      }
    }
  }

  double mass = 0.0;
  for (double v : pr.cell_values) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw NumericError("profile: density must be finite and non-negative");
    }
    mass += v;
  }
  mass *= pr.cell_measure;
  if (std::abs(mass - 1.0) > kMassTol) {
    throw NumericError(
        "profile: density mass over the unit cube is not 1; the model must "
        "live on the unit interval or unit square");
  }

  pr.sorted_values = pr.cell_values;
  std::sort(pr.sorted_values.begin(), pr.sorted_values.end(),
            std::greater<>());
  pr.y_max = pr.sorted_values.front();
  if (!(pr.y_max > 0.0)) throw NumericError("profile: density is all zero");

  std::vector<double> prefix(n_cells + 1, 0.0);
  for (std::size_t i = 0; i < n_cells; ++i) {
    prefix[i + 1] = prefix[i] + pr.sorted_values[i];
  }
  pr.alpha_pos =
      pr.cell_measure * static_cast<double>(count_greater(pr.sorted_values, 0.0));

  // Flat stretches and their image intervals.
  const auto groups = tie_ranges(pr.sorted_values);
  for (const auto& [s, e] : groups) {
    const double measure = pr.cell_measure * static_cast<double>(e - s);
    const bool zero_group = pr.sorted_values[s] <= 0.0;
    if (measure >= kPlateauMinMeasure || zero_group) {
      LevelSetProfile::Plateau pl;
      pl.level = zero_group ? 0.0 : pr.sorted_values[s];
      pl.alpha_lo = pr.cell_measure * static_cast<double>(s);
      pl.alpha_hi = zero_group ? 1.0 : pr.cell_measure * static_cast<double>(e);
      pl.beta_lo = pr.cell_measure * prefix[s];
      pl.beta_hi = pr.cell_measure * prefix[e];
      pr.plateaus.push_back(pl);
    }
  }

  // Level grid: all distinct values (thinned if very many), a linear sweep,
  // and a logarithmic sweep covering seven decades below the peak.
  std::vector<double> lv;
  {
    std::vector<std::size_t> starts;
    for (const auto& [s, e] : groups) {
      if (pr.sorted_values[s] > 0.0) starts.push_back(s);
    }
    const std::size_t max_rank_levels = 4096;
    if (starts.size() <= max_rank_levels) {
      for (std::size_t s : starts) lv.push_back(pr.sorted_values[s]);
    } else {
      for (std::size_t k = 0; k < max_rank_levels; ++k) {
        const std::size_t idx =
            k * (starts.size() - 1) / (max_rank_levels - 1);
        lv.push_back(pr.sorted_values[starts[idx]]);
      }
    }
    const int sweep = 2048;
    for (int k = 1; k <= sweep; ++k) {
      lv.push_back(pr.y_max * k / sweep);
      lv.push_back(pr.y_max *
                   std::exp(std::log(1e-7) * static_cast<double>(k) / sweep));
    }
  }
  std::sort(lv.begin(), lv.end(), std::greater<>());
  std::vector<double> dedup;
  for (double y : lv) {
    if (dedup.empty() || dedup.back() - y > 1e-12 * pr.y_max) {
      dedup.push_back(y);
    }
  }
  pr.levels = std::move(dedup);
  pr.alpha.resize(pr.levels.size());
  pr.beta.resize(pr.levels.size());
  for (std::size_t i = 0; i < pr.levels.size(); ++i) {
    const std::size_t c = count_at_least(pr.sorted_values, pr.levels[i]);
    pr.alpha[i] = pr.cell_measure * static_cast<double>(c);
    pr.beta[i] = pr.cell_measure * prefix[c];
  }

  // For radial models the level sets inside the inscribed square are disks,
  // so the measures have a closed form; override the grid estimates where it
  // applies and restore monotonicity afterwards.
  if (f1.kind() == DensityModel::Kind::radial2d) {
    const double margin = radial_margin(f1);
    const double peak = f1.radial_profile_value(0.0);
    const double edge = f1.radial_profile_value(margin);
    for (std::size_t i = 0; i < pr.levels.size(); ++i) {
      const double y = pr.levels[i];
      if (y <= edge || y > peak) continue;
      const double r = bisect_decreasing(
          [&](double rr) { return f1.radial_profile_value(rr); }, 0.0, margin,
          y, 1e-13, 200);
      pr.alpha[i] = kPi * r * r;
      pr.beta[i] = 2.0 * kPi *
                   simpson([&](double rr) {
                     return f1.radial_profile_value(rr) * rr;
                   }, 0.0, r, 512);
    }
    for (std::size_t i = 1; i < pr.levels.size(); ++i) {
      pr.alpha[i] = std::max(pr.alpha[i], pr.alpha[i - 1]);
      pr.beta[i] = std::max(pr.beta[i], pr.beta[i - 1]);
    }
  }
  return pr;
}

double TransformTable::value_at(double t) const {
  if (t <= breakpoints.front()) return fhat.front();
  if (t >= breakpoints.back()) return fhat.back();
  const auto it =
      std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
  std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
  if (j == 0) j = 1;
  return fhat[j - 1];
}

double TransformTable::cdf_at(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return cdf.back();
  const auto it =
      std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
  std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
  if (j == 0) j = 1;
  return cdf[j - 1] + fhat[j - 1] * (t - breakpoints[j - 1]);
}

double TransformTable::cdf_inverse(double q) const {
  q = std::clamp(q, 0.0, cdf.back());
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
  std::size_t j = static_cast<std::size_t>(it - cdf.begin());
  if (j == 0) return breakpoints.front();
  if (fhat[j - 1] > 0.0) {
    return breakpoints[j - 1] + (q - cdf[j - 1]) / fhat[j - 1];
  }
  return breakpoints[j];
}

TransformTable build_transform(const LevelSetProfile& profile) {
  TransformTable tb;
  const auto groups = tie_ranges(profile.sorted_values);
  const double w = profile.cell_measure;
  tb.breakpoints.push_back(0.0);
  tb.cdf.push_back(0.0);
  double t = 0.0;
  double mass = 0.0;
  std::vector<double> prefix(profile.sorted_values.size() + 1, 0.0);
  for (std::size_t i = 0; i < profile.sorted_values.size(); ++i) {
    prefix[i + 1] = prefix[i] + profile.sorted_values[i];
  }
  for (const auto& [s, e] : groups) {
    const bool zero_group = profile.sorted_values[s] <= 0.0;
    t = zero_group ? 1.0 : w * static_cast<double>(e);
    mass += w * (prefix[e] - prefix[s]);
    tb.breakpoints.push_back(t);
    tb.fhat.push_back(zero_group ? 0.0 : profile.sorted_values[s]);
    tb.cdf.push_back(mass);
  }
  if (tb.breakpoints.back() < 1.0) {
    tb.breakpoints.push_back(1.0);
    tb.fhat.push_back(0.0);
    tb.cdf.push_back(mass);
  }
  // Normalize the running integral to end exactly at 1.
  const double total = tb.cdf.back();
  if (!(total > 0.0)) throw NumericError("transform: zero total mass");
  for (auto& c : tb.cdf) c /= total;
  for (auto& f : tb.fhat) f /= total;
  tb.cdf.back() = 1.0;
  tb.breakpoints.back() = 1.0;
  return tb;
}

DomainTransform build_domain_transform(const DensityModel& f1,
                                       int resolution) {
  DomainTransform dt;
  dt.f1 = f1;
  dt.profile = build_profile(f1, resolution);
  dt.table = build_transform(dt.profile);
  return dt;
}

double apply_transform(const DomainTransform& dt, const Point& x,
                       RandomStream& rng) {
  const LevelSetProfile& pr = dt.profile;
  if (x.dim != pr.dim) {
    throw ConfigError("transform: point dimension does not match the domain");
  }

  if (dt.f1.kind() == DensityModel::Kind::tabulated) {
    // Exact path: the flat stretch containing the cell maps to its image
    // interval, drawn uniformly. A uniform input is remapped to exactly
    // uniform output.
    const std::size_t c = cell_index(x, pr.dim, pr.resolution);
    const double v = pr.cell_values[c];
    const double a =
        pr.cell_measure * static_cast<double>(count_greater(pr.sorted_values, v));
    const double b = pr.cell_measure *
                     static_cast<double>(count_at_least(pr.sorted_values, v));
    const double hi = v <= 0.0 ? 1.0 : b;
    return a + (hi - a) * rng.uniform();
  }

  const double y = dt.f1.pdf(x);
  if (y <= 0.0) {
    if (pr.alpha_pos >= 1.0) return 1.0;
    return pr.alpha_pos + (1.0 - pr.alpha_pos) * rng.uniform();
  }
  if (dt.f1.kind() == DensityModel::Kind::radial2d) {
    const Point c = dt.f1.radial_center();
    const double dx = x.x() - c.x();
    const double dy = x.y() - c.y();
    const double r = std::sqrt(dx * dx + dy * dy);
    if (r <= radial_margin(dt.f1)) {
      return std::clamp(kPi * r * r, 0.0, 1.0);
    }
  }
  for (const auto& pl : pr.plateaus) {
    if (pl.level <= 0.0) continue;
    if (std::abs(y - pl.level) <=
        kTieRelTol * std::max(std::abs(y), std::abs(pl.level))) {
      return pl.alpha_lo + (pl.alpha_hi - pl.alpha_lo) * rng.uniform();
    }
  }
  return std::clamp(pr.alpha_at(y), 0.0, 1.0);
}

PValueVector transform_pvalues(const DomainTransform& dt,
                               const PValueVector& pv, RandomStream& rng) {
  if (dt.profile.dim != 1) {
    throw ConfigError("transform: p-value remap needs a 1-D domain");
  }
  PValueVector out;
  out.sensor_ids = pv.sensor_ids;
  out.values.reserve(pv.values.size());
  for (double p : pv.values) {
    out.values.push_back(apply_transform(dt, Point(p), rng));
  }
  return out;
}

std::vector<double> transform_points(const DomainTransform& dt,
                                     const std::vector<Point>& xs,
                                     RandomStream& rng) {
  if (dt.profile.dim != 2) {
    throw ConfigError("transform: point remap needs a 2-D domain");
  }
  std::vector<double> out;
  out.reserve(xs.size());
  for (const Point& x : xs) out.push_back(apply_transform(dt, x, rng));
  return out;
}

std::vector<double> pushforward_cdf(const DomainTransform& dt,
                                    const DensityModel& model,
                                    const std::vector<double>& grid) {
  const LevelSetProfile& pr = dt.profile;
  if (dt.f1.kind() != DensityModel::Kind::tabulated || pr.dim != 1) {
    throw ConfigError(
        "pushforward: needs a 1-D piecewise-constant transform density");
  }
  if (model.dimension() != 1) {
    throw ConfigError("pushforward: input model must be 1-D");
  }
  const int res = pr.resolution;
  const double w = pr.cell_measure;
  struct Chunk {
    double mass;
    double a;
    double b;
  };
  std::vector<Chunk> chunks;
  chunks.reserve(static_cast<std::size_t>(res));
  for (int c = 0; c < res; ++c) {
    const double mass = model.cdf((c + 1.0) / res) - model.cdf(c / static_cast<double>(res));
    if (mass <= 0.0) continue;
    const double v = pr.cell_values[static_cast<std::size_t>(c)];
    const double a =
        w * static_cast<double>(count_greater(pr.sorted_values, v));
    const double b =
        v <= 0.0 ? 1.0
                 : w * static_cast<double>(count_at_least(pr.sorted_values, v));
    chunks.push_back({mass, a, b});
  }
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    double acc = 0.0;
    for (const Chunk& ch : chunks) {
      if (t >= ch.b) {
        acc += ch.mass;
      } else if (t > ch.a) {
        acc += ch.mass * (t - ch.a) / (ch.b - ch.a);
      }
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace dtbh
