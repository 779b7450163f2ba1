#include "dtbh/pvalues.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dtbh/numerics.hpp"

namespace dtbh {

namespace {

// Prefix integral of f over [lo, hi] on an n-interval grid (trapezoid rule),
// then linear interpolation at x. Using one shared grid for the partial and
// the total keeps the ratio exactly 1 at the right endpoint.
double normalized_prefix(const std::function<double(double)>& f, double lo,
                         double hi, double x, int n, double* total_out) {
  const double h = (hi - lo) / n;
  double prev = f(lo);
  double acc = 0.0;
  double at_x = 0.0;
  bool seen_x = x <= lo;
  for (int k = 1; k <= n; ++k) {
    const double xk = lo + k * h;
    const double cur = f(xk);
    const double step = 0.5 * (prev + cur) * h;
    if (!seen_x && x <= xk) {
      const double frac = (x - (xk - h)) / h;
      // Trapezoid over the partial cell [xk - h, x].
      const double fx = prev + (cur - prev) * frac;
      at_x = acc + 0.5 * (prev + fx) * (x - (xk - h));
      seen_x = true;
    }
    acc += step;
    prev = cur;
  }
  if (!seen_x) at_x = acc;
  if (total_out != nullptr) *total_out = acc;
  return at_x;
}

Point uniformize_tabulated(const DensityModel& joint, const Point& x) {
  const int res = joint.tabulated_resolution();
  const auto& v = joint.tabulated_values();
  const double w = 1.0 / res;
  auto cell_of = [&](double c) {
    return std::clamp(static_cast<int>(c * res), 0, res - 1);
  };
  const int cx = cell_of(x.x());
  const int cy = cell_of(x.y());
  // Marginal of the first coordinate: column masses.
  double before = 0.0;
  double col = 0.0;
  for (int ix = 0; ix < res; ++ix) {
    double m = 0.0;
    for (int iy = 0; iy < res; ++iy) {
      m += v[static_cast<std::size_t>(iy) * res + ix] * w * w;
    }
    if (ix < cx) before += m;
    if (ix == cx) col = m;
  }
  const double u1 =
      std::clamp(before + (x.x() - cx * w) * col * res, 0.0, 1.0);
  if (col <= 0.0) {
    throw NumericError("uniformizer: conditioning slice has no mass");
  }
  // Conditional of the second coordinate within the column.
  double acc = 0.0;
  for (int iy = 0; iy < cy; ++iy) {
    acc += v[static_cast<std::size_t>(iy) * res + cx] * w * w;
  }
  acc += (x.y() - cy * w) * v[static_cast<std::size_t>(cy) * res + cx] * w;
  return Point(u1, std::clamp(acc / col, 0.0, 1.0));
}

Point uniformize_numeric(const DensityModel& joint, const Point& x) {
  const Interval sx = joint.support(0);
  const Interval sy = joint.support(1);
  auto marginal = [&](double xx) {
    double total = 0.0;
    normalized_prefix([&](double yy) { return joint.pdf(Point(xx, yy)); },
                      sy.lo, sy.hi, sy.lo, 1024, &total);
    return total;
  };
  double total_x = 0.0;
  const double part_x =
      normalized_prefix(marginal, sx.lo, sx.hi, x.x(), 512, &total_x);
  if (!(total_x > 0.0)) throw NumericError("uniformizer: degenerate joint");
  double slice = 0.0;
  const double part_y = normalized_prefix(
      [&](double yy) { return joint.pdf(Point(x.x(), yy)); }, sy.lo, sy.hi,
      x.y(), 4096, &slice);
  if (!(slice > 0.0)) {
    throw NumericError("uniformizer: conditioning slice has no mass");
  }
  return Point(std::clamp(part_x / total_x, 0.0, 1.0),
               std::clamp(part_y / slice, 0.0, 1.0));
}

}  // namespace

double survival_pvalue(const DensityModel& null_model, double y) {
  return std::clamp(1.0 - null_model.cdf(y), 0.0, 1.0);
}

PValueVector survival_pvalues(const DensityModel& null_model,
                              const std::vector<double>& observations) {
  PValueVector pv;
  pv.values.reserve(observations.size());
  pv.sensor_ids.reserve(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    pv.values.push_back(survival_pvalue(null_model, observations[i]));
    pv.sensor_ids.push_back(static_cast<int>(i));
  }
  return pv;
}

double fold_transform(double p) { return std::abs(1.0 - 2.0 * p); }

Point sequential_uniformizer(const DensityModel& joint, const Point& x) {
  if (joint.dimension() != 2 || x.dim != 2) {
    throw ConfigError("uniformizer: needs a 2-D joint and a 2-D point");
  }
  switch (joint.kind()) {
    case DensityModel::Kind::uniform_cube:
      return Point(std::clamp(x.x(), 0.0, 1.0), std::clamp(x.y(), 0.0, 1.0));
    case DensityModel::Kind::product: {
      const auto& parts = joint.components();
      return Point(parts[0].second.cdf(x.x()), parts[1].second.cdf(x.y()));
    }
    case DensityModel::Kind::mixture: {
      const auto& parts = joint.components();
      const bool all_product =
          std::all_of(parts.begin(), parts.end(), [](const auto& c) {
            return c.second.kind() == DensityModel::Kind::product;
          });
      if (!all_product) return uniformize_numeric(joint, x);
      double u1 = 0.0;
      double slice = 0.0;
      double u2_num = 0.0;
      for (const auto& [w, comp] : parts) {
        const auto& f = comp.components();
        u1 += w * f[0].second.cdf(x.x());
        const double a = w * f[0].second.pdf(Point(x.x()));
        slice += a;
        u2_num += a * f[1].second.cdf(x.y());
      }
      if (!(slice > 0.0)) {
        throw NumericError("uniformizer: conditioning slice has no mass");
      }
      return Point(std::clamp(u1, 0.0, 1.0),
                   std::clamp(u2_num / slice, 0.0, 1.0));
    }
    case DensityModel::Kind::tabulated:
      return uniformize_tabulated(joint, x);
    default:
      return uniformize_numeric(joint, x);
  }
}

DensityModel pvalue_density_under_alternative(const DensityModel& null_model,
                                              const DensityModel& alt,
                                              int cells) {
  if (null_model.dimension() != 1 || alt.dimension() != 1) {
    throw ConfigError("p-value density: models must be 1-D");
  }
  if (null_model.degenerate() || alt.degenerate()) {
    throw ConfigError("p-value density: needs spread-out models");
  }
  if (cells < 2) throw ConfigError("p-value density: too few cells");
  const double y_hi =
      std::max(null_model.support().hi, alt.support().hi) + 1.0;
  const double y_lo =
      std::min(null_model.support().lo, alt.support().lo) - 1.0;
  // Observation cutoffs matching the p-value grid: t = j/cells corresponds to
  // the null upper-tail quantile, decreasing in j.
  std::vector<double> y_edge(static_cast<std::size_t>(cells) + 1);
  y_edge.front() = y_hi;
  y_edge.back() = y_lo;
  for (int j = 1; j < cells; ++j) {
    const double t = static_cast<double>(j) / cells;
    y_edge[static_cast<std::size_t>(j)] = null_model.quantile(1.0 - t);
  }
  std::vector<double> values(static_cast<std::size_t>(cells));
  for (int j = 0; j < cells; ++j) {
    const double mass = alt.cdf(y_edge[static_cast<std::size_t>(j)]) -
                        alt.cdf(y_edge[static_cast<std::size_t>(j) + 1]);
    values[static_cast<std::size_t>(j)] = std::max(0.0, mass) * cells;
  }
  return DensityModel::tabulated(std::move(values), 1);
}

}  // namespace dtbh
