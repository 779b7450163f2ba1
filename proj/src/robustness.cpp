#include "dtbh/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "dtbh/common.hpp"
#include "dtbh/numerics.hpp"

namespace dtbh {

namespace {
constexpr int kBandGrid = 4096;
constexpr double kBandSlack = 1e-9;
}  // namespace

EpsilonFamily::EpsilonFamily(double epsilon, BandShape shape,
                             std::function<double(double)> cdf)
    : epsilon_(epsilon), shape_(shape), cdf_(std::move(cdf)) {
  validate();
}

void EpsilonFamily::validate() const {
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_)) {
    throw ConfigError("epsilon family: epsilon must be a non-negative real");
  }
  double prev = 0.0;
  for (int k = 0; k <= kBandGrid; ++k) {
    const double x = static_cast<double>(k) / kBandGrid;
    const double f = cdf_(x);
    if (!std::isfinite(f)) {
      throw ConfigError("epsilon family: CDF evaluates to a non-finite value");
    }
    if (std::abs(f - x) > epsilon_ * x + kBandSlack) {
      throw ConfigError("epsilon family: CDF leaves the relative band");
    }
    if (f < prev - 1e-12) {
      throw ConfigError("epsilon family: CDF must be non-decreasing");
    }
    prev = f;
  }
  if (std::abs(cdf_(0.0)) > kBandSlack || std::abs(cdf_(1.0) - 1.0) > kBandSlack) {
    throw ConfigError("epsilon family: CDF must run from 0 to 1");
  }
}

EpsilonFamily EpsilonFamily::smooth(double epsilon) {
  return EpsilonFamily(epsilon, BandShape::smooth, [epsilon](double x) {
    return x + epsilon * x * (1.0 - x);
  });
}

EpsilonFamily EpsilonFamily::extremal(double epsilon) {
  return EpsilonFamily(epsilon, BandShape::extremal, [epsilon](double x) {
    return std::min((1.0 + epsilon) * x, 1.0);
  });
}

EpsilonFamily EpsilonFamily::empirical(double epsilon,
                                       std::function<double(double)> cdf) {
  return EpsilonFamily(epsilon, BandShape::empirical, std::move(cdf));
}

double EpsilonFamily::cdf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ConfigError("epsilon family: cdf argument outside [0, 1]");
  }
  return cdf_(x);
}

double EpsilonFamily::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw ConfigError("epsilon family: quantile argument outside [0, 1]");
  }
  switch (shape_) {
    case BandShape::smooth: {
      if (epsilon_ == 0.0) {
        return u;
      }
      const double a = 1.0 + epsilon_;
      return (a - std::sqrt(a * a - 4.0 * epsilon_ * u)) / (2.0 * epsilon_);
    }
    case BandShape::extremal:
      return u / (1.0 + epsilon_);
    case BandShape::empirical:
      return bisect_increasing(cdf_, 0.0, 1.0, u, 1e-13);
  }
  throw ConfigError("epsilon family: unknown shape");
}

double EpsilonFamily::sample(RandomStream& rng) const {
  return quantile(rng.uniform());
}

double perturbed_null_cdf(const EpsilonFamily& family, double x) {
  return family.cdf(x);
}

double adjusted_level(double gamma, double epsilon) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("adjusted level: gamma must lie strictly inside (0, 1)");
  }
  if (!(epsilon >= 0.0)) {
    throw ConfigError("adjusted level: epsilon must be non-negative");
  }
  return gamma / (1.0 + epsilon);
}

double asymptotic_cutoff(const std::function<double(double)>& f1hat_cdf,
                         double gamma, double theta0, double theta1) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("cutoff: gamma must lie strictly inside (0, 1)");
  }
  if (!(theta1 > 0.0) || !(theta0 >= 0.0) ||
      std::abs(theta0 + theta1 - 1.0) > 1e-9) {
    throw ConfigError("cutoff: class fractions must be non-negative and sum to 1");
  }
  if (std::abs(f1hat_cdf(0.0)) > 1e-9) {
    throw ConfigError("cutoff: mass curve must start at 0");
  }
  // Midpoint concavity on a uniform grid; the crossing logic depends on it.
  constexpr int kGrid = 128;
  for (int k = 1; k < kGrid; ++k) {
    const double left = f1hat_cdf(static_cast<double>(k - 1) / kGrid);
    const double mid = f1hat_cdf(static_cast<double>(k) / kGrid);
    const double right = f1hat_cdf(static_cast<double>(k + 1) / kGrid);
    if (mid < 0.5 * (left + right) - 1e-9) {
      throw ConfigError("cutoff: mass curve must be concave");
    }
  }

  const double slope = (1.0 / gamma - theta0) / theta1;
  const auto gap = [&](double x) { return f1hat_cdf(x) - slope * x; };
  double lo = 1e-12;
  double hi = 1.0;
  if (gap(lo) <= 0.0) {
    return 0.0;  // the line dominates arbitrarily close to zero
  }
  if (gap(hi) >= 0.0) {
    return 1.0;  // the curve never falls below the line inside [0, 1]
  }
  while (hi - lo >= 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double power_loss(const std::function<double(double)>& f1hat_cdf, double c,
                  double c_prime, int m1) {
  if (!(c_prime >= 0.0 && c_prime <= c && c <= 1.0)) {
    throw ConfigError("power loss: need 0 <= c_prime <= c <= 1");
  }
  if (m1 < 0) {
    throw ConfigError("power loss: m1 must be non-negative");
  }
  return (f1hat_cdf(c) - f1hat_cdf(c_prime)) * static_cast<double>(m1);
}

double estimate_epsilon(const std::vector<double>& null_samples) {
  const std::size_t n = null_samples.size();
  if (n == 0) {
    throw ConfigError("band estimate: need at least one sample");
  }
  for (double v : null_samples) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("band estimate: samples must lie in [0, 1]");
    }
  }
  std::vector<double> sorted(null_samples);
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(n);
  const double x_min = std::min(10.0 / dn, 1.0);

  double best = 0.0;
  const auto consider = [&](double x, double deviation) {
    if (x < x_min) {
      return;
    }
    const double allowance = 2.0 * std::sqrt(x * (1.0 - x) / dn);
    const double excess = std::max(0.0, deviation - allowance);
    best = std::max(best, excess / x);
  };

  // The empirical CDF is extremal at its jumps; probe both sides of each.
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sorted[i];
    if (x <= 0.0) {
      continue;
    }
    consider(x, std::abs(static_cast<double>(i) / dn - x));
    consider(x, std::abs(static_cast<double>(i + 1) / dn - x));
  }
  const auto below = std::upper_bound(sorted.begin(), sorted.end(), x_min);
  consider(x_min,
           std::abs(static_cast<double>(below - sorted.begin()) / dn - x_min));
  consider(1.0, 0.0);
  return best;
}

bool tv_band_check(const TransformTable& a, const TransformTable& b,
                   double epsilon, double grid_tol) {
  if (!(epsilon >= 0.0) || !(grid_tol >= 0.0)) {
    throw ConfigError("band check: epsilon and tolerance must be non-negative");
  }
  const auto check_span = [](const TransformTable& t) {
    if (t.breakpoints.size() < 2 || t.cdf.size() != t.breakpoints.size() ||
        std::abs(t.breakpoints.front()) > 1e-9 ||
        std::abs(t.breakpoints.back() - 1.0) > 1e-9) {
      throw ConfigError("band check: tables must span [0, 1]");
    }
  };
  check_span(a);
  check_span(b);

  // Both cdfs are piecewise linear, so their largest gap over [0, 1] is
  // attained at a breakpoint of one table or the other.
  std::vector<double> grid;
  grid.reserve(a.breakpoints.size() + b.breakpoints.size());
  grid.insert(grid.end(), a.breakpoints.begin(), a.breakpoints.end());
  grid.insert(grid.end(), b.breakpoints.begin(), b.breakpoints.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double sup = 0.0;
  for (double t : grid) {
    sup = std::max(sup, std::abs(a.cdf_at(t) - b.cdf_at(t)));
  }
  return sup <= epsilon + grid_tol;
}

}  // namespace dtbh
