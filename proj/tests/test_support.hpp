#pragma once

// Shared helpers for the test binaries: reference densities with closed-form
// level-set geometry, a brute-force step-up selector, and quadrature oracles
// that are implemented independently of the library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "dtbh/distributions.hpp"

namespace dtbh::testing {

// Piecewise-constant approximation of an arbitrary 1-D density on [0, 1].
inline DensityModel tabulate_unit_density(
    const std::function<double(double)>& f, int cells = 4096) {
  std::vector<double> v(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) {
    v[static_cast<std::size_t>(i)] = f((i + 0.5) / cells);
  }
  return DensityModel::tabulated(std::move(v), 1);
}

// Symmetric triangular density: 4x on [0, 1/2], 4(1-x) on (1/2, 1].
// Closed forms used as oracles:
//   level measure     a(y) = 1 - y/2        (0 <= y <= 2)
//   level mass        b(y) = 1 - y^2/4
//   rearrangement     rearranged(t) = 2(1 - t)
//   its integral      rearranged_cdf(t) = 1 - (1-t)^2
//   exact transform   T(p) = |1 - 2p|
inline DensityModel triangular_density(int cells = 4096) {
  return tabulate_unit_density(
      [](double x) { return 4.0 * std::min(x, 1.0 - x); }, cells);
}

inline double triangular_alpha(double y) { return 1.0 - y / 2.0; }
inline double triangular_beta(double y) { return 1.0 - y * y / 4.0; }
inline double triangular_rearranged(double t) { return 2.0 * (1.0 - t); }
inline double triangular_rearranged_cdf(double t) {
  return 1.0 - (1.0 - t) * (1.0 - t);
}

// Strictly decreasing density 2(1-x) on [0, 1]: already equals its own
// decreasing rearrangement, so the transform is the CDF-free identity
// a(f(x)) = x and the rearranged integral is 2t - t^2.
inline DensityModel decreasing_density(int cells = 4096) {
  return tabulate_unit_density([](double x) { return 2.0 * (1.0 - x); },
                               cells);
}

// Density with a flat stretch and a dead zone, for plateau handling:
//   5 on [0, 0.1), 2.5 on [0.1, 0.3), 0 on [0.3, 1].
// Level measures: a(y) = 0 for y > 5, 0.1 for 2.5 < y <= 5,
// 0.3 for 0 < y <= 2.5, and the zero region occupies (0.3, 1].
inline DensityModel plateau_density(int cells = 4000) {
  return tabulate_unit_density(
      [](double x) {
        if (x < 0.1) return 5.0;
        if (x < 0.3) return 2.5;
        return 0.0;
      },
      cells);
}

// Brute-force step-up selection at level gamma: for every candidate rank i
// (sorted p ascending) check p_(i) <= i * gamma / m, take the largest such i,
// and return the (0-based) ids of the i smallest p-values. Ties are broken by
// id so the result is deterministic.
inline std::vector<int> brute_force_step_up(const std::vector<double>& p,
                                            double gamma) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p[a] != p[b] ? p[a] < p[b] : a < b;
  });
  std::size_t keep = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    if (p[order[i - 1]] <= static_cast<double>(i) * gamma /
                               static_cast<double>(m)) {
      keep = i;
    }
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < keep; ++i) {
    out.push_back(static_cast<int>(order[i]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration on the
// Legendre recurrence. Exact (to rounding) for polynomials of degree < 2n.
inline void gauss_legendre(int n, std::vector<double>& nodes,
                           std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(n - 1 - i)] =
        weights[static_cast<std::size_t>(i)];
  }
}

// Quadrature oracle for P(U_(i) <= u) with n iid U(0,1) draws: integrates the
// order-statistic density n!/((i-1)!(n-i)!) x^(i-1) (1-x)^(n-i) over [0, u]
// with 256-node Gauss-Legendre, which is exact for n <= 256.
inline double order_stat_cdf_oracle(int i, int n, double u) {
  std::vector<double> nodes, weights;
  gauss_legendre(256, nodes, weights);
  const double logc = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(i)) -
                      std::lgamma(static_cast<double>(n - i + 1));
  double acc = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double x = 0.5 * u * (nodes[k] + 1.0);
    double logf = logc;
    if (i > 1) logf += (i - 1) * std::log(x);
    if (n - i > 0) logf += (n - i) * std::log1p(-x);
    acc += weights[k] * std::exp(logf);
  }
  return acc * 0.5 * u;
}

inline double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

inline double sample_stddev(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace dtbh::testing
