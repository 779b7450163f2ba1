#pragma once

#include <cmath>
#include <functional>

#include "dtbh/common.hpp"

namespace dtbh {

// Composite Simpson rule with n subintervals (n is rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    sum += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// Root of a monotone non-decreasing function g on [lo, hi] with g(root) = target.
// Plain bisection; returns the midpoint once the bracket is below tol.
inline double bisect_increasing(const std::function<double(double)>& g,
                                double lo, double hi, double target,
                                double tol = 1e-12, int max_iter = 200) {
  double flo = g(lo) - target;
  double fhi = g(hi) - target;
  if (flo > 0.0) return lo;
  if (fhi < 0.0) return hi;
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = g(mid) - target;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Same idea for a monotone non-increasing function.
inline double bisect_decreasing(const std::function<double(double)>& g,
                                double lo, double hi, double target,
                                double tol = 1e-12, int max_iter = 200) {
  return bisect_increasing([&](double x) { return -g(x); }, lo, hi, -target,
                           tol, max_iter);
}

}  // namespace dtbh
