#pragma once

#include <functional>
#include <vector>

#include "dtbh/random.hpp"
#include "dtbh/transform.hpp"

namespace dtbh {

enum class BandShape { smooth, extremal, empirical };

// A null distribution on [0,1] constrained to the relative band
// |F0(x) - x| <= epsilon * x. Construction validates the band and basic
// CDF shape on a fine grid and rejects violations.
class EpsilonFamily {
 public:
  // F0(x) = x + epsilon * x * (1 - x): stays strictly inside the band.
  static EpsilonFamily smooth(double epsilon);
  // F0(x) = min((1 + epsilon) * x, 1): rides the upper band edge.
  static EpsilonFamily extremal(double epsilon);
  // Caller-supplied CDF, still held to the band for the given epsilon.
  static EpsilonFamily empirical(double epsilon,
                                 std::function<double(double)> cdf);

  double epsilon() const { return epsilon_; }
  BandShape shape() const { return shape_; }

  double cdf(double x) const;
  double quantile(double u) const;
  double sample(RandomStream& rng) const;  // inverse-CDF draw

 private:
  EpsilonFamily(double epsilon, BandShape shape,
                std::function<double(double)> cdf);
  void validate() const;

  double epsilon_ = 0.0;
  BandShape shape_ = BandShape::smooth;
  std::function<double(double)> cdf_;
};

// Convenience spelling of family.cdf(x).
double perturbed_null_cdf(const EpsilonFamily& family, double x);

// The level to feed the selection procedure so that an epsilon-perturbed
// null still keeps the false discovery rate at gamma: gamma / (1 + epsilon).
double adjusted_level(double gamma, double epsilon);

// Large-field decision point: the positive root c of
//   f1hat_cdf(x) = ((1/gamma - theta0) / theta1) * x,
// located by bisection to |dx| < 1e-10. Returns 0 when the line dominates
// the (concave) curve everywhere. theta0 and theta1 are the null and
// alternative fractions and must sum to one.
double asymptotic_cutoff(const std::function<double(double)>& f1hat_cdf,
                         double gamma, double theta0, double theta1);

// Expected extra misses when the decision point retreats from c to c_prime:
// (f1hat_cdf(c) - f1hat_cdf(c_prime)) * m1. Requires 0 <= c_prime <= c <= 1.
double power_loss(const std::function<double(double)>& f1hat_cdf, double c,
                  double c_prime, int m1);

// Estimates the band half-width of a sample of probabilities: the largest
// relative deviation of the empirical CDF from the identity, evaluated at
// jump points at or above x_min = min(10/n, 1), after subtracting a
// two-sigma binomial allowance so pure sampling noise reads as zero.
double estimate_epsilon(const std::vector<double>& null_samples);

// True when the two rearranged-mass tables stay uniformly within epsilon of
// each other: sup over the union of breakpoints of |cdf_a - cdf_b| is at
// most epsilon + grid_tol. Both tables must span [0, 1].
bool tv_band_check(const TransformTable& a, const TransformTable& b,
                   double epsilon, double grid_tol = 2e-3);

}  // namespace dtbh
