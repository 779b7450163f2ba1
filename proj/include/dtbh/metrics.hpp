#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dtbh/random.hpp"
#include "dtbh/distributions.hpp"

namespace dtbh {

// Confusion counts for one trial. `truth[i]` is true when sensor i is an
// alternative; `selected` holds declared sensor ids.
struct ConfusionCounts {
  int u = 0;  // true nulls left undeclared
  int v = 0;  // false declarations
  int t = 0;  // alternatives missed
  int s = 0;  // correct declarations
  int rejections() const { return v + s; }
};

ConfusionCounts tally(const std::vector<bool>& truth,
                      const std::vector<int>& selected);

// False discovery proportion v / (v + s); zero when nothing was declared.
double fdp(const ConfusionCounts& c);

struct TrialOutcome {
  int m = 0;
  int m1 = 0;
  ConfusionCounts counts;
  double messages = 0.0;
};

struct MonteCarloSummary {
  int trials = 0;
  int trials_with_rejections = 0;
  int trials_with_alternates = 0;
  double mean_fdp = 0.0;
  double stderr_fdp = 0.0;
  double mean_power = 0.0;  // fraction of alternates found, averaged over
                            // trials that contain alternates
  double stderr_power = 0.0;
  double mean_detections = 0.0;  // correct declarations per trial
  double stderr_detections = 0.0;
  double mean_rejections = 0.0;
  double mean_messages = 0.0;
  double stderr_messages = 0.0;
  double mean_true_share = 0.0;  // s / (v + s), averaged over trials that
                                 // declared anything
};

MonteCarloSummary summarize(const std::vector<TrialOutcome>& outcomes);

// Runs `runner(master_seed, trial)` for trial = 0..trials-1, optionally on
// several threads, and reduces the outcomes sequentially so results do not
// depend on the number of threads. Runners should derive their randomness
// from RandomStream(master_seed, trial, k).
using TrialRunner = std::function<TrialOutcome(std::uint64_t, int)>;
MonteCarloSummary monte_carlo_estimate(const TrialRunner& runner, int trials,
                                       std::uint64_t master_seed,
                                       int jobs = 1);

// P(U_(i) <= u) for the i-th smallest of n iid U(0, 1) draws (regularized
// incomplete beta function I_u(i, n - i + 1)).
double order_stat_cdf(int i, int n, double u);

// Two-sided Kolmogorov-Smirnov distance between a sample and a reference
// CDF (the sample need not be sorted).
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Average posterior label uncertainty in bits: the integral of
// f(y) * h2(P(alternative | y)) under the mixture
// f = (1 - prior) * null + prior * alt. Lower-bounds the error of any
// labeling rule that sees only y.
double fano_bound(const DensityModel& null_model, const DensityModel& alt,
                  double prior_alt);

}  // namespace dtbh
