#include "dtbh/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dtbh/numerics.hpp"

namespace dtbh {

namespace {

// Continued-fraction kernel of the regularized incomplete beta function
// (modified Lentz iteration).
double betacf(double a, double b, double x) {
  const int max_iter = 300;
  const double eps = 3e-16;
  const double floor_val = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < floor_val) d = floor_val;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < floor_val) d = floor_val;
    c = 1.0 + aa / c;
    if (std::abs(c) < floor_val) c = floor_val;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < floor_val) d = floor_val;
    c = 1.0 + aa / c;
    if (std::abs(c) < floor_val) c = floor_val;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta: continued fraction did not converge");
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double binary_entropy(double w) {
  if (w <= 0.0 || w >= 1.0) return 0.0;
  return -(w * std::log2(w) + (1.0 - w) * std::log2(1.0 - w));
}

struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  int n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double stderr_mean() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1));
    return std::sqrt(var / n);
  }
};

}  // namespace

ConfusionCounts tally(const std::vector<bool>& truth,
                      const std::vector<int>& selected) {
  std::vector<bool> picked(truth.size(), false);
  for (int id : selected) {
    if (id < 0 || static_cast<std::size_t>(id) >= truth.size()) {
      throw ConfigError("tally: selected id out of range");
    }
    picked[static_cast<std::size_t>(id)] = true;
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++(picked[i] ? c.s : c.t);
    } else {
      ++(picked[i] ? c.v : c.u);
    }
  }
  return c;
}

double fdp(const ConfusionCounts& c) {
  const int r = c.rejections();
  return r > 0 ? static_cast<double>(c.v) / static_cast<double>(r) : 0.0;
}

MonteCarloSummary summarize(const std::vector<TrialOutcome>& outcomes) {
  MonteCarloSummary s;
  s.trials = static_cast<int>(outcomes.size());
  Accumulator a_fdp, a_power, a_det, a_rej, a_msg, a_share;
  for (const auto& o : outcomes) {
    a_fdp.add(fdp(o.counts));
    a_det.add(static_cast<double>(o.counts.s));
    a_rej.add(static_cast<double>(o.counts.rejections()));
    a_msg.add(o.messages);
    if (o.m1 > 0) {
      a_power.add(static_cast<double>(o.counts.s) / o.m1);
      ++s.trials_with_alternates;
    }
    if (o.counts.rejections() > 0) {
      a_share.add(static_cast<double>(o.counts.s) / o.counts.rejections());
      ++s.trials_with_rejections;
    }
  }
  s.mean_fdp = a_fdp.mean();
  s.stderr_fdp = a_fdp.stderr_mean();
  s.mean_power = a_power.mean();
  s.stderr_power = a_power.stderr_mean();
  s.mean_detections = a_det.mean();
  s.stderr_detections = a_det.stderr_mean();
  s.mean_rejections = a_rej.mean();
  s.mean_messages = a_msg.mean();
  s.stderr_messages = a_msg.stderr_mean();
  s.mean_true_share = a_share.mean();
  return s;
}

MonteCarloSummary monte_carlo_estimate(const TrialRunner& runner, int trials,
                                       std::uint64_t master_seed, int jobs) {
  if (trials < 0) throw ConfigError("monte carlo: negative trial count");
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  jobs = std::clamp(jobs, 1, std::max(trials, 1));
  if (jobs == 1) {
    for (int t = 0; t < trials; ++t) {
      outcomes[static_cast<std::size_t>(t)] = runner(master_seed, t);
    }
    return summarize(outcomes);
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&]() {
      try {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
          outcomes[static_cast<std::size_t>(t)] = runner(master_seed, t);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return summarize(outcomes);
}

double order_stat_cdf(int i, int n, double u) {
  if (n < 1 || i < 1 || i > n) {
    throw ConfigError("order statistic: need 1 <= i <= n");
  }
  return reg_inc_beta(static_cast<double>(i), static_cast<double>(n - i + 1),
                      std::clamp(u, 0.0, 1.0));
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ConfigError("ks distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double fano_bound(const DensityModel& null_model, const DensityModel& alt,
                  double prior_alt) {
  if (null_model.dimension() != 1 || alt.dimension() != 1) {
    throw ConfigError("label uncertainty: models must be 1-D");
  }
  if (!(prior_alt > 0.0) || prior_alt >= 1.0) {
    throw ConfigError("label uncertainty: prior must lie in (0, 1)");
  }
  const Interval s0 = null_model.support();
  const Interval s1 = alt.support();
  const double lo = std::min(s0.lo, s1.lo);
  const double hi = std::max(s0.hi, s1.hi);
  return simpson(
      [&](double y) {
        const double a = prior_alt * alt.pdf(Point(y));
        const double b = (1.0 - prior_alt) * null_model.pdf(Point(y));
        const double f = a + b;
        if (f <= 0.0) return 0.0;
        return f * binary_entropy(a / f);
      },
      lo, hi, 8192);
}

}  // namespace dtbh
