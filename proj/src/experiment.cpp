#include "dtbh/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>

#include "dtbh/common.hpp"
#include "dtbh/csv.hpp"
#include "dtbh/procedures.hpp"
#include "dtbh/protocol.hpp"
#include "dtbh/pvalues.hpp"
#include "dtbh/robustness.hpp"
#include "dtbh/transform.hpp"

namespace dtbh {
namespace {

namespace fs = std::filesystem;

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, count); result i lands at index i, so the output
// does not depend on the thread count.
template <typename T>
std::vector<T> parallel_map(int count, int jobs,
                            const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  const int workers = std::min(resolve_jobs(jobs), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          out[static_cast<std::size_t>(i)] = fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);  // stop the other workers promptly
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(n - 1) /
                   static_cast<double>(n));
}

int true_detections(const std::vector<bool>& labels,
                    const std::vector<int>& selected) {
  int s = 0;
  for (int id : selected) {
    if (labels[static_cast<std::size_t>(id)]) ++s;
  }
  return s;
}

std::vector<int> all_ids(int m) {
  std::vector<int> ids(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

SelectionResult oracle_select(const FieldRealization& field,
                              const DensityModel& null_model,
                              const DensityModel& alt_model) {
  const int m = static_cast<int>(field.observations.size());
  const int m1 = field.m1();
  SelectionResult sel;
  if (m1 <= 0) return sel;  // zero prior: nothing clears the posterior bar
  if (m1 >= m) {
    sel.selected = all_ids(m);
    return sel;
  }
  const double prior = static_cast<double>(m1) / static_cast<double>(m);
  return bayes_oracle_select(field.observations, all_ids(m), null_model,
                             alt_model, prior);
}

}  // namespace

Procedure parse_procedure(const std::string& name) {
  if (name == "bh") return Procedure::bh;
  if (name == "dtbh") return Procedure::dtbh;
  if (name == "uncorrected") return Procedure::uncorrected;
  if (name == "oracle") return Procedure::oracle;
  if (name == "distributed") return Procedure::distributed;
  if (name == "distributed_dynamic") return Procedure::distributed_dynamic;
  throw ConfigError("unknown procedure '" + name + "'");
}

std::string procedure_name(Procedure p) {
  switch (p) {
    case Procedure::bh: return "bh";
    case Procedure::dtbh: return "dtbh";
    case Procedure::uncorrected: return "uncorrected";
    case Procedure::oracle: return "oracle";
    case Procedure::distributed: return "distributed";
    case Procedure::distributed_dynamic: return "distributed_dynamic";
  }
  throw ConfigError("unknown procedure enum value");
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("gamma must lie in (0, 1)");
  }
  if (!(uncorrected_level > 0.0 && uncorrected_level < 1.0)) {
    throw ConfigError("uncorrected_level must lie in (0, 1)");
  }
  if (epsilon && !(*epsilon >= 0.0)) {
    throw ConfigError("epsilon must be non-negative");
  }
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (k_preset < 0) throw ConfigError("k_preset must be non-negative");
  if (budget && *budget < 0) throw ConfigError("budget must be non-negative");
  if (jobs < 0) throw ConfigError("jobs must be non-negative (0 = auto)");
  if (transform_resolution < 0) {
    throw ConfigError("resolution must be non-negative (0 = default)");
  }
}

double ExperimentConfig::effective_level() const {
  return epsilon ? adjusted_level(gamma, *epsilon) : gamma;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Scenario& sc = config.scenario;
  const int m = sc.sensor_count();
  const double level = config.effective_level();
  const DensityModel null_model = assumed_null(sc);
  const DensityModel alt_model = assumed_alt(sc);

  const bool needs_transform = config.procedure == Procedure::dtbh ||
                               config.procedure == Procedure::distributed ||
                               config.procedure == Procedure::distributed_dynamic;
  std::optional<DomainTransform> dt;
  if (needs_transform) {
    dt = build_domain_transform(
        pvalue_density_under_alternative(null_model, alt_model),
        config.transform_resolution);
  }

  const auto run_one = [&](int trial) {
    RandomStream field_rng(config.master_seed,
                           static_cast<std::uint64_t>(trial), 0);
    const FieldRealization field = sample_field(sc, field_rng);
    const PValueVector pv = survival_pvalues(null_model, field.observations);

    SelectionResult sel;
    double messages = static_cast<double>(m);
    switch (config.procedure) {
      case Procedure::bh:
        sel = bh_select(pv, level);
        break;
      case Procedure::uncorrected:
        sel = uncorrected_select(pv, config.uncorrected_level);
        break;
      case Procedure::oracle:
        sel = oracle_select(field, null_model, alt_model);
        break;
      case Procedure::dtbh: {
        RandomStream transform_rng(config.master_seed,
                                   static_cast<std::uint64_t>(trial), 1);
        sel = dtbh_select(*dt, pv, level, transform_rng);
        break;
      }
      case Procedure::distributed:
      case Procedure::distributed_dynamic: {
        RandomStream transform_rng(config.master_seed,
                                   static_cast<std::uint64_t>(trial), 1);
        const PValueVector tv = transform_pvalues(*dt, pv, transform_rng);
        ProtocolConfig pc;
        pc.gamma = level;
        pc.k_preset = config.k_preset;
        pc.budget = config.budget;
        pc.dynamic = config.procedure == Procedure::distributed_dynamic;
        const ProtocolResult res = run_protocol(tv, pc);
        sel.selected = res.selected;
        messages = static_cast<double>(res.trace.messages);
        break;
      }
    }

    TrialOutcome outcome;
    outcome.m = m;
    outcome.m1 = field.m1();
    outcome.counts = tally(field.labels, sel.selected);
    outcome.messages = messages;
    return outcome;
  };

  ExperimentResult result;
  result.outcomes = parallel_map<TrialOutcome>(config.trials, config.jobs,
                                               run_one);
  result.summary = summarize(result.outcomes);

  if (!config.output_path.empty()) {
    const fs::path dir = config.output_path;

    std::string trials_csv = "trial,m1,u,v,t,s,r,fdp,power,messages\n";
    for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
      const TrialOutcome& o = result.outcomes[i];
      const int r = o.counts.v + o.counts.s;
      const double power =
          o.m1 > 0 ? static_cast<double>(o.counts.s) / o.m1 : 0.0;
      trials_csv += csv_row(
          {csv_number(static_cast<long long>(i)),
           csv_number(static_cast<long long>(o.m1)),
           csv_number(static_cast<long long>(o.counts.u)),
           csv_number(static_cast<long long>(o.counts.v)),
           csv_number(static_cast<long long>(o.counts.t)),
           csv_number(static_cast<long long>(o.counts.s)),
           csv_number(static_cast<long long>(r)), csv_number(fdp(o.counts)),
           csv_number(power), csv_number(o.messages)});
    }
    write_text_file(dir / "trials.csv", trials_csv);

    double mean_m1 = 0.0;
    for (const auto& o : result.outcomes) mean_m1 += o.m1;
    mean_m1 /= static_cast<double>(result.outcomes.size());
    std::string summary_csv =
        "procedure,gamma,m,m1,trials,mean_fdp,stderr_fdp,mean_power,"
        "mean_messages\n";
    summary_csv += csv_row(
        {procedure_name(config.procedure), csv_number(config.gamma),
         csv_number(static_cast<long long>(m)), csv_number(mean_m1),
         csv_number(static_cast<long long>(config.trials)),
         csv_number(result.summary.mean_fdp),
         csv_number(result.summary.stderr_fdp),
         csv_number(result.summary.mean_power),
         csv_number(result.summary.mean_messages)});
    write_text_file(dir / "summary.csv", summary_csv);

    // First realization, re-sampled from its own substream.
    RandomStream field_rng(config.master_seed, 0, 0);
    const FieldRealization field0 = sample_field(sc, field_rng);
    std::string field_csv = "x,y,label,observation\n";
    for (std::size_t i = 0; i < field0.sensor_positions.size(); ++i) {
      field_csv += csv_row({csv_number(field0.sensor_positions[i].x()),
                            csv_number(field0.sensor_positions[i].y()),
                            csv_number(static_cast<long long>(
                                field0.labels[i] ? 1 : 0)),
                            csv_number(field0.observations[i])});
    }
    write_text_file(dir / "field0.csv", field_csv);
  }
  return result;
}

std::vector<SweepRow> run_epsilon_sweep(const SweepConfig& config) {
  if (config.m < 1) throw ConfigError("sweep: m must be at least 1");
  if (config.m1 < 0 || config.m1 > config.m) {
    throw ConfigError("sweep: m1 must lie in [0, m]");
  }
  if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw ConfigError("sweep: gamma must lie in (0, 1)");
  }
  if (config.trials < 1) throw ConfigError("sweep: trials must be at least 1");
  if (config.epsilons.empty()) {
    throw ConfigError("sweep: need at least one epsilon");
  }
  for (double e : config.epsilons) {
    if (!(e >= 0.0)) throw ConfigError("sweep: epsilons must be non-negative");
  }

  const DensityModel null_model = DensityModel::gaussian(0.0, 1.0);
  const DensityModel alt_model = DensityModel::gaussian(0.0, 0.01);
  const DomainTransform dt = build_domain_transform(
      pvalue_density_under_alternative(null_model, alt_model));

  std::vector<SweepRow> rows;
  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    const double eps = config.epsilons[e];
    const double level = adjusted_level(config.gamma, eps);
    const std::optional<EpsilonFamily> family =
        eps > 0.0 ? std::optional<EpsilonFamily>(EpsilonFamily::extremal(eps))
                  : std::nullopt;

    const auto run_one = [&](int trial) {
      const std::uint64_t stream =
          static_cast<std::uint64_t>(e) * config.trials +
          static_cast<std::uint64_t>(trial);
      RandomStream draw_rng(config.master_seed, stream, 0);
      RandomStream transform_rng(config.master_seed, stream, 1);
      PValueVector pv;
      std::vector<bool> labels(static_cast<std::size_t>(config.m));
      pv.values.resize(static_cast<std::size_t>(config.m));
      pv.sensor_ids = all_ids(config.m);
      for (int i = 0; i < config.m; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (i < config.m1) {
          labels[idx] = true;
          pv.values[idx] =
              survival_pvalue(null_model, alt_model.sample1(draw_rng));
        } else {
          pv.values[idx] = family ? family->sample(draw_rng)
                                  : draw_rng.uniform();
        }
      }
      const SelectionResult sel = dtbh_select(dt, pv, level, transform_rng);
      TrialOutcome outcome;
      outcome.m = config.m;
      outcome.m1 = config.m1;
      outcome.counts = tally(labels, sel.selected);
      outcome.messages = static_cast<double>(config.m);
      return outcome;
    };

    const auto outcomes =
        parallel_map<TrialOutcome>(config.trials, config.jobs, run_one);
    SweepRow row;
    row.epsilon = eps;
    row.gamma_adjusted = level;
    double fdr = 0.0, s = 0.0;
    for (const auto& o : outcomes) {
      fdr += fdp(o.counts);
      s += o.counts.s;
    }
    row.empirical_fdr = fdr / static_cast<double>(outcomes.size());
    row.detections = s / static_cast<double>(outcomes.size());
    rows.push_back(row);
  }

  if (!config.output_path.empty()) {
    std::string csv = "epsilon,gamma_adjusted,empirical_fdr,detections\n";
    for (const auto& row : rows) {
      csv += csv_row({csv_number(row.epsilon), csv_number(row.gamma_adjusted),
                      csv_number(row.empirical_fdr),
                      csv_number(row.detections)});
    }
    write_text_file(fs::path(config.output_path) / "sweep.csv", csv);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Figure recipes

namespace {

void check_scale(double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw ConfigError("scale must lie in (0, 1]");
  }
}

int scaled_trials(double scale, int full, int floor_at) {
  return std::max(floor_at, static_cast<int>(std::lround(full * scale)));
}

// Shared sampling design behind the sparsity curves: m = 100 observations,
// null N(0, 1), alternative N(0, 3), first m1 = round(sparsity * m) indices
// carry the alternative. Outcomes per procedure in the order
// oracle, dtbh, bh, uncorrected.
struct SparsityRun {
  std::vector<double> sparsities;
  int trials = 0;
  // flat[(procedure * levels + level) * trials + trial]
  std::array<std::vector<TrialOutcome>, 4> outcomes;
};

constexpr std::array<const char*, 4> kSparsityProcedures = {
    "oracle", "dtbh", "bh", "uncorrected"};

SparsityRun run_sparsity_design(double scale, std::uint64_t master_seed,
                                int jobs) {
  check_scale(scale);
  constexpr int kSamples = 100;
  constexpr double kGamma = 0.15;
  constexpr double kUncorrectedLevel = 0.01;
  SparsityRun run;
  for (int j = 1; j <= 10; ++j) run.sparsities.push_back(0.05 * j);
  run.trials = scaled_trials(scale, 400, 40);

  const DensityModel null_model = DensityModel::gaussian(0.0, 1.0);
  const DensityModel alt_model = DensityModel::gaussian(0.0, 3.0);
  const DomainTransform dt = build_domain_transform(
      pvalue_density_under_alternative(null_model, alt_model));

  const int levels = static_cast<int>(run.sparsities.size());
  const int total = levels * run.trials;
  const auto one = [&](int idx) {
    const int level_idx = idx / run.trials;
    const double sparsity = run.sparsities[static_cast<std::size_t>(level_idx)];
    const int m1 = static_cast<int>(std::lround(sparsity * kSamples));
    RandomStream draw_rng(master_seed, static_cast<std::uint64_t>(idx), 0);
    RandomStream transform_rng(master_seed, static_cast<std::uint64_t>(idx), 1);

    std::vector<double> obs(kSamples);
    std::vector<bool> labels(kSamples);
    for (int i = 0; i < kSamples; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      labels[ui] = i < m1;
      obs[ui] = labels[ui] ? alt_model.sample1(draw_rng)
                           : null_model.sample1(draw_rng);
    }
    const PValueVector pv = survival_pvalues(null_model, obs);

    std::array<TrialOutcome, 4> per_proc;
    const auto record = [&](int proc, const SelectionResult& sel) {
      per_proc[static_cast<std::size_t>(proc)].m = kSamples;
      per_proc[static_cast<std::size_t>(proc)].m1 = m1;
      per_proc[static_cast<std::size_t>(proc)].counts =
          tally(labels, sel.selected);
      per_proc[static_cast<std::size_t>(proc)].messages = kSamples;
    };
    record(0, bayes_oracle_select(obs, pv.sensor_ids, null_model, alt_model,
                                  sparsity));
    record(1, dtbh_select(dt, pv, kGamma, transform_rng));
    record(2, bh_select(pv, kGamma));
    record(3, uncorrected_select(pv, kUncorrectedLevel));
    return per_proc;
  };

  const auto flat =
      parallel_map<std::array<TrialOutcome, 4>>(total, jobs, one);
  for (auto& vec : run.outcomes) {
    vec.resize(static_cast<std::size_t>(total));
  }
  for (int idx = 0; idx < total; ++idx) {
    for (std::size_t p = 0; p < 4; ++p) {
      run.outcomes[p][static_cast<std::size_t>(idx)] =
          flat[static_cast<std::size_t>(idx)][p];
    }
  }
  return run;
}

CurveSummary summarize_curve(const SparsityRun& run, std::size_t proc,
                             const std::function<double(const TrialOutcome&)>&
                                 metric) {
  CurveSummary curve;
  curve.procedure = kSparsityProcedures[proc];
  const int levels = static_cast<int>(run.sparsities.size());
  for (int level = 0; level < levels; ++level) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(run.trials));
    for (int t = 0; t < run.trials; ++t) {
      values.push_back(metric(
          run.outcomes[proc][static_cast<std::size_t>(level * run.trials + t)]));
    }
    curve.x.push_back(run.sparsities[static_cast<std::size_t>(level)]);
    curve.mean.push_back(mean_of(values));
    curve.se.push_back(stderr_of(values));
  }
  return curve;
}

void write_curve_csv(const std::string& out_dir, const std::string& filename,
                     const std::string& header,
                     const std::vector<CurveSummary>& curves) {
  if (out_dir.empty()) return;
  std::string csv = header + "\n";
  const std::size_t levels = curves.front().x.size();
  for (std::size_t level = 0; level < levels; ++level) {
    for (const auto& curve : curves) {
      csv += csv_row({csv_number(curve.x[level]), curve.procedure,
                      csv_number(curve.mean[level]),
                      csv_number(curve.se[level])});
    }
  }
  write_text_file(fs::path(out_dir) / filename, csv);
}

}  // namespace

SparsityFigure reproduce_fig2(double scale, const std::string& out_dir,
                              std::uint64_t master_seed, int jobs) {
  const SparsityRun run = run_sparsity_design(scale, master_seed, jobs);
  const auto errors = [](const TrialOutcome& o) {
    return static_cast<double>(o.counts.v + o.counts.t);
  };
  SparsityFigure fig;
  fig.trials = run.trials;
  for (std::size_t p = 0; p < 4; ++p) {
    fig.curves.push_back(summarize_curve(run, p, errors));
  }
  write_curve_csv(out_dir, "fig2.csv",
                  "sparsity,procedure,mean_errors,stderr_errors", fig.curves);
  return fig;
}

SparsityFigure reproduce_fig10(double scale, const std::string& out_dir,
                               std::uint64_t master_seed, int jobs) {
  const SparsityRun run = run_sparsity_design(scale, master_seed, jobs);
  const auto power = [](const TrialOutcome& o) {
    return o.m1 > 0 ? static_cast<double>(o.counts.s) / o.m1 : 0.0;
  };
  SparsityFigure fig;
  fig.trials = run.trials;
  fig.curves.push_back(summarize_curve(run, 2, power));  // bh
  fig.curves.push_back(summarize_curve(run, 1, power));  // dtbh
  write_curve_csv(out_dir, "fig10.csv",
                  "sparsity,procedure,mean_power,stderr_power", fig.curves);
  return fig;
}

AdaptiveFigure reproduce_fig11(double scale, const std::string& out_dir,
                               std::uint64_t master_seed, int jobs) {
  check_scale(scale);
  constexpr int kSamples = 100;
  constexpr int kAlternates = 30;
  constexpr double kGamma = 0.15;
  constexpr int kPreset = 10;
  const int trials = scaled_trials(scale, 1000, 100);

  const DensityModel null_model = DensityModel::gaussian(0.0, 1.0);
  // Mid-strength alternates: the fixed schedule saturates below full power,
  // leaving room for the adaptive one to re-inflate its thresholds.
  const DensityModel alt_model = DensityModel::gaussian(0.0, 0.02);
  const DomainTransform dt = build_domain_transform(
      pvalue_density_under_alternative(null_model, alt_model));

  struct PairedTrial {
    int fixed_s = 0;
    int adaptive_s = 0;
    long long fixed_messages = 0;
    long long adaptive_messages = 0;
  };

  const auto one = [&](int trial) {
    RandomStream draw_rng(master_seed, static_cast<std::uint64_t>(trial), 0);
    RandomStream transform_rng(master_seed, static_cast<std::uint64_t>(trial),
                               1);
    std::vector<double> obs(kSamples);
    std::vector<bool> labels(kSamples);
    for (int i = 0; i < kSamples; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      labels[ui] = i < kAlternates;
      obs[ui] = labels[ui] ? alt_model.sample1(draw_rng)
                           : null_model.sample1(draw_rng);
    }
    const PValueVector pv = survival_pvalues(null_model, obs);
    const PValueVector tv = transform_pvalues(dt, pv, transform_rng);

    ProtocolConfig pc;
    pc.gamma = kGamma;
    pc.k_preset = kPreset;
    const ProtocolResult fixed = run_distributed(tv, pc);
    pc.dynamic = true;
    const ProtocolResult adaptive = run_dynamic(tv, pc);

    PairedTrial out;
    out.fixed_s = true_detections(labels, fixed.selected);
    out.adaptive_s = true_detections(labels, adaptive.selected);
    out.fixed_messages = fixed.trace.messages;
    out.adaptive_messages = adaptive.trace.messages;
    return out;
  };

  const auto paired = parallel_map<PairedTrial>(trials, jobs, one);

  AdaptiveFigure fig;
  fig.trials = trials;
  for (const auto& p : paired) {
    if (p.adaptive_s >= p.fixed_s) ++fig.adaptive_at_least_fixed;
    fig.mean_fixed_detections += p.fixed_s;
    fig.mean_adaptive_detections += p.adaptive_s;
    fig.mean_fixed_messages += static_cast<double>(p.fixed_messages);
    fig.mean_adaptive_messages += static_cast<double>(p.adaptive_messages);
  }
  const double n = static_cast<double>(trials);
  fig.mean_fixed_detections /= n;
  fig.mean_adaptive_detections /= n;
  fig.mean_fixed_messages /= n;
  fig.mean_adaptive_messages /= n;

  if (!out_dir.empty()) {
    std::string csv =
        "trial,fixed_detections,adaptive_detections,fixed_messages,"
        "adaptive_messages\n";
    for (std::size_t i = 0; i < paired.size(); ++i) {
      csv += csv_row({csv_number(static_cast<long long>(i)),
                      csv_number(static_cast<long long>(paired[i].fixed_s)),
                      csv_number(static_cast<long long>(paired[i].adaptive_s)),
                      csv_number(paired[i].fixed_messages),
                      csv_number(paired[i].adaptive_messages)});
    }
    write_text_file(fs::path(out_dir) / "fig11.csv", csv);
  }
  return fig;
}

namespace {

// Deterministic bound on how much the additive interference term inflates
// null p-values relative to uniform, maximized over the step-up threshold
// range {i * gamma / m}. Uses composite Simpson integration over the
// interference offset.
double null_inflation_bound(const Scenario& sc, double gamma) {
  const DensityModel null_model = assumed_null(sc);
  const double lo = sc.nonideal_xi_range.lo;
  const double hi = sc.nonideal_xi_range.hi;
  if (!(hi > lo)) return 0.0;
  const int m = sc.sensor_count();
  constexpr int kPanels = 64;  // Simpson panels over the offset range
  double bound = 0.0;
  for (int i = 1; i <= m; ++i) {
    const double x = gamma * i / m;
    if (x >= 1.0) break;
    const double z = null_model.quantile(1.0 - x);
    double integral = 0.0;
    const double h = (hi - lo) / kPanels;
    for (int k = 0; k <= kPanels; ++k) {
      const double u = lo + h * k;
      const double f = survival_pvalue(null_model, z - u);
      const double w = (k == 0 || k == kPanels) ? 1.0
                       : (k % 2 == 1)           ? 4.0
                                                : 2.0;
      integral += w * f;
    }
    integral *= h / 3.0;
    const double inflated = integral / (hi - lo);
    bound = std::max(bound, inflated / x - 1.0);
  }
  return std::max(bound, 0.0);
}

BudgetFigure run_budget_figure(bool nonideal, double scale,
                               const std::string& out_dir,
                               std::uint64_t master_seed, int jobs) {
  check_scale(scale);
  constexpr double kGamma = 0.15;
  constexpr int kPreset = 10;
  const int side =
      std::max(10, static_cast<int>(std::lround(100.0 * std::sqrt(scale))));
  const int objects = std::max(1, static_cast<int>(std::lround(10.0 * scale)));

  Scenario sc;
  sc.grid_width = side;
  sc.grid_height = side;
  sc.num_objects = objects;
  sc.sensing = nonideal ? SensingMode::nonideal : SensingMode::ideal;
  sc.validate();

  // Full-scale budgets are message counts tuned to roughly 10 objects'
  // worth of alternates; scaled runs shrink them by the object ratio.
  std::vector<long long> budgets;
  for (long long full : {150LL, 200LL}) {
    budgets.push_back(
        std::max(5LL, std::llround(full * objects / 10.0)));
  }
  const int trials = scaled_trials(scale, 50, 20);

  const DensityModel null_model = assumed_null(sc);
  const DomainTransform dt = build_domain_transform(
      pvalue_density_under_alternative(null_model, assumed_alt(sc)));

  constexpr std::array<const char*, 3> kProcs = {"bh", "dtbh", "dtbh_dynamic"};
  struct BudgetTrial {
    int m1 = 0;
    // [budget][procedure]
    std::array<std::array<ConfusionCounts, 3>, 2> counts;
    std::array<std::array<long long, 3>, 2> messages{};
  };

  const auto protocols_for = [&](const PValueVector& pv,
                                 const PValueVector& tv, long long budget) {
    ProtocolConfig pc;
    pc.gamma = kGamma;
    pc.k_preset = kPreset;
    pc.budget = budget;
    std::array<ProtocolResult, 3> res;
    res[0] = run_distributed(pv, pc);  // raw p-values
    res[1] = run_distributed(tv, pc);  // transformed
    pc.dynamic = true;
    res[2] = run_dynamic(tv, pc);
    return res;
  };

  const auto one = [&](int trial) {
    RandomStream field_rng(master_seed, static_cast<std::uint64_t>(trial), 0);
    const FieldRealization field = sample_field(sc, field_rng);
    const PValueVector pv = survival_pvalues(null_model, field.observations);
    RandomStream transform_rng(master_seed,
                               static_cast<std::uint64_t>(trial), 1);
    const PValueVector tv = transform_pvalues(dt, pv, transform_rng);

    BudgetTrial out;
    out.m1 = field.m1();
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      const auto res = protocols_for(pv, tv, budgets[b]);
      for (std::size_t p = 0; p < 3; ++p) {
        out.counts[b][p] = tally(field.labels, res[p].selected);
        out.messages[b][p] = res[p].trace.messages;
      }
    }
    return out;
  };

  const auto all = parallel_map<BudgetTrial>(trials, jobs, one);

  BudgetFigure fig;
  fig.trials = trials;
  for (const auto& t : all) fig.mean_m1 += t.m1;
  fig.mean_m1 /= static_cast<double>(trials);
  fig.epsilon_bound = nonideal ? null_inflation_bound(sc, kGamma) : 0.0;

  for (std::size_t b = 0; b < budgets.size(); ++b) {
    for (std::size_t p = 0; p < 3; ++p) {
      std::vector<double> fdps;
      BudgetCell cell;
      cell.budget = budgets[b];
      cell.procedure = kProcs[p];
      for (const auto& t : all) {
        cell.mean_true_detections += t.counts[b][p].s;
        fdps.push_back(fdp(t.counts[b][p]));
        cell.mean_messages += static_cast<double>(t.messages[b][p]);
      }
      cell.mean_true_detections /= static_cast<double>(trials);
      cell.mean_messages /= static_cast<double>(trials);
      cell.mean_fdp = mean_of(fdps);
      cell.stderr_fdp = stderr_of(fdps);
      fig.cells.push_back(cell);
    }
  }

  if (!out_dir.empty()) {
    const std::string prefix = nonideal ? "fig13" : "fig12";
    std::string summary =
        "budget,procedure,mean_true_detections,mean_fdp,mean_messages\n";
    for (const auto& cell : fig.cells) {
      summary += csv_row({csv_number(cell.budget), cell.procedure,
                          csv_number(cell.mean_true_detections),
                          csv_number(cell.mean_fdp),
                          csv_number(cell.mean_messages)});
    }
    write_text_file(fs::path(out_dir) / (prefix + "_summary.csv"), summary);

    // Detection maps for the first realization at each budget.
    RandomStream field_rng(master_seed, 0, 0);
    const FieldRealization field0 = sample_field(sc, field_rng);
    const PValueVector pv = survival_pvalues(null_model, field0.observations);
    RandomStream transform_rng(master_seed, 0, 1);
    const PValueVector tv = transform_pvalues(dt, pv, transform_rng);
    for (const long long budget : budgets) {
      const auto res = protocols_for(pv, tv, budget);
      std::array<std::vector<bool>, 3> chosen;
      for (std::size_t p = 0; p < 3; ++p) {
        chosen[p].assign(field0.sensor_positions.size(), false);
        for (int id : res[p].selected) {
          chosen[p][static_cast<std::size_t>(id)] = true;
        }
      }
      std::string map_csv =
          "x,y,label,bh_selected,dtbh_selected,dynamic_selected\n";
      for (std::size_t i = 0; i < field0.sensor_positions.size(); ++i) {
        map_csv += csv_row(
            {csv_number(field0.sensor_positions[i].x()),
             csv_number(field0.sensor_positions[i].y()),
             csv_number(static_cast<long long>(field0.labels[i] ? 1 : 0)),
             csv_number(static_cast<long long>(chosen[0][i] ? 1 : 0)),
             csv_number(static_cast<long long>(chosen[1][i] ? 1 : 0)),
             csv_number(static_cast<long long>(chosen[2][i] ? 1 : 0))});
      }
      write_text_file(fs::path(out_dir) / (prefix + "_map_budget" +
                                           std::to_string(budget) + ".csv"),
                      map_csv);
    }
  }
  return fig;
}

}  // namespace

BudgetFigure reproduce_fig12(double scale, const std::string& out_dir,
                             std::uint64_t master_seed, int jobs) {
  return run_budget_figure(false, scale, out_dir, master_seed, jobs);
}

BudgetFigure reproduce_fig13(double scale, const std::string& out_dir,
                             std::uint64_t master_seed, int jobs) {
  return run_budget_figure(true, scale, out_dir, master_seed, jobs);
}

void reproduce_figure(const std::string& figure, double scale,
                      const std::string& out_dir, std::uint64_t master_seed,
                      int jobs) {
  if (figure == "fig2") {
    reproduce_fig2(scale, out_dir, master_seed, jobs);
  } else if (figure == "fig10") {
    reproduce_fig10(scale, out_dir, master_seed, jobs);
  } else if (figure == "fig11") {
    reproduce_fig11(scale, out_dir, master_seed, jobs);
  } else if (figure == "fig12") {
    reproduce_fig12(scale, out_dir, master_seed, jobs);
  } else if (figure == "fig13") {
    reproduce_fig13(scale, out_dir, master_seed, jobs);
  } else {
    throw ConfigError("unknown figure '" + figure +
                      "' (expected fig2, fig10, fig11, fig12 or fig13)");
  }
}

}  // namespace dtbh
