#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtbh/metrics.hpp"
#include "dtbh/snet.hpp"

namespace dtbh {

// Selection rules the harness can run on a sampled field. The two
// `distributed` entries execute the broadcast protocol on the transformed
// p-values (fixed and adaptive threshold schedules respectively); the other
// four are centralized and charge one message per sensor.
enum class Procedure {
  bh,
  dtbh,
  uncorrected,
  oracle,
  distributed,
  distributed_dynamic,
};

Procedure parse_procedure(const std::string& name);
std::string procedure_name(Procedure p);

struct ExperimentConfig {
  Scenario scenario;
  Procedure procedure = Procedure::dtbh;
  double gamma = 0.15;
  // Per-sensor level for Procedure::uncorrected (independent of gamma).
  double uncorrected_level = 0.01;
  // When set, step-up levels are deflated to gamma / (1 + epsilon) so FDR
  // stays at gamma under an epsilon-perturbed null.
  std::optional<double> epsilon;
  int k_preset = 0;
  std::optional<long long> budget;
  int trials = 100;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  int transform_resolution = 0;  // 0 = library default
  std::string output_path;       // CSV directory; empty = in-memory only

  void validate() const;
  double effective_level() const;
};

struct ExperimentResult {
  MonteCarloSummary summary;
  std::vector<TrialOutcome> outcomes;  // one record per trial, in order
};

// Runs `trials` independent field realizations and applies the configured
// procedure to each. With a non-empty output_path, writes trials.csv
// (trial,m1,u,v,t,s,r,fdp,power,messages), summary.csv
// (procedure,gamma,m,m1,trials,mean_fdp,stderr_fdp,mean_power,mean_messages)
// and field0.csv (x,y,label,observation for the first realization).
// The master seed fully determines every output regardless of `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Sweep over null-perturbation strengths: for each epsilon the nulls are
// drawn from the extremal band family, the alternates from the narrow-bump
// example (observations N(0, 0.01) tested against N(0, 1)), and the
// transformed step-up rule runs at the deflated level gamma / (1 + epsilon).
struct SweepConfig {
  int m = 100;
  int m1 = 20;
  double gamma = 0.15;
  int trials = 2000;
  std::vector<double> epsilons = {0.0, 0.05, 0.1, 0.2, 0.3};
  std::uint64_t master_seed = 1;
  int jobs = 1;
  std::string output_path;  // writes sweep.csv when non-empty
};

struct SweepRow {
  double epsilon = 0.0;
  double gamma_adjusted = 0.0;
  double empirical_fdr = 0.0;
  double detections = 0.0;  // mean correct declarations per trial
};

std::vector<SweepRow> run_epsilon_sweep(const SweepConfig& config);

// ---------------------------------------------------------------------------
// Figure-reproduction recipes. `scale` in (0, 1] shrinks grids and trial
// counts proportionally; an empty out_dir skips file output. Every recipe is
// fully determined by (scale, master_seed).

struct CurveSummary {
  std::string procedure;
  std::vector<double> x;     // sparsity levels
  std::vector<double> mean;  // metric mean at each level
  std::vector<double> se;    // standard error of that mean
};

struct SparsityFigure {
  std::vector<CurveSummary> curves;
  int trials = 0;  // per sparsity level
};

// Error-vs-sparsity curves (metric: missed alternates + false declarations)
// for oracle / transformed step-up / plain step-up / uncorrected testing on
// m=100 samples, null N(0,1) vs alternative N(0,3). Writes fig2.csv
// (sparsity,procedure,mean_errors,stderr_errors).
SparsityFigure reproduce_fig2(double scale, const std::string& out_dir,
                              std::uint64_t master_seed = 1, int jobs = 1);

// Detection-power-vs-sparsity curves for the plain and transformed step-up
// rules on the same sampling design. Writes fig10.csv
// (sparsity,procedure,mean_power,stderr_power).
SparsityFigure reproduce_fig10(double scale, const std::string& out_dir,
                               std::uint64_t master_seed = 1, int jobs = 1);

// Fixed vs adaptive threshold schedules on a dense field (m=100, m1=30,
// mid-strength alternates): the adaptive variant re-inflates levels as
// declarations accumulate. Writes fig11.csv
// (trial,fixed_detections,adaptive_detections,fixed_messages,adaptive_messages).
struct AdaptiveFigure {
  int trials = 0;
  int adaptive_at_least_fixed = 0;  // trials with adaptive detections >= fixed
  double mean_fixed_detections = 0.0;
  double mean_adaptive_detections = 0.0;
  double mean_fixed_messages = 0.0;
  double mean_adaptive_messages = 0.0;
};

AdaptiveFigure reproduce_fig11(double scale, const std::string& out_dir,
                               std::uint64_t master_seed = 1, int jobs = 1);

// Budgeted broadcast runs of the sensor-field scenario: raw p-values ("bh"),
// transformed p-values ("dtbh"), and the adaptive-threshold variant
// ("dtbh_dynamic") at each communication budget. Writes
// fig1X_summary.csv (budget,procedure,mean_true_detections,mean_fdp,
// mean_messages) and one detection map per budget for the first trial
// (x,y,label,bh_selected,dtbh_selected,dynamic_selected).
struct BudgetCell {
  long long budget = 0;
  std::string procedure;
  double mean_true_detections = 0.0;
  double mean_fdp = 0.0;
  double stderr_fdp = 0.0;
  double mean_messages = 0.0;
};

struct BudgetFigure {
  std::vector<BudgetCell> cells;
  double mean_m1 = 0.0;
  int trials = 0;
  // Non-ideal sensing only: deterministic bound on the relative inflation of
  // null p-values over the step-up threshold range (0 for ideal sensing).
  double epsilon_bound = 0.0;
};

BudgetFigure reproduce_fig12(double scale, const std::string& out_dir,
                             std::uint64_t master_seed = 1, int jobs = 1);
BudgetFigure reproduce_fig13(double scale, const std::string& out_dir,
                             std::uint64_t master_seed = 1, int jobs = 1);

// Dispatcher for the CLI: figure is one of fig2, fig10, fig11, fig12, fig13.
void reproduce_figure(const std::string& figure, double scale,
                      const std::string& out_dir,
                      std::uint64_t master_seed = 1, int jobs = 1);

}  // namespace dtbh
