#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dtbh/experiment.hpp"
#include "dtbh/metrics.hpp"

using dtbh::ConfigError;
using dtbh::ExperimentConfig;
using dtbh::Point;
using dtbh::Procedure;
using dtbh::Scenario;

namespace {

// 10x10 grid, one object pinned interior: the 2.5-pixel disk around (4,4)
// covers exactly 21 lattice sensors, so every trial has m1 = 21.
Scenario strong_scenario() {
  Scenario sc;
  sc.grid_width = 10;
  sc.grid_height = 10;
  sc.num_objects = 1;
  sc.object_positions = std::vector<Point>{Point(4.0, 4.0)};
  return sc;
}

Scenario all_null_scenario() {
  Scenario sc;
  sc.grid_width = 10;
  sc.grid_height = 10;
  sc.num_objects = 0;
  return sc;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) fields.push_back(f);
  return fields;
}

bool same_outcomes(const std::vector<dtbh::TrialOutcome>& a,
                   const std::vector<dtbh::TrialOutcome>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].m != b[i].m || a[i].m1 != b[i].m1) return false;
    if (a[i].counts.u != b[i].counts.u || a[i].counts.v != b[i].counts.v ||
        a[i].counts.t != b[i].counts.t || a[i].counts.s != b[i].counts.s) {
      return false;
    }
    if (a[i].messages != b[i].messages) return false;
  }
  return true;
}

const dtbh::BudgetCell& cell_of(const dtbh::BudgetFigure& fig,
                                long long budget, const std::string& proc) {
  for (const auto& c : fig.cells) {
    if (c.budget == budget && c.procedure == proc) return c;
  }
  REQUIRE(false);
  return fig.cells.front();
}

}  // namespace

TEST_CASE("centralized run is deterministic and fully accounted") {
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();
  cfg.procedure = Procedure::dtbh;
  cfg.gamma = 0.15;
  cfg.trials = 30;
  cfg.master_seed = 5;
  const auto r1 = dtbh::run_experiment(cfg);
  const auto r2 = dtbh::run_experiment(cfg);
  CHECK(same_outcomes(r1.outcomes, r2.outcomes));
  REQUIRE(r1.outcomes.size() == 30);
  for (const auto& o : r1.outcomes) {
    CHECK(o.m == 100);
    CHECK(o.m1 == 21);
    CHECK(o.messages == 100.0);  // centralized: one report per sensor
    CHECK(o.counts.u + o.counts.v + o.counts.t + o.counts.s == 100);
  }
  CHECK(r1.summary.trials == 30);
  CHECK(r1.summary.mean_detections > 18.0);
  CHECK(r1.summary.mean_fdp < 0.3);
}

TEST_CASE("summary equals a direct reduction of the outcomes") {
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();
  cfg.procedure = Procedure::bh;
  cfg.trials = 25;
  cfg.master_seed = 6;
  const auto r = dtbh::run_experiment(cfg);
  const auto direct = dtbh::summarize(r.outcomes);
  CHECK(r.summary.mean_fdp == direct.mean_fdp);
  CHECK(r.summary.stderr_fdp == direct.stderr_fdp);
  CHECK(r.summary.mean_detections == direct.mean_detections);
  CHECK(r.summary.mean_messages == direct.mean_messages);
}

TEST_CASE("uncorrected and oracle procedures behave sanely") {
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();
  cfg.trials = 40;
  cfg.master_seed = 7;

  cfg.procedure = Procedure::uncorrected;
  cfg.uncorrected_level = 0.01;
  const auto unc = dtbh::run_experiment(cfg);
  // 79 nulls at per-test level 0.01: about 0.8 false alarms per trial.
  double mean_v = 0.0;
  for (const auto& o : unc.outcomes) mean_v += o.counts.v;
  mean_v /= static_cast<double>(unc.outcomes.size());
  CHECK(mean_v > 0.2);
  CHECK(mean_v < 2.5);

  cfg.procedure = Procedure::oracle;
  const auto orc = dtbh::run_experiment(cfg);
  CHECK(orc.summary.mean_detections > 20.5);  // near-perfect separation
}

TEST_CASE("budgeted protocol truncates messages and stays deterministic") {
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();
  cfg.procedure = Procedure::distributed;
  cfg.gamma = 0.15;
  cfg.k_preset = 10;
  cfg.budget = 8;
  cfg.trials = 25;
  cfg.master_seed = 8;
  cfg.jobs = 1;
  const auto serial = dtbh::run_experiment(cfg);
  cfg.jobs = 4;
  const auto parallel = dtbh::run_experiment(cfg);
  CHECK(same_outcomes(serial.outcomes, parallel.outcomes));
  for (const auto& o : serial.outcomes) {
    CHECK(o.messages <= 8.0);
    CHECK(o.counts.v + o.counts.s <= 8);
  }
}

TEST_CASE("protocol messages count broadcasts, not sensors") {
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();
  cfg.procedure = Procedure::distributed;
  cfg.gamma = 0.15;
  cfg.k_preset = 10;
  cfg.trials = 20;
  cfg.master_seed = 9;
  const auto r = dtbh::run_experiment(cfg);
  for (const auto& o : r.outcomes) {
    CHECK(o.messages < 100.0);
    CHECK(o.messages >= static_cast<double>(o.counts.v + o.counts.s));
  }
  CHECK(r.summary.mean_detections > 18.0);
}

TEST_CASE("per-trial and aggregate CSV files freeze their schemas") {
  const std::filesystem::path dir = "/tmp/dtbh_exp_csv";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();
  cfg.procedure = Procedure::dtbh;
  cfg.gamma = 0.15;
  cfg.trials = 4;
  cfg.master_seed = 10;
  cfg.output_path = dir.string();
  (void)dtbh::run_experiment(cfg);

  const auto trials_text = read_file(dir / "trials.csv");
  const auto trials_lines = split_lines(trials_text);
  REQUIRE(trials_lines.size() == 5);
  CHECK(trials_lines[0] == "trial,m1,u,v,t,s,r,fdp,power,messages");
  const auto row = split_fields(trials_lines[1]);
  REQUIRE(row.size() == 10);
  CHECK(row[0] == "0");
  CHECK(row[1] == "21");
  const int u = std::stoi(row[2]), v = std::stoi(row[3]);
  const int t = std::stoi(row[4]), s = std::stoi(row[5]);
  CHECK(u + v + t + s == 100);
  CHECK(std::stoi(row[6]) == v + s);
  const double fdp = std::stod(row[7]);
  if (v + s > 0) {
    CHECK(fdp == doctest::Approx(static_cast<double>(v) / (v + s)));
  }
  CHECK(std::stod(row[8]) == doctest::Approx(s / 21.0));
  CHECK(row[9] == "100");

  const auto summary_lines = split_lines(read_file(dir / "summary.csv"));
  REQUIRE(summary_lines.size() == 2);
  CHECK(summary_lines[0] ==
        "procedure,gamma,m,m1,trials,mean_fdp,stderr_fdp,mean_power,"
        "mean_messages");
  CHECK(summary_lines[1].rfind("dtbh,0.15,100,21,4,", 0) == 0);

  const auto field_lines = split_lines(read_file(dir / "field0.csv"));
  REQUIRE(field_lines.size() == 101);
  CHECK(field_lines[0] == "x,y,label,observation");

  // Same seed, same bytes.
  (void)dtbh::run_experiment(cfg);
  CHECK(read_file(dir / "trials.csv") == trials_text);
  std::filesystem::remove_all(dir);
}

TEST_CASE("epsilon deflates the running level on an all-null field") {
  ExperimentConfig cfg;
  cfg.scenario = all_null_scenario();
  cfg.procedure = Procedure::bh;
  cfg.gamma = 0.15;
  cfg.trials = 2000;
  cfg.master_seed = 11;
  const auto plain = dtbh::run_experiment(cfg);
  cfg.epsilon = 0.3;
  const auto deflated = dtbh::run_experiment(cfg);
  // All-null step-up rejects with probability equal to its running level.
  CHECK(plain.summary.mean_fdp > 0.12);
  CHECK(plain.summary.mean_fdp < 0.18);
  CHECK(deflated.summary.mean_fdp > 0.085);
  CHECK(deflated.summary.mean_fdp < 0.145);
  CHECK(deflated.summary.mean_fdp < plain.summary.mean_fdp);
}

TEST_CASE("invalid experiment configurations are rejected") {
  ExperimentConfig cfg;
  cfg.scenario = strong_scenario();

  cfg.trials = 0;
  CHECK_THROWS_AS(dtbh::run_experiment(cfg), ConfigError);
  cfg.trials = 10;

  cfg.gamma = 0.0;
  CHECK_THROWS_AS(dtbh::run_experiment(cfg), ConfigError);
  cfg.gamma = 0.15;

  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(dtbh::run_experiment(cfg), ConfigError);
  cfg.epsilon.reset();

  cfg.k_preset = -1;
  CHECK_THROWS_AS(dtbh::run_experiment(cfg), ConfigError);
  cfg.k_preset = 0;

  cfg.budget = -5;
  CHECK_THROWS_AS(dtbh::run_experiment(cfg), ConfigError);
}

TEST_CASE("epsilon sweep deflates levels and stays controlled") {
  dtbh::SweepConfig sw;
  sw.m = 100;
  sw.m1 = 20;
  sw.gamma = 0.15;
  sw.trials = 600;
  sw.epsilons = {0.0, 0.3};
  sw.master_seed = 11;
  const std::filesystem::path dir = "/tmp/dtbh_sweep_csv";
  std::filesystem::remove_all(dir);
  sw.output_path = dir.string();
  const auto rows = dtbh::run_epsilon_sweep(sw);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].epsilon == 0.0);
  CHECK(rows[0].gamma_adjusted == doctest::Approx(0.15));
  CHECK(rows[1].gamma_adjusted == doctest::Approx(0.15 / 1.3));
  for (const auto& r : rows) {
    CHECK(r.empirical_fdr <= 0.15 * 0.8 + 0.05);  // deflation compensates
    CHECK(r.detections >= 16.0);                   // bump alternates found
  }
  const auto lines = split_lines(read_file(dir / "sweep.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "epsilon,gamma_adjusted,empirical_fdr,detections");
  std::filesystem::remove_all(dir);
}

TEST_CASE("adaptive schedule dominates the fixed one trial by trial") {
  const std::filesystem::path dir = "/tmp/dtbh_fig11_csv";
  std::filesystem::remove_all(dir);
  const auto af = dtbh::reproduce_fig11(0.05, dir.string(), 3);
  CHECK(af.trials == 100);
  CHECK(af.adaptive_at_least_fixed >= 90);
  CHECK(af.mean_adaptive_detections >= af.mean_fixed_detections);
  CHECK(af.mean_adaptive_messages >= af.mean_fixed_messages);
  const auto lines = split_lines(read_file(dir / "fig11.csv"));
  REQUIRE(lines.size() == 101);
  CHECK(lines[0] ==
        "trial,fixed_detections,adaptive_detections,fixed_messages,"
        "adaptive_messages");
  std::filesystem::remove_all(dir);
}

TEST_CASE("adaptive dominance holds in at least 95 percent of full runs") {
  const auto af = dtbh::reproduce_fig11(1.0, "", 17);
  CHECK(af.trials == 1000);
  CHECK(af.adaptive_at_least_fixed >= 950);
  CHECK(af.mean_adaptive_detections > af.mean_fixed_detections);
}

TEST_CASE("sparsity figure emits one curve per procedure") {
  const std::filesystem::path dir = "/tmp/dtbh_fig2_csv";
  std::filesystem::remove_all(dir);
  const auto fig = dtbh::reproduce_fig2(0.1, dir.string(), 3);
  CHECK(fig.trials == 40);
  REQUIRE(fig.curves.size() == 4);
  CHECK(fig.curves[0].procedure == "oracle");
  CHECK(fig.curves[1].procedure == "dtbh");
  CHECK(fig.curves[2].procedure == "bh");
  CHECK(fig.curves[3].procedure == "uncorrected");
  for (const auto& c : fig.curves) {
    REQUIRE(c.x.size() == 10);
    CHECK(c.x.front() == doctest::Approx(0.05));
    CHECK(c.x.back() == doctest::Approx(0.5));
    REQUIRE(c.mean.size() == 10);
    REQUIRE(c.se.size() == 10);
  }
  // The clairvoyant reference beats the plain step-up rule by a wide margin
  // at every sparsity level (slack: three combined standard errors).
  for (std::size_t j = 0; j < 10; ++j) {
    const double slack =
        3.0 * (fig.curves[0].se[j] + fig.curves[2].se[j]);
    CHECK(fig.curves[0].mean[j] <= fig.curves[2].mean[j] + slack);
  }
  const auto lines = split_lines(read_file(dir / "fig2.csv"));
  REQUIRE(lines.size() == 41);
  CHECK(lines[0] == "sparsity,procedure,mean_errors,stderr_errors");
  std::filesystem::remove_all(dir);
}

TEST_CASE("budget figure reproduces the ideal-sensing contrast") {
  const auto fig = dtbh::reproduce_fig12(0.09, "", 1);
  CHECK(fig.trials == 20);
  REQUIRE(fig.cells.size() == 6);  // {15, 20} x {bh, dtbh, dtbh_dynamic}
  CHECK(fig.mean_m1 > 10.0);
  CHECK(fig.mean_m1 < 22.0);
  CHECK(fig.epsilon_bound == 0.0);
  const auto& bh_small = cell_of(fig, 15, "bh");
  const auto& dt_small = cell_of(fig, 15, "dtbh");
  CHECK(bh_small.mean_true_detections < 1.0);
  CHECK(dt_small.mean_true_detections > bh_small.mean_true_detections + 3.0);
  for (const auto& c : fig.cells) {
    CHECK(c.mean_messages <= static_cast<double>(c.budget));
  }
}

TEST_CASE("budget figure reproduces the non-ideal-sensing contrast") {
  const std::filesystem::path dir = "/tmp/dtbh_fig13_csv";
  std::filesystem::remove_all(dir);
  const auto fig = dtbh::reproduce_fig13(0.09, dir.string(), 1);
  CHECK(fig.epsilon_bound > 0.05);
  CHECK(fig.epsilon_bound < 0.5);
  CHECK(cell_of(fig, 15, "bh").mean_true_detections < 0.5);
  CHECK(cell_of(fig, 20, "bh").mean_true_detections < 0.5);
  CHECK(cell_of(fig, 20, "dtbh").mean_true_detections > 2.0);

  const auto summary_lines = split_lines(read_file(dir / "fig13_summary.csv"));
  REQUIRE(summary_lines.size() == 7);
  CHECK(summary_lines[0] ==
        "budget,procedure,mean_true_detections,mean_fdp,mean_messages");
  const auto map_lines = split_lines(read_file(dir / "fig13_map_budget20.csv"));
  REQUIRE(map_lines.size() == 901);
  CHECK(map_lines[0] == "x,y,label,bh_selected,dtbh_selected,dynamic_selected");
  std::filesystem::remove_all(dir);
}

TEST_CASE("figure dispatcher writes the requested bundle") {
  const std::filesystem::path dir = "/tmp/dtbh_fig10_csv";
  std::filesystem::remove_all(dir);
  dtbh::reproduce_figure("fig10", 0.05, dir.string(), 4);
  const auto lines = split_lines(read_file(dir / "fig10.csv"));
  CHECK(lines[0] == "sparsity,procedure,mean_power,stderr_power");
  REQUIRE(lines.size() == 21);  // 10 sparsity levels x 2 procedures
  CHECK_THROWS_AS(dtbh::reproduce_figure("fig7", 1.0, dir.string()),
                  ConfigError);
  std::filesystem::remove_all(dir);
}
