#include "dtbh/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "dtbh/common.hpp"

namespace dtbh {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

template <typename T>
T parse_number_full(const std::string& raw, const char* what) {
  const std::string s = trim(raw);
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || s.empty()) {
    fail(std::string(what) + ": cannot parse number from '" + raw + "'");
  }
  return value;
}

// Splits at `sep` occurrences that sit outside any parentheses.
std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) fail("unbalanced ')' in '" + s + "'");
    if (c == sep && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (depth != 0) fail("unbalanced '(' in '" + s + "'");
  parts.push_back(cur);
  return parts;
}

struct DensityCall {
  std::string name;
  std::vector<std::string> args;
};

DensityCall parse_call(const std::string& spec) {
  const std::string s = trim(spec);
  const auto open = s.find('(');
  if (s.empty() || open == std::string::npos || s.back() != ')') {
    fail("density spec must look like name(args): '" + spec + "'");
  }
  DensityCall call;
  call.name = trim(s.substr(0, open));
  if (call.name.empty()) fail("density spec has no name: '" + spec + "'");
  const std::string body = s.substr(open + 1, s.size() - open - 2);
  if (trim(body).empty()) {
    fail("density '" + call.name + "' needs arguments");
  }
  for (auto& part : split_top_level(body, ',')) {
    call.args.push_back(trim(part));
  }
  return call;
}

void expect_arity(const DensityCall& call, std::size_t lo, std::size_t hi) {
  if (call.args.size() < lo || call.args.size() > hi) {
    fail("density '" + call.name + "' takes " + std::to_string(lo) +
         (hi == lo ? "" : ".." + std::to_string(hi)) + " arguments, got " +
         std::to_string(call.args.size()));
  }
}

DensityModel parse_radial(const DensityCall& call) {
  expect_arity(call, 2, 4);
  if (call.args.size() == 3) {
    fail("radial2d takes either a scale or a scale plus both center "
         "coordinates");
  }
  const std::string kind = call.args[0];
  const double scale = parse_number_full<double>(call.args[1], "radial2d");
  if (!(scale > 0.0)) fail("radial2d scale must be positive");
  Point center(0.5, 0.5);
  if (call.args.size() == 4) {
    center = Point(parse_number_full<double>(call.args[2], "radial2d"),
                   parse_number_full<double>(call.args[3], "radial2d"));
  }
  std::function<double(double)> profile;
  if (kind == "gauss") {
    profile = [scale](double r) { return std::exp(-r * r / (2 * scale * scale)); };
  } else if (kind == "cone") {
    profile = [scale](double r) { return std::max(0.0, 1.0 - r / scale); };
  } else if (kind == "quad") {
    profile = [scale](double r) {
      return std::max(0.0, 1.0 - (r / scale) * (r / scale));
    };
  } else {
    fail("radial2d kind must be gauss, cone or quad, got '" + kind + "'");
  }
  return DensityModel::radial2d(std::move(profile), center);
}

DensityModel parse_mixture(const DensityCall& call) {
  std::vector<std::pair<double, DensityModel>> components;
  for (const auto& term : call.args) {
    const auto parts = split_top_level(term, '*');
    if (parts.size() != 2) {
      fail("mixture term must be weight*density: '" + term + "'");
    }
    const double w = parse_number_full<double>(parts[0], "mixture weight");
    components.emplace_back(w, parse_density(parts[1]));
  }
  return DensityModel::mixture(std::move(components));
}

}  // namespace

DensityModel parse_density(const std::string& spec) {
  const auto call = parse_call(spec);
  if (call.name == "gaussian") {
    expect_arity(call, 2, 2);
    return DensityModel::gaussian(
        parse_number_full<double>(call.args[0], "gaussian mean"),
        parse_number_full<double>(call.args[1], "gaussian stddev"));
  }
  if (call.name == "exponential") {
    expect_arity(call, 1, 1);
    return DensityModel::exponential(
        parse_number_full<double>(call.args[0], "exponential rate"));
  }
  if (call.name == "uniform") {
    expect_arity(call, 1, 1);
    return DensityModel::uniform_cube(
        parse_number_full<int>(call.args[0], "uniform dimension"));
  }
  if (call.name == "shifted") {
    expect_arity(call, 2, 2);
    return DensityModel::shifted(
        parse_density(call.args[0]),
        parse_number_full<double>(call.args[1], "shift offset"));
  }
  if (call.name == "mixture") return parse_mixture(call);
  if (call.name == "radial2d") return parse_radial(call);
  fail("unknown density '" + call.name + "'");
}

bool ConfigMap::has(const std::string& key) const {
  return entries.count(key) > 0;
}

const std::string& ConfigMap::require(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) fail("missing config key '" + key + "'");
  return it->second;
}

std::string ConfigMap::get(const std::string& key,
                           const std::string& fallback) const {
  const auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  return parse_number_full<double>(it->second, key.c_str());
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  return parse_number_full<int>(it->second, key.c_str());
}

long long ConfigMap::get_long(const std::string& key, long long fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  return parse_number_full<long long>(it->second, key.c_str());
}

std::uint64_t ConfigMap::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  return parse_number_full<std::uint64_t>(it->second, key.c_str());
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string at = "config line " + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        fail(at + ": malformed section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(at + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(at + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(at + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.entries[full] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

std::vector<Point> parse_object_list(const std::string& raw) {
  std::vector<Point> points;
  for (const auto& entry : split_top_level(raw, ';')) {
    const auto coords = split_top_level(entry, ',');
    if (coords.size() != 2) {
      fail("object entry must be 'x,y': '" + trim(entry) + "'");
    }
    points.emplace_back(parse_number_full<double>(coords[0], "object x"),
                        parse_number_full<double>(coords[1], "object y"));
  }
  return points;
}

void reject_unknown_keys(const ConfigMap& cfg, const std::string& section,
                         const std::vector<std::string>& known) {
  const std::string prefix = section + ".";
  for (const auto& [key, value] : cfg.entries) {
    if (key.rfind(prefix, 0) != 0) continue;
    const std::string bare = key.substr(prefix.size());
    if (std::find(known.begin(), known.end(), bare) == known.end()) {
      fail("unknown key '" + bare + "' in [" + section + "]");
    }
  }
}

}  // namespace

Scenario scenario_from_config(const ConfigMap& cfg) {
  reject_unknown_keys(
      cfg, "scenario",
      {"grid_width", "grid_height", "num_objects", "objects", "r_eff", "theta",
       "decay_exp", "d0", "null_noise", "alt_noise", "sensing", "xi_min",
       "xi_max", "theta_min", "theta_max", "seed"});
  Scenario sc;
  sc.grid_width = cfg.get_int("scenario.grid_width", sc.grid_width);
  sc.grid_height = cfg.get_int("scenario.grid_height", sc.grid_height);
  if (cfg.has("scenario.objects")) {
    sc.object_positions = parse_object_list(cfg.require("scenario.objects"));
    sc.num_objects = static_cast<int>(sc.object_positions->size());
  }
  // An explicit num_objects wins; a mismatch with the list fails validation.
  sc.num_objects = cfg.get_int("scenario.num_objects", sc.num_objects);
  sc.r_eff = cfg.get_double("scenario.r_eff", sc.r_eff);
  sc.theta = cfg.get_double("scenario.theta", sc.theta);
  sc.decay_exp = cfg.get_double("scenario.decay_exp", sc.decay_exp);
  if (cfg.has("scenario.d0")) sc.d0 = cfg.get_double("scenario.d0", 0.0);
  if (cfg.has("scenario.null_noise")) {
    sc.null_noise = parse_density(cfg.require("scenario.null_noise"));
  }
  if (cfg.has("scenario.alt_noise")) {
    sc.alt_noise = parse_density(cfg.require("scenario.alt_noise"));
  }
  const std::string sensing = cfg.get("scenario.sensing", "ideal");
  if (sensing == "ideal") {
    sc.sensing = SensingMode::ideal;
  } else if (sensing == "nonideal") {
    sc.sensing = SensingMode::nonideal;
  } else if (sensing == "physics") {
    sc.sensing = SensingMode::physics;
  } else {
    fail("sensing must be ideal, nonideal or physics, got '" + sensing + "'");
  }
  sc.nonideal_xi_range.lo =
      cfg.get_double("scenario.xi_min", sc.nonideal_xi_range.lo);
  sc.nonideal_xi_range.hi =
      cfg.get_double("scenario.xi_max", sc.nonideal_xi_range.hi);
  sc.nonideal_theta_range.lo =
      cfg.get_double("scenario.theta_min", sc.nonideal_theta_range.lo);
  sc.nonideal_theta_range.hi =
      cfg.get_double("scenario.theta_max", sc.nonideal_theta_range.hi);
  sc.seed = cfg.get_u64("scenario.seed", sc.seed);
  sc.validate();
  return sc;
}

ExperimentConfig experiment_from_config(const ConfigMap& cfg) {
  reject_unknown_keys(cfg, "experiment",
                      {"procedure", "gamma", "uncorrected_level", "epsilon",
                       "k_preset", "budget", "trials", "seed", "jobs",
                       "resolution", "out"});
  ExperimentConfig ec;
  ec.scenario = scenario_from_config(cfg);
  ec.procedure =
      parse_procedure(cfg.get("experiment.procedure", "dtbh"));
  ec.gamma = cfg.get_double("experiment.gamma", ec.gamma);
  ec.uncorrected_level =
      cfg.get_double("experiment.uncorrected_level", ec.uncorrected_level);
  if (cfg.has("experiment.epsilon")) {
    ec.epsilon = cfg.get_double("experiment.epsilon", 0.0);
  }
  ec.k_preset = cfg.get_int("experiment.k_preset", ec.k_preset);
  if (cfg.has("experiment.budget")) {
    ec.budget = cfg.get_long("experiment.budget", 0);
  }
  ec.trials = cfg.get_int("experiment.trials", ec.trials);
  ec.master_seed = cfg.get_u64("experiment.seed", ec.master_seed);
  ec.jobs = cfg.get_int("experiment.jobs", ec.jobs);
  ec.transform_resolution =
      cfg.get_int("experiment.resolution", ec.transform_resolution);
  ec.output_path = cfg.get("experiment.out", ec.output_path);
  ec.validate();
  return ec;
}

}  // namespace dtbh
