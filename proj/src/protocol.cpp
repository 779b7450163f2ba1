#include "dtbh/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <numeric>
#include <string>
#include <system_error>
#include <vector>

#include "dtbh/common.hpp"

namespace dtbh {

namespace {

void check_inputs(const PValueVector& pv, const ProtocolConfig& cfg) {
  if (pv.values.size() != pv.sensor_ids.size()) {
    throw ConfigError("protocol: value/id lengths differ");
  }
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
    throw ConfigError("protocol: gamma must lie strictly inside (0, 1)");
  }
  const int m = static_cast<int>(pv.values.size());
  if (cfg.k_preset < 0 || cfg.k_preset > m) {
    throw ConfigError("protocol: k_preset must lie in [0, m]");
  }
  if (cfg.budget && *cfg.budget < 0) {
    throw ConfigError("protocol: budget must be non-negative");
  }
  for (double p : pv.values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("protocol: p-values must lie in [0, 1]");
    }
  }
}

ProtocolResult run_rounds(const PValueVector& pv, const ProtocolConfig& cfg,
                          bool adaptive) {
  check_inputs(pv, cfg);
  const int m = static_cast<int>(pv.values.size());

  ProtocolResult out;
  if (m == 0) {
    out.trace.reason = TerminationReason::reached_m;
    return out;
  }

  // Declaration order: ascending value, ties by sensor id. Thresholds only
  // grow from round to round, so the undeclared sensors below the current
  // level are always a contiguous block starting at `next`.
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ka = std::make_pair(pv.values[static_cast<std::size_t>(a)],
                                   pv.sensor_ids[static_cast<std::size_t>(a)]);
    const auto kb = std::make_pair(pv.values[static_cast<std::size_t>(b)],
                                   pv.sensor_ids[static_cast<std::size_t>(b)]);
    return ka < kb;
  });

  std::vector<int> declared_round(static_cast<std::size_t>(m), 0);
  std::size_t next = 0;
  long long count = 0;
  int t_max = 0;
  TerminationReason reason = TerminationReason::silent_round;

  for (int t = 1; t <= m; ++t) {
    double level;
    if (adaptive) {
      const long long assumed_nulls = m - count;
      level = assumed_nulls > 0
                  ? static_cast<double>(t) * cfg.gamma /
                        static_cast<double>(assumed_nulls)
                  : 1.0;
    } else {
      level = static_cast<double>(t) * cfg.gamma / static_cast<double>(m);
    }

    int declared_now = 0;
    bool truncated = false;
    while (next < order.size() &&
           pv.values[static_cast<std::size_t>(order[next])] <= level) {
      if (cfg.budget && count >= *cfg.budget) {
        truncated = true;
        break;
      }
      declared_round[static_cast<std::size_t>(order[next])] = t;
      ++next;
      ++count;
      ++declared_now;
    }

    RoundRecord rec;
    rec.round = t;
    rec.i_t = t;
    rec.threshold = level;
    rec.new_declarations = declared_now;
    rec.count = count;
    rec.t_max_flag = count >= t;
    if (rec.t_max_flag) {
      t_max = t;
    }
    out.trace.rounds.push_back(rec);

    if (truncated) {
      reason = TerminationReason::budget_exhausted;
      break;
    }
    if (t == m) {
      reason = TerminationReason::reached_m;
      break;
    }
    if (declared_now == 0 && t > cfg.k_preset) {
      reason = TerminationReason::silent_round;
      break;
    }
  }

  out.trace.t_max = t_max;
  out.trace.reason = reason;
  out.trace.messages = count;
  for (int i = 0; i < m; ++i) {
    const int r = declared_round[static_cast<std::size_t>(i)];
    if (r >= 1 && r <= t_max) {
      out.selected.push_back(pv.sensor_ids[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

void append_number(std::string& s, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  s.append(buf, res.ptr);
}

}  // namespace

ProtocolResult run_distributed(const PValueVector& pvals,
                               const ProtocolConfig& config) {
  return run_rounds(pvals, config, /*adaptive=*/false);
}

ProtocolResult run_dynamic(const PValueVector& pvals,
                           const ProtocolConfig& config) {
  return run_rounds(pvals, config, /*adaptive=*/true);
}

ProtocolResult run_protocol(const PValueVector& pvals,
                            const ProtocolConfig& config) {
  return run_rounds(pvals, config, config.dynamic);
}

std::string format_trace_csv(const ProtocolTrace& trace) {
  std::string out = "round,i_t,threshold,new_declarations,count,t_max_flag\n";
  for (const RoundRecord& rec : trace.rounds) {
    out += std::to_string(rec.round);
    out += ',';
    out += std::to_string(rec.i_t);
    out += ',';
    append_number(out, rec.threshold);
    out += ',';
    out += std::to_string(rec.new_declarations);
    out += ',';
    out += std::to_string(rec.count);
    out += ',';
    out += rec.t_max_flag ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace dtbh
