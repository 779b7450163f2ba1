#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtbh/pvalues.hpp"

namespace dtbh {

struct ProtocolConfig {
  double gamma = 0.05;
  // Rounds executed even when nobody declares; silence ends the run only
  // after this many rounds have passed.
  int k_preset = 0;
  // Maximum total broadcast messages; absent means unlimited.
  std::optional<long long> budget;
  // Selects the adaptive-threshold variant in run_protocol.
  bool dynamic = false;
};

enum class TerminationReason { reached_m, silent_round, budget_exhausted };

struct RoundRecord {
  int round = 0;             // t, starting at 1
  int i_t = 0;               // threshold index for this round (equals t)
  double threshold = 0.0;    // level the round compares against
  int new_declarations = 0;  // sensors broadcasting this round
  long long count = 0;       // cumulative broadcasts after this round
  bool t_max_flag = false;   // whether count >= i_t held this round
};

struct ProtocolTrace {
  std::vector<RoundRecord> rounds;
  // Latest round where the cumulative count reached the round index;
  // 0 when no round ever did.
  int t_max = 0;
  TerminationReason reason = TerminationReason::silent_round;
  long long messages = 0;  // total broadcasts over the whole run
};

struct ProtocolResult {
  // Sensor ids declared during rounds 1..t_max, ascending.
  std::vector<int> selected;
  ProtocolTrace trace;
};

// Round-based broadcast selection with a fixed threshold schedule
// level(t) = t * gamma / m. Each round, every undeclared sensor whose
// p-value is at or below the level broadcasts once. The run ends when the
// round index reaches m, when a round past k_preset is silent, or when a
// round would push the broadcast total past the budget (that round is
// truncated in ascending p-value order, ties by id).
ProtocolResult run_distributed(const PValueVector& pvals,
                               const ProtocolConfig& config);

// Same schedule, but each round re-estimates the null count as
// m - count_{t-1} and uses level(t) = t * gamma / (m - count_{t-1}),
// so thresholds loosen as sensors declare.
ProtocolResult run_dynamic(const PValueVector& pvals,
                           const ProtocolConfig& config);

// Dispatches to run_dynamic or run_distributed per config.dynamic.
ProtocolResult run_protocol(const PValueVector& pvals,
                            const ProtocolConfig& config);

// CSV rendering with header `round,i_t,threshold,new_declarations,count,t_max_flag`.
std::string format_trace_csv(const ProtocolTrace& trace);

}  // namespace dtbh
