#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netsel/core.hpp"
#include "netsel/csv.hpp"

namespace netsel {

enum class InfeasiblePolicy { FastestFallback, Reject };

struct ConstraintSpec {
  std::optional<double> max_latency_ms;  // nullopt = unbounded
  std::optional<double> min_accuracy;
  MetricKey objective;
  InfeasiblePolicy infeasible_policy = InfeasiblePolicy::FastestFallback;
};

struct ContextEvent {
  std::int64_t frame_index = 0;
  ConstraintSpec constraints;
  std::string label;
};

struct Selection {
  const NetworkProfile* profile = nullptr;
  bool feasible = true;  // false when the fallback was used
};

// Picks the profile maximizing the objective among those satisfying the
// constraints; ties go to lower latency, then the smaller key. With no
// feasible profile, FastestFallback returns the global minimum-latency
// profile flagged infeasible, Reject raises.
inline Selection select_network(const std::vector<NetworkProfile>& registry,
                                const ConstraintSpec& c) {
  if (registry.empty()) fail(errc::empty_registry, "no networks to select from");
  if (c.max_latency_ms && !(*c.max_latency_ms > 0))
    fail(errc::invalid_argument, "max_latency_ms must be > 0 when bounded");

  const NetworkProfile* best = nullptr;
  double best_value = 0;
  const NetworkProfile* fastest = nullptr;
  for (const auto& p : registry) {
    if (!fastest || p.latency_ms < fastest->latency_ms ||
        (p.latency_ms == fastest->latency_ms && p.key() < fastest->key()))
      fastest = &p;
    const double value = accuracy_of(p, c.objective);
    if (c.max_latency_ms && p.latency_ms > *c.max_latency_ms) continue;
    if (c.min_accuracy && value < *c.min_accuracy) continue;
    const bool wins = !best || value > best_value ||
                      (value == best_value &&
                       (p.latency_ms < best->latency_ms ||
                        (p.latency_ms == best->latency_ms && p.key() < best->key())));
    if (wins) {
      best = &p;
      best_value = value;
    }
  }
  if (best) return {best, true};
  if (c.infeasible_policy == InfeasiblePolicy::Reject)
    fail(errc::infeasible, "no profile satisfies the constraints");
  return {fastest, false};
}

struct TraceEntry {
  std::int64_t frame = 0;
  std::string label;
  std::string network_id;
  double latency_ms = 0;       // profile latency or the per-frame override
  double objective = 0;        // value of the active objective metric
  double map_overall = 0;      // overall series, for side-by-side plots
  bool constraint_satisfied = true;
  double switch_cost_ms = 0;   // reserved; no switch-cost model yet
};

using SelectionTrace = std::vector<TraceEntry>;

// Deterministic frame-by-frame simulation. The active constraints are those of
// the latest event at or before the frame; the network is re-selected only
// when they change. constraint_satisfied is evaluated against the actual
// (possibly overridden) per-frame latency.
inline SelectionTrace simulate_stream(const std::vector<NetworkProfile>& registry,
                                      const std::vector<ContextEvent>& events,
                                      std::int64_t n_frames,
                                      const std::map<std::int64_t, double>& latency_overrides = {}) {
  if (events.empty() || events.front().frame_index != 0)
    fail(errc::invalid_argument, "scenario must start with an event at frame 0");
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].frame_index <= events[i - 1].frame_index)
      fail(errc::invalid_argument, "event frames must be strictly increasing");

  SelectionTrace trace;
  trace.reserve(static_cast<std::size_t>(n_frames));
  std::size_t event_idx = 0;
  Selection selection{};
  for (std::int64_t frame = 0; frame < n_frames; ++frame) {
    if (event_idx < events.size() && events[event_idx].frame_index == frame) {
      selection = select_network(registry, events[event_idx].constraints);
      ++event_idx;
    }
    const ContextEvent& active = events[event_idx - 1];
    const NetworkProfile& p = *selection.profile;

    TraceEntry e;
    e.frame = frame;
    e.label = active.label;
    e.network_id = p.id();
    const auto it = latency_overrides.find(frame);
    e.latency_ms = it != latency_overrides.end() ? it->second : p.latency_ms;
    e.objective = accuracy_of(p, active.constraints.objective);
    e.map_overall = p.map_overall;
    const bool latency_ok =
        !active.constraints.max_latency_ms || e.latency_ms <= *active.constraints.max_latency_ms;
    const bool accuracy_ok =
        !active.constraints.min_accuracy || e.objective >= *active.constraints.min_accuracy;
    e.constraint_satisfied = latency_ok && accuracy_ok;
    trace.push_back(std::move(e));
  }
  return trace;
}

// --- file formats ---------------------------------------------------------

inline constexpr const char* kScenarioHeader = "frame,label,max_latency_ms,min_accuracy,objective";

// Scenario rows: frame,label,max_latency_ms,min_accuracy,objective.
// Empty latency/accuracy cells mean unbounded/none; empty objective = overall.
inline std::vector<ContextEvent> load_scenario(
    const std::string& path, InfeasiblePolicy policy = InfeasiblePolicy::FastestFallback) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || csv::join(rows.front()) != kScenarioHeader)
    fail(errc::malformed_file, path + ": expected header '" + kScenarioHeader + "'");
  std::vector<ContextEvent> events;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r);
    if (row.size() != 5) fail(errc::malformed_file, where + ": expected 5 fields");
    ContextEvent e;
    e.frame_index = csv::parse_int(row[0], where);
    e.label = row[1];
    if (!row[2].empty()) e.constraints.max_latency_ms = csv::parse_double(row[2], where);
    if (!row[3].empty()) e.constraints.min_accuracy = csv::parse_double(row[3], where);
    e.constraints.objective = MetricKey::parse(row[4]);
    e.constraints.infeasible_policy = policy;
    events.push_back(std::move(e));
  }
  return events;
}

inline void save_trace(const SelectionTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << "frame,label,network_id,latency_ms,objective,map_overall,constraint_satisfied,"
         "switch_cost_ms\n";
  for (const auto& e : trace)
    out << e.frame << ',' << e.label << ',' << e.network_id << ',' << csv::fmt(e.latency_ms)
        << ',' << csv::fmt(e.objective) << ',' << csv::fmt(e.map_overall) << ','
        << (e.constraint_satisfied ? 1 : 0) << ',' << csv::fmt(e.switch_cost_ms) << '\n';
}

// Per-frame latency override rows: frame,latency_ms.
inline std::map<std::int64_t, double> load_latency_trace(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || csv::join(rows.front()) != "frame,latency_ms")
    fail(errc::malformed_file, path + ": expected header 'frame,latency_ms'");
  std::map<std::int64_t, double> overrides;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r);
    if (row.size() != 2) fail(errc::malformed_file, where + ": expected 2 fields");
    overrides[csv::parse_int(row[0], where)] = csv::parse_double(row[1], where);
  }
  return overrides;
}

}  // namespace netsel
