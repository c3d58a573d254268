#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "netsel/core.hpp"

namespace netsel {

struct FrontierPoint {
  NetworkProfile profile;
  double accuracy = 0;
  double latency_ms = 0;
};

// Non-dominated (accuracy, latency) configurations, latency ascending.
// p dominates q iff p.accuracy >= q.accuracy and p.latency <= q.latency with
// at least one strict; coordinate duplicates collapse to the lexicographically
// smallest profile key.
inline std::vector<FrontierPoint> pareto_frontier(const std::vector<NetworkProfile>& profiles,
                                                  const MetricKey& metric) {
  if (profiles.empty()) fail(errc::empty_registry, "no profiles to rank");

  std::vector<FrontierPoint> pts;
  pts.reserve(profiles.size());
  for (const auto& p : profiles) pts.push_back({p, accuracy_of(p, metric), p.latency_ms});

  std::sort(pts.begin(), pts.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.profile.key() < b.profile.key();
  });

  std::vector<FrontierPoint> frontier;
  double best_accuracy = -1;
  for (auto& pt : pts) {
    if (pt.accuracy > best_accuracy) {
      best_accuracy = pt.accuracy;
      frontier.push_back(std::move(pt));
    }
  }
  return frontier;
}

// The best configuration of each model under the chosen metric; ties go to
// lower latency, then the smaller key.
inline std::map<std::string, FrontierPoint> best_per_network(
    const std::vector<NetworkProfile>& profiles, const MetricKey& metric) {
  if (profiles.empty()) fail(errc::empty_registry, "no profiles to rank");

  std::map<std::string, FrontierPoint> best;
  for (const auto& p : profiles) {
    FrontierPoint candidate{p, accuracy_of(p, metric), p.latency_ms};
    const auto it = best.find(p.model_name);
    if (it == best.end()) {
      best.emplace(p.model_name, std::move(candidate));
      continue;
    }
    const FrontierPoint& cur = it->second;
    const bool better = candidate.accuracy > cur.accuracy ||
                        (candidate.accuracy == cur.accuracy &&
                         (candidate.latency_ms < cur.latency_ms ||
                          (candidate.latency_ms == cur.latency_ms &&
                           candidate.profile.key() < cur.profile.key())));
    if (better) it->second = std::move(candidate);
  }
  return best;
}

}  // namespace netsel
