#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netsel/core.hpp"
#include "netsel/csv.hpp"
#include "netsel/frontier.hpp"

namespace netsel {

struct OracleLabel {
  std::int64_t image_id = 0;
  std::string network_id;
  double score = 0;
  double runner_up_margin = 0;
};

struct OracleResult {
  std::vector<OracleLabel> labels;                // ascending image id
  std::size_t excluded_no_ground_truth = 0;
};

// Labels every image with its best network: highest per-image score, ties
// broken by lower latency, then by the smaller profile key. Images where every
// network reports NoGroundTruth are excluded and counted.
inline OracleResult build_oracle(const std::vector<PerImageScore>& scores,
                                 const std::vector<NetworkProfile>& registry) {
  if (registry.empty()) fail(errc::empty_registry, "oracle needs a network registry");

  std::map<std::string, const NetworkProfile*> by_id;
  for (const auto& p : registry) by_id[p.id()] = &p;

  std::map<std::int64_t, std::map<std::string, const PerImageScore*>> by_image;
  for (const auto& s : scores) {
    if (!by_id.count(s.network_id))
      fail(errc::incomplete_scores, "score references unknown network " + s.network_id);
    if (!by_image[s.image_id].emplace(s.network_id, &s).second)
      fail(errc::incomplete_scores,
           "duplicate score for image " + std::to_string(s.image_id) + " / " + s.network_id);
  }

  OracleResult result;
  for (const auto& [image_id, per_network] : by_image) {
    if (per_network.size() != by_id.size())
      fail(errc::incomplete_scores, "image " + std::to_string(image_id) + " has " +
                                        std::to_string(per_network.size()) + " scores for " +
                                        std::to_string(by_id.size()) + " networks");
    const PerImageScore* winner = nullptr;
    double runner_up = -1;
    for (const auto& [network_id, s] : per_network) {
      if (!s->score) continue;
      if (!winner) {
        winner = s;
        continue;
      }
      const bool wins =
          *s->score > *winner->score ||
          (*s->score == *winner->score &&
           (s->latency_ms < winner->latency_ms ||
            (s->latency_ms == winner->latency_ms &&
             by_id.at(s->network_id)->key() < by_id.at(winner->network_id)->key())));
      const PerImageScore* loser = wins ? winner : s;
      runner_up = std::max(runner_up, *loser->score);
      if (wins) winner = s;
    }
    if (!winner) {
      ++result.excluded_no_ground_truth;
      continue;
    }
    OracleLabel label;
    label.image_id = image_id;
    label.network_id = winner->network_id;
    label.score = *winner->score;
    label.runner_up_margin = runner_up < 0 ? 0.0 : *winner->score - runner_up;
    result.labels.push_back(std::move(label));
  }
  return result;
}

struct DistributionEntry {
  std::size_t count = 0;
  double fraction = 0;
};

inline std::map<std::string, DistributionEntry> oracle_distribution(
    const std::vector<OracleLabel>& labels) {
  if (labels.empty()) fail(errc::empty_labels, "oracle produced no labels");
  std::map<std::string, DistributionEntry> dist;
  for (const auto& l : labels) ++dist[l.network_id].count;
  for (auto& [id, e] : dist)
    e.fraction = static_cast<double>(e.count) / static_cast<double>(labels.size());
  return dist;
}

// Rebuilds the oracle considering only the frontier networks.
inline OracleResult restrict_to_pareto(const std::vector<PerImageScore>& scores,
                                       const std::vector<FrontierPoint>& frontier) {
  if (frontier.empty()) fail(errc::empty_registry, "empty frontier");
  std::set<std::string> keep;
  std::vector<NetworkProfile> restricted;
  for (const auto& f : frontier)
    if (keep.insert(f.profile.id()).second) restricted.push_back(f.profile);
  std::vector<PerImageScore> filtered;
  for (const auto& s : scores)
    if (keep.count(s.network_id)) filtered.push_back(s);
  return build_oracle(filtered, restricted);
}

// --- file formats ---------------------------------------------------------

inline void save_oracle(const OracleResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << "image_id,network_id,score,margin\n";
  for (const auto& l : result.labels)
    out << l.image_id << ',' << l.network_id << ',' << csv::fmt(l.score) << ','
        << csv::fmt(l.runner_up_margin) << '\n';
}

inline std::vector<OracleLabel> load_oracle(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || csv::join(rows.front()) != "image_id,network_id,score,margin")
    fail(errc::malformed_file, path + ": expected oracle header");
  std::vector<OracleLabel> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r);
    if (row.size() != 4) fail(errc::malformed_file, where + ": expected 4 fields");
    OracleLabel l;
    l.image_id = csv::parse_int(row[0], where);
    l.network_id = row[1];
    l.score = csv::parse_double(row[2], where);
    l.runner_up_margin = csv::parse_double(row[3], where);
    labels.push_back(std::move(l));
  }
  return labels;
}

inline void save_distribution(const std::map<std::string, DistributionEntry>& dist,
                              std::size_t excluded_no_ground_truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << "# images_without_ground_truth=" << excluded_no_ground_truth << '\n';
  out << "network_id,count,fraction\n";
  for (const auto& [id, e] : dist)
    out << id << ',' << e.count << ',' << csv::fmt(e.fraction) << '\n';
}

inline void save_per_image_scores(const std::vector<PerImageScore>& scores,
                                  const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << "image_id,network_id,score,latency_ms\n";
  for (const auto& s : scores)
    out << s.image_id << ',' << s.network_id << ','
        << (s.score ? csv::fmt(*s.score) : std::string{}) << ',' << csv::fmt(s.latency_ms)
        << '\n';
}

inline std::vector<PerImageScore> load_per_image_scores(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || csv::join(rows.front()) != "image_id,network_id,score,latency_ms")
    fail(errc::malformed_file, path + ": expected per-image score header");
  std::vector<PerImageScore> scores;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r);
    if (row.size() != 4) fail(errc::malformed_file, where + ": expected 4 fields");
    PerImageScore s;
    s.image_id = csv::parse_int(row[0], where);
    s.network_id = row[1];
    if (!row[2].empty()) s.score = csv::parse_double(row[2], where);
    s.latency_ms = csv::parse_double(row[3], where);
    scores.push_back(std::move(s));
  }
  return scores;
}

}  // namespace netsel
