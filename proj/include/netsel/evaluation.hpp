#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "netsel/core.hpp"
#include "netsel/ingest.hpp"

namespace netsel {

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (ix <= 0 || iy <= 0) return 0.0;
  // Areas from the same rounded extents as the intersection, so identical
  // boxes give exactly 1 and the ratio never leaves [0, 1].
  const double area_a = ((a.x + a.w) - a.x) * ((a.y + a.h) - a.y);
  const double area_b = ((b.x + b.w) - b.x) * ((b.y + b.h) - b.y);
  const double inter = ix * iy;
  return inter / (area_a + area_b - inter);
}

// The standard COCO threshold sweep 0.50:0.05:0.95.
inline std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
  return t;
}

struct MatchResult {
  struct Pair {
    std::size_t detection;
    std::size_t ground_truth;
    double iou;
  };
  std::vector<Pair> pairs;                          // true positives
  std::vector<std::size_t> unmatched_detections;    // false positives
  std::vector<std::size_t> unmatched_ground_truth;  // false negatives
};

// Greedy score-descending matching within one (image, category) group.
//
// A detection is paired with the unmatched non-ignored ground-truth box of
// highest IoU >= threshold. When `bucket` is given, ground truth outside the
// bucket counts as ignored. A detection whose only qualifying match is an
// ignored box is excluded: it appears in no output field (neither TP nor FP).
// Ignored boxes are never consumed and never become false negatives.
inline MatchResult match_detections(std::span<const Detection> dets,
                                    std::span<const GroundTruthBox> gts,
                                    double iou_threshold,
                                    std::optional<SizeBucket> bucket = std::nullopt) {
  for (const auto& d : dets)
    if (d.image_id != dets.front().image_id || d.category_id != dets.front().category_id)
      fail(errc::mixed_image, "detections span multiple images or categories");
  for (const auto& g : gts) {
    if (g.image_id != gts.front().image_id || g.category_id != gts.front().category_id)
      fail(errc::mixed_image, "ground truth spans multiple images or categories");
    if (!dets.empty() &&
        (g.image_id != dets.front().image_id || g.category_id != dets.front().category_id))
      fail(errc::mixed_image, "detections and ground truth disagree on image or category");
  }

  std::vector<bool> ignored(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g)
    ignored[g] = gts[g].ignored || (bucket && area_bucket(gts[g].box) != *bucket);

  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  MatchResult result;
  std::vector<bool> taken(gts.size(), false);
  for (const std::size_t di : order) {
    std::ptrdiff_t best = -1;
    double best_iou = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (ignored[g] || taken[g]) continue;
      const double v = iou(dets[di].box, gts[g].box);
      if (v >= iou_threshold && (best < 0 || v > best_iou)) {
        best = static_cast<std::ptrdiff_t>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      result.pairs.push_back({di, static_cast<std::size_t>(best), best_iou});
      continue;
    }
    bool hits_ignored = false;
    for (std::size_t g = 0; g < gts.size() && !hits_ignored; ++g)
      hits_ignored = ignored[g] && iou(dets[di].box, gts[g].box) >= iou_threshold;
    if (!hits_ignored) result.unmatched_detections.push_back(di);
  }
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!ignored[g] && !taken[g]) result.unmatched_ground_truth.push_back(g);
  return result;
}

// One aggregated detection outcome for a (category, threshold) curve. The
// aggregation order is the tie-break for equal scores.
struct ScoredFlag {
  double score;
  bool is_tp;
};

// 101-point interpolated average precision. Returns nullopt when there are no
// positives at all (the NoGroundTruth state).
inline std::optional<double> average_precision(std::vector<ScoredFlag> flags,
                                               std::size_t total_positives) {
  if (total_positives == 0) return std::nullopt;
  std::stable_sort(flags.begin(), flags.end(),
                   [](const ScoredFlag& a, const ScoredFlag& b) { return a.score > b.score; });

  const std::size_t n = flags.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += flags[i].is_tp ? 1 : 0;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(total_positives);
  }
  // Monotone envelope from the right.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double sum = 0;
  std::size_t idx = 0;
  for (int r = 0; r <= 100; ++r) {
    const double target = static_cast<double>(r) / 100.0;
    while (idx < n && recall[idx] < target) ++idx;
    if (idx < n) sum += precision[idx];
  }
  return sum / 101.0;
}

struct EvalReport {
  double map_overall = 0;
  std::optional<double> map_small;
  std::optional<double> map_medium;
  std::optional<double> map_large;
  std::map<std::int64_t, double> per_class;
};

namespace detail {

// Ground truth and detections regrouped by category then image, in sorted id
// order, preserving input order inside each group.
struct EvalGroups {
  std::vector<std::int64_t> image_ids;
  std::vector<std::int64_t> category_ids;
  std::map<std::int64_t, std::map<std::int64_t, std::vector<GroundTruthBox>>> gts;
  std::map<std::int64_t, std::map<std::int64_t, std::vector<Detection>>> dets;

  EvalGroups(const Dataset& dataset, const DetectionSet& detset) {
    image_ids = dataset.sorted_image_ids();
    category_ids = dataset.sorted_category_ids();
    for (const auto& g : dataset.ground_truth) gts[g.category_id][g.image_id].push_back(g);
    for (const auto& d : detset.detections) dets[d.category_id][d.image_id].push_back(d);
  }

  std::span<const GroundTruthBox> gt(std::int64_t cat, std::int64_t img) const {
    static const std::vector<GroundTruthBox> empty;
    const auto c = gts.find(cat);
    if (c == gts.end()) return empty;
    const auto i = c->second.find(img);
    return i == c->second.end() ? std::span<const GroundTruthBox>(empty)
                                : std::span<const GroundTruthBox>(i->second);
  }
  std::span<const Detection> det(std::int64_t cat, std::int64_t img) const {
    static const std::vector<Detection> empty;
    const auto c = dets.find(cat);
    if (c == dets.end()) return empty;
    const auto i = c->second.find(img);
    return i == c->second.end() ? std::span<const Detection>(empty)
                                : std::span<const Detection>(i->second);
  }
};

inline std::size_t count_positives(std::span<const GroundTruthBox> gts,
                                   std::optional<SizeBucket> bucket) {
  std::size_t n = 0;
  for (const auto& g : gts)
    if (!g.ignored && (!bucket || area_bucket(g.box) == *bucket)) ++n;
  return n;
}

// Appends the per-detection TP/FP flags of one group, in detection input
// order. Excluded detections (matched to ignored boxes) contribute nothing.
inline void append_flags(std::span<const Detection> dets, std::span<const GroundTruthBox> gts,
                         double threshold, std::optional<SizeBucket> bucket,
                         std::vector<ScoredFlag>& flags) {
  if (dets.empty()) return;
  const MatchResult m = match_detections(dets, gts, threshold, bucket);
  enum class Outcome { Excluded, Tp, Fp };
  std::vector<Outcome> outcome(dets.size(), Outcome::Excluded);
  for (const auto& p : m.pairs) outcome[p.detection] = Outcome::Tp;
  for (const auto d : m.unmatched_detections) outcome[d] = Outcome::Fp;
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (outcome[i] != Outcome::Excluded)
      flags.push_back({dets[i].score, outcome[i] == Outcome::Tp});
}

// Mean AP over the threshold sweep for one category over a set of images, or
// nullopt when the category has no positives there.
inline std::optional<double> category_map(const EvalGroups& groups, std::int64_t cat,
                                          std::span<const std::int64_t> images,
                                          std::span<const double> thresholds,
                                          std::optional<SizeBucket> bucket) {
  std::size_t positives = 0;
  for (const auto img : images) positives += count_positives(groups.gt(cat, img), bucket);
  if (positives == 0) return std::nullopt;
  double sum = 0;
  for (const double t : thresholds) {
    std::vector<ScoredFlag> flags;
    for (const auto img : images)
      append_flags(groups.det(cat, img), groups.gt(cat, img), t, bucket, flags);
    sum += average_precision(std::move(flags), positives).value();
  }
  return sum / static_cast<double>(thresholds.size());
}

}  // namespace detail

// Dataset-wide COCO-style evaluation: AP per (category, IoU threshold)
// aggregated across all images, averaged over thresholds per class, then over
// classes with ground truth. With `buckets` set, the small/medium/large
// variants restrict matching via the bucket-ignore rule.
inline EvalReport evaluate_dataset(const Dataset& dataset, const DetectionSet& detset,
                                   std::span<const double> iou_thresholds = {},
                                   bool buckets = false) {
  const std::vector<double> default_t = default_iou_thresholds();
  if (iou_thresholds.empty()) iou_thresholds = default_t;
  const detail::EvalGroups groups(dataset, detset);

  EvalReport report;
  double sum = 0;
  std::size_t count = 0;
  for (const auto cat : groups.category_ids) {
    const auto ap =
        detail::category_map(groups, cat, groups.image_ids, iou_thresholds, std::nullopt);
    if (!ap) continue;
    report.per_class[cat] = *ap;
    sum += *ap;
    ++count;
  }
  report.map_overall = count ? sum / static_cast<double>(count) : 0.0;

  if (buckets) {
    const auto bucket_map = [&](SizeBucket b) -> std::optional<double> {
      double s = 0;
      std::size_t n = 0;
      for (const auto cat : groups.category_ids) {
        const auto ap = detail::category_map(groups, cat, groups.image_ids, iou_thresholds, b);
        if (!ap) continue;
        s += *ap;
        ++n;
      }
      if (n == 0) return std::nullopt;
      return s / static_cast<double>(n);
    };
    report.map_small = bucket_map(SizeBucket::Small);
    report.map_medium = bucket_map(SizeBucket::Medium);
    report.map_large = bucket_map(SizeBucket::Large);
  }
  return report;
}

// Per-image mAP over the default threshold sweep, averaged over the categories
// present in that image's ground truth. Images with no (in-bucket) ground
// truth get the NoGroundTruth state rather than a zero.
inline std::vector<PerImageScore> evaluate_per_image(const Dataset& dataset,
                                                     const DetectionSet& detset,
                                                     std::optional<SizeBucket> bucket = std::nullopt,
                                                     double latency_ms = 0.0) {
  const std::vector<double> thresholds = default_iou_thresholds();
  const detail::EvalGroups groups(dataset, detset);

  std::vector<PerImageScore> scores;
  scores.reserve(groups.image_ids.size());
  for (const auto img : groups.image_ids) {
    const std::int64_t one_image[] = {img};
    double sum = 0;
    std::size_t count = 0;
    for (const auto cat : groups.category_ids) {
      const auto ap = detail::category_map(groups, cat, one_image, thresholds, bucket);
      if (!ap) continue;
      sum += *ap;
      ++count;
    }
    PerImageScore s;
    s.image_id = img;
    s.network_id = detset.network_id;
    s.latency_ms = latency_ms;
    if (count) s.score = sum / static_cast<double>(count);
    scores.push_back(std::move(s));
  }
  return scores;
}

// A report row in the profile-table format, so a scoring run can regenerate a
// campaign file. Bucket columns left empty when undefined.
inline std::string report_row(const EvalReport& report, const std::string& model, Backend backend,
                              int batch, double latency_ms,
                              std::span<const std::int64_t> class_columns = {}) {
  std::string row = model;
  row += ',';
  row += to_string(backend);
  row += ',' + std::to_string(batch);
  row += ',' + csv::fmt(latency_ms);
  row += ',' + csv::fmt(report.map_overall);
  for (const auto& v : {report.map_small, report.map_medium, report.map_large})
    row += ',' + (v ? csv::fmt(*v) : std::string{});
  for (const auto cat : class_columns) {
    const auto it = report.per_class.find(cat);
    row += ',' + (it != report.per_class.end() ? csv::fmt(it->second) : std::string{});
  }
  return row;
}

}  // namespace netsel
