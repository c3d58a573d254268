#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "netsel/evaluation.hpp"
#include "netsel/rng.hpp"
#include "support/generators.hpp"
#include "support/reference_eval.hpp"

using namespace netsel;

namespace {

Detection det(std::int64_t img, std::int64_t cat, BoundingBox box, double score) {
  return Detection{img, cat, box, score};
}

GroundTruthBox gt(std::int64_t img, std::int64_t cat, BoundingBox box, bool ignored = false) {
  return GroundTruthBox{img, cat, box, ignored};
}

// Dataset with one category and the given boxes on one image.
Dataset one_image_dataset(const std::vector<GroundTruthBox>& gts) {
  Dataset ds;
  ds.images.push_back({1, 256, 256, ""});
  ds.categories.push_back({1, "thing"});
  ds.ground_truth = gts;
  return ds;
}

}  // namespace

TEST_CASE("iou on hand geometry", "[evaluation]") {
  const BoundingBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
  CHECK(iou({0, 0, 10, 10}, {5, 0, 10, 10}) == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(iou({0, 0, 10, 10}, {10, 0, 10, 10}) == 0.0);  // touching edges do not overlap
}

TEST_CASE("iou is symmetric and bounded", "[evaluation]") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const BoundingBox a = gen::random_box(rng);
    const BoundingBox b = gen::random_box(rng);
    const double v = iou(a, b);
    REQUIRE(v == iou(b, a));
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    REQUIRE(iou(a, a) == 1.0);
  }
}

TEST_CASE("matching pairs a single exact detection", "[evaluation]") {
  const std::vector<Detection> dets = {det(1, 1, {10, 10, 20, 20}, 0.9)};
  const std::vector<GroundTruthBox> gts = {gt(1, 1, {10, 10, 20, 20})};
  const MatchResult m = match_detections(dets, gts, 0.5);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].detection == 0);
  CHECK(m.pairs[0].ground_truth == 0);
  CHECK(m.pairs[0].iou == 1.0);
  CHECK(m.unmatched_detections.empty());
  CHECK(m.unmatched_ground_truth.empty());
}

TEST_CASE("matching is greedy by score", "[evaluation]") {
  // Both detections overlap the single ground truth at IoU >= 0.5; the higher
  // score wins and the other becomes a false positive.
  const std::vector<Detection> dets = {det(1, 1, {0, 0, 10, 12}, 0.8),
                                       det(1, 1, {0, 0, 10, 11}, 0.9)};
  const std::vector<GroundTruthBox> gts = {gt(1, 1, {0, 0, 10, 10})};
  const MatchResult m = match_detections(dets, gts, 0.5);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].detection == 1);
  REQUIRE(m.unmatched_detections.size() == 1);
  CHECK(m.unmatched_detections[0] == 0);
}

TEST_CASE("bucket mismatch turns a match into an exclusion", "[evaluation]") {
  // A detection sitting on a Large box under bucket=Small: the box is ignored,
  // the detection is excluded, nothing is a false positive or negative.
  const std::vector<Detection> dets = {det(1, 1, {0, 0, 100, 100}, 0.9)};
  const std::vector<GroundTruthBox> gts = {gt(1, 1, {0, 0, 100, 100})};
  const MatchResult m = match_detections(dets, gts, 0.5, SizeBucket::Small);
  CHECK(m.pairs.empty());
  CHECK(m.unmatched_detections.empty());
  CHECK(m.unmatched_ground_truth.empty());
}

TEST_CASE("crowd boxes absorb detections without being consumed", "[evaluation]") {
  const std::vector<Detection> dets = {det(1, 1, {0, 0, 10, 10}, 0.9),
                                       det(1, 1, {1, 0, 10, 10}, 0.8)};
  const std::vector<GroundTruthBox> gts = {gt(1, 1, {0, 0, 10, 10}, /*ignored=*/true)};
  const MatchResult m = match_detections(dets, gts, 0.5);
  CHECK(m.pairs.empty());
  CHECK(m.unmatched_detections.empty());  // both excluded via the crowd box
  CHECK(m.unmatched_ground_truth.empty());
}

TEST_CASE("matching rejects mixed images or categories", "[evaluation]") {
  const std::vector<Detection> dets = {det(1, 1, {0, 0, 5, 5}, 0.9), det(2, 1, {0, 0, 5, 5}, 0.8)};
  CHECK_THROWS_AS(match_detections(dets, {}, 0.5), Error);
  const std::vector<Detection> one = {det(1, 1, {0, 0, 5, 5}, 0.9)};
  const std::vector<GroundTruthBox> other_cat = {gt(1, 2, {0, 0, 5, 5})};
  CHECK_THROWS_AS(match_detections(one, other_cat, 0.5), Error);
}

TEST_CASE("raising the threshold never adds pairs", "[evaluation]") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Detection> dets;
    std::vector<GroundTruthBox> gts;
    const int nd = 1 + static_cast<int>(rng.below(5));
    const int ng = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < nd; ++i) dets.push_back(det(1, 1, gen::random_box(rng, 30), rng.uniform()));
    for (int i = 0; i < ng; ++i) gts.push_back(gt(1, 1, gen::random_box(rng, 30)));
    std::size_t previous = dets.size() + 1;
    for (const double thr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const std::size_t pairs = match_detections(dets, gts, thr).pairs.size();
      REQUIRE(pairs <= previous);
      previous = pairs;
    }
  }
}

TEST_CASE("average precision base cases", "[evaluation]") {
  CHECK(average_precision({{0.9, true}}, 1).value() == 1.0);
  CHECK(average_precision({{0.9, false}}, 1).value() == 0.0);
  CHECK_FALSE(average_precision({{0.9, true}}, 0).has_value());
  CHECK(average_precision({}, 3).value() == 0.0);
}

TEST_CASE("average precision matches the hand-computed stepwise curve", "[evaluation]") {
  // Flags by descending score: TP, FP, TP with 2 positives.
  const std::vector<ScoredFlag> flags = {{0.9, true}, {0.8, false}, {0.7, true}};
  const double expected = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
  CHECK(average_precision(flags, 2).value() == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("average precision depends only on score ranks", "[evaluation]") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredFlag> flags;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) flags.push_back({rng.uniform(), rng.uniform() < 0.5});
    const std::size_t positives = 1 + rng.below(6);
    const auto base = average_precision(flags, positives);
    auto squashed = flags;
    for (auto& f : squashed) f.score = f.score * f.score * 0.5;  // strictly monotone on [0,1]
    const auto transformed = average_precision(squashed, positives);
    REQUIRE(transformed.value() == Catch::Approx(base.value()).margin(1e-12));
  }
}

TEST_CASE("perfect detections score a full mAP", "[evaluation]") {
  Dataset ds = one_image_dataset({gt(1, 1, {10, 10, 20, 20}), gt(1, 1, {50, 50, 40, 40})});
  DetectionSet dets;
  dets.network_id = "perfect__GPU__1";
  for (const auto& g : ds.ground_truth) dets.detections.push_back(det(1, 1, g.box, 0.9));
  const EvalReport r = evaluate_dataset(ds, dets);
  CHECK(r.map_overall == 1.0);
}

TEST_CASE("an empty detection set scores zero against real ground truth", "[evaluation]") {
  Dataset ds = one_image_dataset({gt(1, 1, {10, 10, 20, 20})});
  DetectionSet dets;
  dets.network_id = "empty__CPU__1";
  const EvalReport r = evaluate_dataset(ds, dets);
  CHECK(r.map_overall == 0.0);
}

TEST_CASE("dataset evaluation equals the brute-force reference", "[evaluation]") {
  const std::vector<double> thresholds = default_iou_thresholds();
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = gen::micro_instance(seed);
    const EvalReport mine = evaluate_dataset(inst.dataset, inst.detections, {}, true);
    const refeval::RefReport ref =
        refeval::ref_evaluate(inst.dataset, inst.detections, thresholds, true);
    REQUIRE(std::abs(mine.map_overall - ref.overall) <= 1e-9);
    REQUIRE(mine.per_class.size() == ref.per_class.size());
    for (const auto& [cat, ap] : ref.per_class)
      REQUIRE(std::abs(mine.per_class.at(cat) - ap) <= 1e-9);
    REQUIRE(mine.map_small.has_value() == ref.small.has_value());
    if (ref.small) REQUIRE(std::abs(*mine.map_small - *ref.small) <= 1e-9);
    REQUIRE(mine.map_medium.has_value() == ref.medium.has_value());
    if (ref.medium) REQUIRE(std::abs(*mine.map_medium - *ref.medium) <= 1e-9);
    REQUIRE(mine.map_large.has_value() == ref.large.has_value());
    if (ref.large) REQUIRE(std::abs(*mine.map_large - *ref.large) <= 1e-9);
  }
}

TEST_CASE("duplicating detections at lower score still matches the reference", "[evaluation]") {
  const std::vector<double> thresholds = default_iou_thresholds();
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto inst = gen::micro_instance(seed);
    const std::size_t original = inst.detections.detections.size();
    for (std::size_t i = 0; i < original; ++i) {
      Detection copy = inst.detections.detections[i];
      copy.score *= 0.5;
      inst.detections.detections.push_back(copy);
    }
    const EvalReport mine = evaluate_dataset(inst.dataset, inst.detections);
    const refeval::RefReport ref =
        refeval::ref_evaluate(inst.dataset, inst.detections, thresholds, false);
    REQUIRE(std::abs(mine.map_overall - ref.overall) <= 1e-9);
  }
}

TEST_CASE("per-image scores cover the defined states", "[evaluation]") {
  Dataset ds;
  ds.images = {{1, 128, 128, ""}, {2, 128, 128, ""}, {3, 128, 128, ""}};
  ds.categories = {{1, "thing"}};
  ds.ground_truth = {gt(1, 1, {10, 10, 20, 20}), gt(2, 1, {10, 10, 20, 20})};
  DetectionSet dets;
  dets.network_id = "n__CPU__1";
  dets.detections = {det(1, 1, {10, 10, 20, 20}, 0.9)};  // image 2 gets nothing

  const auto scores = evaluate_per_image(ds, dets, std::nullopt, 17.0);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].image_id == 1);
  CHECK(scores[0].score.value() == 1.0);
  CHECK(scores[0].latency_ms == 17.0);
  CHECK(scores[1].score.value() == 0.0);   // ground truth, no detections
  CHECK_FALSE(scores[2].score.has_value());  // no ground truth at all
  CHECK(scores[2].network_id == "n__CPU__1");
}

TEST_CASE("per-image scores equal the brute-force reference", "[evaluation]") {
  const std::vector<double> thresholds = default_iou_thresholds();
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    const auto inst = gen::micro_instance(seed);
    for (const auto bucket : {std::optional<SizeBucket>{}, std::optional{SizeBucket::Small},
                              std::optional{SizeBucket::Medium}}) {
      const auto mine = evaluate_per_image(inst.dataset, inst.detections, bucket);
      const auto ref = refeval::ref_per_image(inst.dataset, inst.detections, thresholds, bucket);
      REQUIRE(mine.size() == ref.size());
      for (std::size_t i = 0; i < mine.size(); ++i) {
        REQUIRE(mine[i].score.has_value() == ref[i].has_value());
        if (ref[i]) REQUIRE(std::abs(*mine[i].score - *ref[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("report rows serialize in the profile-table shape", "[evaluation]") {
  EvalReport r;
  r.map_overall = 0.44;
  r.map_small = 0.2;
  r.map_medium = 0.48;
  r.map_large = 0.6;
  r.per_class[3] = 0.5;
  const std::int64_t classes[] = {3, 7};
  CHECK(report_row(r, "faster-rcnn-nas", Backend::GPU, 1, 3200.0, classes) ==
        "faster-rcnn-nas,GPU,1,3200,0.44,0.2,0.48,0.6,0.5,");
}
