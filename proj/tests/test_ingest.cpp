#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "netsel/ingest.hpp"
#include "support/temp_dir.hpp"

using namespace netsel;
using testutil::TempDir;
using testutil::write_text;

namespace {

const char* kMinimalGt = R"({
  "images": [{"id": 1, "width": 64, "height": 64, "file_name": "one.png"}],
  "categories": [{"id": 1, "name": "person"}],
  "annotations": [{"id": 1, "image_id": 1, "category_id": 1, "bbox": [10, 10, 20, 20]}]
})";

}  // namespace

TEST_CASE("minimal annotation document loads", "[ingest]") {
  TempDir dir;
  write_text(dir.file("gt.json"), kMinimalGt);
  const Dataset ds = load_ground_truth(dir.file("gt.json"));
  REQUIRE(ds.images.size() == 1);
  REQUIRE(ds.categories.size() == 1);
  REQUIRE(ds.ground_truth.size() == 1);
  CHECK(ds.ground_truth[0].box == BoundingBox{10, 10, 20, 20});
  CHECK_FALSE(ds.ground_truth[0].ignored);
  CHECK(area_bucket(ds.ground_truth[0].box) == SizeBucket::Small);
  CHECK(ds.stats.dropped_degenerate_boxes == 0);
}

TEST_CASE("annotations referencing unknown ids are load errors", "[ingest]") {
  TempDir dir;
  write_text(dir.file("bad_img.json"), R"({
    "images": [{"id": 1, "width": 8, "height": 8}],
    "categories": [{"id": 1, "name": "x"}],
    "annotations": [{"image_id": 99, "category_id": 1, "bbox": [0, 0, 5, 5]}]
  })");
  try {
    load_ground_truth(dir.file("bad_img.json"));
    FAIL("expected dangling_reference");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dangling_reference);
  }

  write_text(dir.file("bad_cat.json"), R"({
    "images": [{"id": 1, "width": 8, "height": 8}],
    "categories": [{"id": 1, "name": "x"}],
    "annotations": [{"image_id": 1, "category_id": 42, "bbox": [0, 0, 5, 5]}]
  })");
  CHECK_THROWS_AS(load_ground_truth(dir.file("bad_cat.json")), Error);
}

TEST_CASE("multi-image documents group by image on query", "[ingest]") {
  TempDir dir;
  write_text(dir.file("gt.json"), R"({
    "images": [{"id": 1, "width": 64, "height": 64}, {"id": 2, "width": 64, "height": 64}],
    "categories": [{"id": 1, "name": "a"}, {"id": 2, "name": "b"}],
    "annotations": [
      {"image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 10]},
      {"image_id": 2, "category_id": 1, "bbox": [5, 5, 10, 10]},
      {"image_id": 2, "category_id": 2, "bbox": [20, 20, 10, 10], "iscrowd": 1}
    ]
  })");
  const Dataset ds = load_ground_truth(dir.file("gt.json"));
  REQUIRE(ds.ground_truth.size() == 3);
  std::size_t on_image_2 = 0;
  for (const auto& g : ds.ground_truth)
    if (g.image_id == 2) ++on_image_2;
  CHECK(on_image_2 == 2);
  CHECK(ds.ground_truth[2].ignored);  // iscrowd treated as ignore
  CHECK(ds.sorted_image_ids() == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("degenerate ground-truth boxes are dropped and counted", "[ingest]") {
  TempDir dir;
  write_text(dir.file("gt.json"), R"({
    "images": [{"id": 1, "width": 64, "height": 64}],
    "categories": [{"id": 1, "name": "a"}],
    "annotations": [
      {"image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 10]},
      {"image_id": 1, "category_id": 1, "bbox": [0, 0, 0, 10]},
      {"image_id": 1, "category_id": 1, "bbox": [0, 0, 10, -3]}
    ]
  })");
  const Dataset ds = load_ground_truth(dir.file("gt.json"));
  CHECK(ds.ground_truth.size() == 1);
  CHECK(ds.stats.dropped_degenerate_boxes == 2);
}

TEST_CASE("malformed documents are rejected", "[ingest]") {
  TempDir dir;
  write_text(dir.file("nonsense.json"), "{ not json ]");
  CHECK_THROWS_AS(load_ground_truth(dir.file("nonsense.json")), Error);
  write_text(dir.file("missing.json"), R"({"images": []})");
  CHECK_THROWS_AS(load_ground_truth(dir.file("missing.json")), Error);
  CHECK_THROWS_AS(load_ground_truth(dir.file("does_not_exist.json")), Error);
}

TEST_CASE("detection results load, clamp and validate", "[ingest]") {
  TempDir dir;
  write_text(dir.file("gt.json"), kMinimalGt);
  const Dataset ds = load_ground_truth(dir.file("gt.json"));

  write_text(dir.file("net__CPU__1.json"), R"([
    {"image_id": 1, "category_id": 1, "bbox": [10, 10, 20, 20], "score": 0.9},
    {"image_id": 1, "category_id": 1, "bbox": [0, 0, 5, 5], "score": 1.3}
  ])");
  const DetectionSet dets = load_detections(dir.file("net__CPU__1.json"), ds);
  REQUIRE(dets.detections.size() == 2);
  CHECK(dets.network_id == "net__CPU__1");
  CHECK(dets.detections[1].score == 1.0);
  CHECK(dets.stats.clamped_scores == 1);

  write_text(dir.file("empty.json"), "[]");
  CHECK(load_detections(dir.file("empty.json"), ds).detections.empty());

  write_text(dir.file("dangling.json"),
             R"([{"image_id": 7, "category_id": 1, "bbox": [0, 0, 5, 5], "score": 0.5}])");
  try {
    load_detections(dir.file("dangling.json"), ds);
    FAIL("expected dangling_reference");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dangling_reference);
  }
}

TEST_CASE("profile tables load with per-class columns", "[ingest]") {
  TempDir dir;
  write_text(dir.file("profiles.csv"),
             "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large,class:3\n"
             "faster-rcnn-nas,GPU,1,3200.0,0.44,0.20,0.48,0.60,0.50\n"
             "tiny-ssd,CPU,4,40.0,0.18,0.05,0.2,0.3,\n");
  LoadStats stats;
  const auto profiles = load_profiles(dir.file("profiles.csv"), &stats);
  REQUIRE(profiles.size() == 2);
  CHECK(profiles[0].model_name == "faster-rcnn-nas");
  CHECK(profiles[0].backend == Backend::GPU);
  CHECK(profiles[0].map_overall == 0.44);
  CHECK(profiles[0].per_class_map.at(3) == 0.50);
  CHECK(profiles[1].per_class_map.empty());  // empty cell means absent
  CHECK(stats.nonstandard_batches == 0);
}

TEST_CASE("duplicate configurations are a load error", "[ingest]") {
  TempDir dir;
  write_text(dir.file("profiles.csv"),
             "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large\n"
             "a,CPU,1,10,0.1,0.1,0.1,0.1\n"
             "a,CPU,1,20,0.2,0.2,0.2,0.2\n");
  try {
    load_profiles(dir.file("profiles.csv"));
    FAIL("expected duplicate_profile");
  } catch (const Error& e) {
    CHECK(e.code() == errc::duplicate_profile);
  }
}

TEST_CASE("a full campaign-shaped table yields 360 profiles", "[ingest]") {
  TempDir dir;
  std::string table =
      "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large\n";
  const char* backends[] = {"CPU", "CPU_AVX2", "GPU", "GPU_TRT", "GPU_TRT_DYN"};
  int row = 0;
  for (int m = 0; m < 12; ++m)
    for (const char* b : backends)
      for (const int batch : {1, 2, 4, 8, 16, 32}) {
        ++row;
        table += "net-" + std::to_string(m) + "," + b + "," + std::to_string(batch) + "," +
                 std::to_string(10 + row) + ",0.3,0.1,0.3,0.4\n";
      }
  write_text(dir.file("campaign.csv"), table);
  CHECK(load_profiles(dir.file("campaign.csv")).size() == 360);
}

TEST_CASE("odd batch sizes load with a warning count", "[ingest]") {
  TempDir dir;
  write_text(dir.file("profiles.csv"),
             "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large\n"
             "a,CPU,3,10,0.1,0.1,0.1,0.1\n");
  LoadStats stats;
  const auto profiles = load_profiles(dir.file("profiles.csv"), &stats);
  CHECK(profiles.size() == 1);
  CHECK(stats.nonstandard_batches == 1);
}

TEST_CASE("profile validation rejects bad values", "[ingest]") {
  TempDir dir;
  write_text(dir.file("bad_header.csv"), "model,backend,batch\na,CPU,1\n");
  CHECK_THROWS_AS(load_profiles(dir.file("bad_header.csv")), Error);
  write_text(dir.file("bad_latency.csv"),
             "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large\n"
             "a,CPU,1,0,0.1,0.1,0.1,0.1\n");
  CHECK_THROWS_AS(load_profiles(dir.file("bad_latency.csv")), Error);
  write_text(dir.file("bad_map.csv"),
             "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large\n"
             "a,CPU,1,10,1.5,0.1,0.1,0.1\n");
  CHECK_THROWS_AS(load_profiles(dir.file("bad_map.csv")), Error);
}

TEST_CASE("load-save-load is the identity for every format", "[ingest]") {
  TempDir dir;
  write_text(dir.file("gt.json"), R"({
    "images": [{"id": 1, "width": 64, "height": 48, "file_name": "a.png"}, {"id": 2, "width": 32, "height": 32}],
    "categories": [{"id": 1, "name": "alpha"}, {"id": 5, "name": "beta"}],
    "annotations": [
      {"image_id": 1, "category_id": 1, "bbox": [1.5, 2.25, 10.125, 20.0]},
      {"image_id": 2, "category_id": 5, "bbox": [3, 4, 5, 6], "iscrowd": 1}
    ]
  })");
  const Dataset first = load_ground_truth(dir.file("gt.json"));
  save_ground_truth(first, dir.file("gt2.json"));
  const Dataset second = load_ground_truth(dir.file("gt2.json"));
  REQUIRE(second.images.size() == first.images.size());
  for (std::size_t i = 0; i < first.images.size(); ++i) {
    CHECK(second.images[i].id == first.images[i].id);
    CHECK(second.images[i].width == first.images[i].width);
    CHECK(second.images[i].file_name == first.images[i].file_name);
  }
  REQUIRE(second.ground_truth.size() == first.ground_truth.size());
  for (std::size_t i = 0; i < first.ground_truth.size(); ++i) {
    CHECK(second.ground_truth[i].box == first.ground_truth[i].box);
    CHECK(second.ground_truth[i].ignored == first.ground_truth[i].ignored);
    CHECK(second.ground_truth[i].image_id == first.ground_truth[i].image_id);
  }

  write_text(dir.file("net__GPU__2.json"), R"([
    {"image_id": 1, "category_id": 1, "bbox": [0.5, 0.5, 9.75, 9.125], "score": 0.875},
    {"image_id": 2, "category_id": 5, "bbox": [1, 1, 2, 2], "score": 0.125}
  ])");
  const DetectionSet d1 = load_detections(dir.file("net__GPU__2.json"), first);
  save_detections(d1, dir.file("net__GPU__2b.json"));
  const DetectionSet d2 = load_detections(dir.file("net__GPU__2b.json"), first);
  REQUIRE(d2.detections.size() == d1.detections.size());
  for (std::size_t i = 0; i < d1.detections.size(); ++i) {
    CHECK(d2.detections[i].box == d1.detections[i].box);
    CHECK(d2.detections[i].score == d1.detections[i].score);
  }

  write_text(dir.file("p.csv"),
             "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large,class:3,class:7\n"
             "a,GPU_TRT,8,123.456,0.375,0.125,0.25,0.5,0.0625,\n"
             "b,CPU_AVX2,1,9.5,0.2,0.1,0.2,0.3,,0.75\n");
  const auto p1 = load_profiles(dir.file("p.csv"));
  save_profiles(p1, dir.file("p2.csv"));
  const auto p2 = load_profiles(dir.file("p2.csv"));
  REQUIRE(p2.size() == p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p2[i].id() == p1[i].id());
    CHECK(p2[i].latency_ms == p1[i].latency_ms);
    CHECK(p2[i].map_overall == p1[i].map_overall);
    CHECK(p2[i].per_class_map == p1[i].per_class_map);
  }
}
