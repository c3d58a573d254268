#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "netsel/core.hpp"
#include "netsel/csv.hpp"
#include "netsel/error.hpp"

namespace netsel {

struct ImageInfo {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
  std::string file_name;
};

struct CategoryInfo {
  std::int64_t id = 0;
  std::string name;
};

// Counters for records the loaders altered or dropped. Nothing is dropped
// silently; callers surface these to the user.
struct LoadStats {
  std::size_t dropped_degenerate_boxes = 0;
  std::size_t clamped_scores = 0;
  std::size_t nonstandard_batches = 0;
};

struct Dataset {
  std::vector<ImageInfo> images;
  std::vector<CategoryInfo> categories;
  std::vector<GroundTruthBox> ground_truth;
  LoadStats stats;

  bool has_image(std::int64_t id) const {
    return std::any_of(images.begin(), images.end(),
                       [id](const ImageInfo& im) { return im.id == id; });
  }
  bool has_category(std::int64_t id) const {
    return std::any_of(categories.begin(), categories.end(),
                       [id](const CategoryInfo& c) { return c.id == id; });
  }
  std::vector<std::int64_t> sorted_image_ids() const {
    std::vector<std::int64_t> ids;
    ids.reserve(images.size());
    for (const auto& im : images) ids.push_back(im.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }
  std::vector<std::int64_t> sorted_category_ids() const {
    std::vector<std::int64_t> ids;
    ids.reserve(categories.size());
    for (const auto& c : categories) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }
};

struct DetectionSet {
  std::string network_id;
  std::vector<Detection> detections;
  LoadStats stats;
};

namespace detail {

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) fail(errc::malformed_file, path + ": invalid JSON");
  return doc;
}

inline BoundingBox read_bbox(const nlohmann::json& arr, const std::string& path) {
  if (!arr.is_array() || arr.size() != 4)
    fail(errc::malformed_file, path + ": bbox must be [x,y,w,h]");
  BoundingBox b;
  b.x = arr[0].get<double>();
  b.y = arr[1].get<double>();
  b.w = arr[2].get<double>();
  b.h = arr[3].get<double>();
  return b;
}

}  // namespace detail

// Reads a COCO-style annotation document (images / categories / annotations).
// Boxes with non-positive extent are dropped and counted; `iscrowd` and
// `ignore` both mark a box as ignored for matching.
inline Dataset load_ground_truth(const std::string& path) {
  const nlohmann::json doc = detail::parse_json_file(path);
  if (!doc.is_object() || !doc.contains("images") || !doc.contains("categories") ||
      !doc.contains("annotations"))
    fail(errc::malformed_file, path + ": expected images/categories/annotations keys");

  Dataset ds;
  try {
    std::set<std::int64_t> image_ids, category_ids;
    for (const auto& im : doc.at("images")) {
      ImageInfo info;
      info.id = im.at("id").get<std::int64_t>();
      info.width = im.value("width", 0);
      info.height = im.value("height", 0);
      info.file_name = im.value("file_name", std::string{});
      if (!image_ids.insert(info.id).second)
        fail(errc::malformed_file, path + ": duplicate image id " + std::to_string(info.id));
      ds.images.push_back(std::move(info));
    }
    for (const auto& c : doc.at("categories")) {
      CategoryInfo info;
      info.id = c.at("id").get<std::int64_t>();
      info.name = c.value("name", std::string{});
      if (!category_ids.insert(info.id).second)
        fail(errc::malformed_file, path + ": duplicate category id " + std::to_string(info.id));
      ds.categories.push_back(std::move(info));
    }
    for (const auto& a : doc.at("annotations")) {
      GroundTruthBox gt;
      gt.image_id = a.at("image_id").get<std::int64_t>();
      gt.category_id = a.at("category_id").get<std::int64_t>();
      gt.box = detail::read_bbox(a.at("bbox"), path);
      gt.ignored = a.value("iscrowd", 0) != 0 || a.value("ignore", 0) != 0;
      if (!image_ids.count(gt.image_id))
        fail(errc::dangling_reference,
             path + ": annotation references unknown image " + std::to_string(gt.image_id));
      if (!category_ids.count(gt.category_id))
        fail(errc::dangling_reference,
             path + ": annotation references unknown category " + std::to_string(gt.category_id));
      if (!gt.box.valid()) {
        ++ds.stats.dropped_degenerate_boxes;
        continue;
      }
      ds.ground_truth.push_back(gt);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed_file, path + ": " + e.what());
  }
  return ds;
}

inline void save_ground_truth(const Dataset& ds, const std::string& path) {
  nlohmann::json doc;
  doc["images"] = nlohmann::json::array();
  for (const auto& im : ds.images) {
    nlohmann::json j{{"id", im.id}, {"width", im.width}, {"height", im.height}};
    if (!im.file_name.empty()) j["file_name"] = im.file_name;
    doc["images"].push_back(std::move(j));
  }
  doc["categories"] = nlohmann::json::array();
  for (const auto& c : ds.categories)
    doc["categories"].push_back({{"id", c.id}, {"name", c.name}});
  doc["annotations"] = nlohmann::json::array();
  std::int64_t next_id = 1;
  for (const auto& gt : ds.ground_truth) {
    doc["annotations"].push_back({{"id", next_id++},
                                  {"image_id", gt.image_id},
                                  {"category_id", gt.category_id},
                                  {"bbox", {gt.box.x, gt.box.y, gt.box.w, gt.box.h}},
                                  {"iscrowd", gt.ignored ? 1 : 0}});
  }
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << doc.dump() << '\n';
}

// Reads a COCO-style results array. Scores outside [0,1] are clamped with a
// warning count; references to unknown images or categories are load errors.
inline DetectionSet load_detections(const std::string& path, const Dataset& dataset) {
  const nlohmann::json doc = detail::parse_json_file(path);
  if (!doc.is_array()) fail(errc::malformed_file, path + ": expected a results array");

  std::set<std::int64_t> image_ids, category_ids;
  for (const auto& im : dataset.images) image_ids.insert(im.id);
  for (const auto& c : dataset.categories) category_ids.insert(c.id);

  DetectionSet out;
  out.network_id = std::filesystem::path(path).stem().string();
  try {
    for (const auto& r : doc) {
      Detection d;
      d.image_id = r.at("image_id").get<std::int64_t>();
      d.category_id = r.at("category_id").get<std::int64_t>();
      d.box = detail::read_bbox(r.at("bbox"), path);
      d.score = r.at("score").get<double>();
      if (!image_ids.count(d.image_id))
        fail(errc::dangling_reference,
             path + ": detection references unknown image " + std::to_string(d.image_id));
      if (!category_ids.count(d.category_id))
        fail(errc::dangling_reference,
             path + ": detection references unknown category " + std::to_string(d.category_id));
      if (!d.box.valid()) {
        ++out.stats.dropped_degenerate_boxes;
        continue;
      }
      if (d.score < 0.0 || d.score > 1.0) {
        d.score = std::clamp(d.score, 0.0, 1.0);
        ++out.stats.clamped_scores;
      }
      out.detections.push_back(d);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed_file, path + ": " + e.what());
  }
  return out;
}

inline void save_detections(const DetectionSet& ds, const std::string& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& d : ds.detections) {
    doc.push_back({{"image_id", d.image_id},
                   {"category_id", d.category_id},
                   {"bbox", {d.box.x, d.box.y, d.box.w, d.box.h}},
                   {"score", d.score}});
  }
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << doc.dump() << '\n';
}

inline constexpr const char* kProfileHeader =
    "model,backend,batch,latency_ms,map_overall,map_small,map_medium,map_large";

// Loads a benchmark profile table. Fixed columns first, then any number of
// optional class:<category_id> columns with per-class mAP (cells may be empty).
inline std::vector<NetworkProfile> load_profiles(const std::string& path,
                                                 LoadStats* stats = nullptr) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) fail(errc::malformed_file, path + ": missing header");
  const auto& header = rows.front();
  const std::vector<std::string> fixed = csv::split(kProfileHeader);
  if (header.size() < fixed.size())
    fail(errc::malformed_file, path + ": truncated header");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      fail(errc::malformed_file, path + ": header column " + std::to_string(i) +
                                     " is '" + header[i] + "', expected '" + fixed[i] + "'");
  std::vector<std::int64_t> class_columns;
  for (std::size_t i = fixed.size(); i < header.size(); ++i) {
    if (header[i].rfind("class:", 0) != 0)
      fail(errc::malformed_file, path + ": unexpected column '" + header[i] + "'");
    class_columns.push_back(csv::parse_int(header[i].substr(6), path + " header"));
  }

  std::vector<NetworkProfile> profiles;
  std::set<std::tuple<std::string, Backend, int>> seen;
  LoadStats local;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r);
    if (row.size() != header.size())
      fail(errc::malformed_file, where + ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(row.size()));
    NetworkProfile p;
    p.model_name = row[0];
    const auto backend = parse_backend(row[1]);
    if (!backend) fail(errc::malformed_file, where + ": unknown backend '" + row[1] + "'");
    p.backend = *backend;
    p.batch_size = static_cast<int>(csv::parse_int(row[2], where));
    if (p.batch_size <= 0) fail(errc::malformed_file, where + ": batch must be positive");
    static constexpr int standard_batches[] = {1, 2, 4, 8, 16, 32};
    if (std::find(std::begin(standard_batches), std::end(standard_batches), p.batch_size) ==
        std::end(standard_batches))
      ++local.nonstandard_batches;
    p.latency_ms = csv::parse_double(row[3], where);
    if (!(p.latency_ms > 0)) fail(errc::malformed_file, where + ": latency_ms must be > 0");
    const auto read_map = [&](std::size_t col) {
      const double v = csv::parse_double(row[col], where);
      if (v < 0.0 || v > 1.0) fail(errc::malformed_file, where + ": mAP outside [0,1]");
      return v;
    };
    p.map_overall = read_map(4);
    p.map_small = read_map(5);
    p.map_medium = read_map(6);
    p.map_large = read_map(7);
    for (std::size_t i = 0; i < class_columns.size(); ++i) {
      const auto& cell = row[fixed.size() + i];
      if (cell.empty()) continue;
      p.per_class_map[class_columns[i]] = read_map(fixed.size() + i);
    }
    if (!seen.insert({p.model_name, p.backend, p.batch_size}).second)
      fail(errc::duplicate_profile, where + ": duplicate configuration " + p.id());
    profiles.push_back(std::move(p));
  }
  if (stats) *stats = local;
  return profiles;
}

inline void save_profiles(const std::vector<NetworkProfile>& profiles, const std::string& path) {
  std::set<std::int64_t> class_ids;
  for (const auto& p : profiles)
    for (const auto& [id, v] : p.per_class_map) class_ids.insert(id);

  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << kProfileHeader;
  for (const auto id : class_ids) out << ",class:" << id;
  out << '\n';
  for (const auto& p : profiles) {
    out << p.model_name << ',' << to_string(p.backend) << ',' << p.batch_size << ','
        << csv::fmt(p.latency_ms) << ',' << csv::fmt(p.map_overall) << ','
        << csv::fmt(p.map_small) << ',' << csv::fmt(p.map_medium) << ','
        << csv::fmt(p.map_large);
    for (const auto id : class_ids) {
      out << ',';
      const auto it = p.per_class_map.find(id);
      if (it != p.per_class_map.end()) out << csv::fmt(it->second);
    }
    out << '\n';
  }
}

}  // namespace netsel
