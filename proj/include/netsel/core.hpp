#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "netsel/error.hpp"

namespace netsel {

// Axis-aligned box in continuous pixel coordinates, (x, y) = top-left corner.
struct BoundingBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  bool valid() const {
    return w > 0 && h > 0 && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(w) && std::isfinite(h);
  }
  bool operator==(const BoundingBox&) const = default;
};

enum class SizeBucket { Small, Medium, Large };

inline const char* to_string(SizeBucket b) {
  switch (b) {
    case SizeBucket::Small: return "small";
    case SizeBucket::Medium: return "medium";
    case SizeBucket::Large: return "large";
  }
  return "?";
}

// COCO-style area classes: boundary areas (32*32, 96*96) go to the larger bucket.
inline SizeBucket area_bucket(const BoundingBox& box) {
  const double area = box.area();
  if (area < 32.0 * 32.0) return SizeBucket::Small;
  if (area < 96.0 * 96.0) return SizeBucket::Medium;
  return SizeBucket::Large;
}

struct GroundTruthBox {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BoundingBox box;
  bool ignored = false;
};

struct Detection {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BoundingBox box;
  double score = 0;  // confidence in [0, 1]
};

enum class Backend { CPU, CPU_AVX2, GPU, GPU_TRT, GPU_TRT_DYN };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::CPU: return "CPU";
    case Backend::CPU_AVX2: return "CPU_AVX2";
    case Backend::GPU: return "GPU";
    case Backend::GPU_TRT: return "GPU_TRT";
    case Backend::GPU_TRT_DYN: return "GPU_TRT_DYN";
  }
  return "?";
}

inline std::optional<Backend> parse_backend(const std::string& s) {
  if (s == "CPU") return Backend::CPU;
  if (s == "CPU_AVX2") return Backend::CPU_AVX2;
  if (s == "GPU") return Backend::GPU;
  if (s == "GPU_TRT") return Backend::GPU_TRT;
  if (s == "GPU_TRT_DYN") return Backend::GPU_TRT_DYN;
  return std::nullopt;
}

// One measured (model, backend, batch) configuration of the benchmark campaign.
struct NetworkProfile {
  std::string model_name;
  Backend backend = Backend::CPU;
  int batch_size = 1;
  double latency_ms = 0;
  double map_overall = 0;
  double map_small = 0;
  double map_medium = 0;
  double map_large = 0;
  std::map<std::int64_t, double> per_class_map;

  // Registry-unique ordering key. Batch compares numerically.
  std::tuple<const std::string&, Backend, int> key() const {
    return {model_name, backend, batch_size};
  }

  // Canonical identifier, also used as a file-name stem: model__BACKEND__batch.
  std::string id() const {
    return model_name + "__" + to_string(backend) + "__" + std::to_string(batch_size);
  }
};

inline bool key_less(const NetworkProfile& a, const NetworkProfile& b) {
  return a.key() < b.key();
}

// Parses "model__BACKEND__batch" back into its parts.
struct ParsedNetworkId {
  std::string model;
  Backend backend;
  int batch;
};

inline ParsedNetworkId parse_network_id(const std::string& id) {
  const auto last = id.rfind("__");
  if (last == std::string::npos || last + 2 >= id.size())
    fail(errc::malformed_file, "network id '" + id + "' is not model__BACKEND__batch");
  const auto mid = id.rfind("__", last - 1);
  if (mid == std::string::npos || mid == 0)
    fail(errc::malformed_file, "network id '" + id + "' is not model__BACKEND__batch");
  ParsedNetworkId out;
  out.model = id.substr(0, mid);
  const std::string backend_str = id.substr(mid + 2, last - mid - 2);
  const auto backend = parse_backend(backend_str);
  if (!backend)
    fail(errc::malformed_file, "unknown backend '" + backend_str + "' in network id '" + id + "'");
  out.backend = *backend;
  const std::string batch_str = id.substr(last + 2);
  try {
    std::size_t pos = 0;
    out.batch = std::stoi(batch_str, &pos);
    if (pos != batch_str.size() || out.batch <= 0) throw std::invalid_argument("batch");
  } catch (const std::exception&) {
    fail(errc::malformed_file, "bad batch size '" + batch_str + "' in network id '" + id + "'");
  }
  return out;
}

// Per-(image, network) accuracy record. A missing value means the image has no
// ground truth, which is distinct from a score of 0.
struct PerImageScore {
  std::int64_t image_id = 0;
  std::string network_id;
  std::optional<double> score;  // nullopt = no ground truth
  double latency_ms = 0;
};

// Accuracy metric selector: overall / small / medium / large / class:<id>.
struct MetricKey {
  enum class Kind { Overall, Small, Medium, Large, PerClass };
  Kind kind = Kind::Overall;
  std::int64_t category_id = 0;

  static MetricKey parse(const std::string& s) {
    if (s.empty() || s == "overall") return {Kind::Overall, 0};
    if (s == "small") return {Kind::Small, 0};
    if (s == "medium") return {Kind::Medium, 0};
    if (s == "large") return {Kind::Large, 0};
    if (s.rfind("class:", 0) == 0) {
      const std::string id_str = s.substr(6);
      try {
        std::size_t pos = 0;
        const std::int64_t id = std::stoll(id_str, &pos);
        if (pos != id_str.size()) throw std::invalid_argument("trailing");
        return {Kind::PerClass, id};
      } catch (const std::exception&) {
        fail(errc::unknown_metric, "bad category id in metric '" + s + "'");
      }
    }
    fail(errc::unknown_metric, "unknown accuracy metric '" + s + "'");
  }

  std::string str() const {
    switch (kind) {
      case Kind::Overall: return "overall";
      case Kind::Small: return "small";
      case Kind::Medium: return "medium";
      case Kind::Large: return "large";
      case Kind::PerClass: return "class:" + std::to_string(category_id);
    }
    return "?";
  }

  bool operator==(const MetricKey&) const = default;
};

inline double accuracy_of(const NetworkProfile& p, const MetricKey& metric) {
  switch (metric.kind) {
    case MetricKey::Kind::Overall: return p.map_overall;
    case MetricKey::Kind::Small: return p.map_small;
    case MetricKey::Kind::Medium: return p.map_medium;
    case MetricKey::Kind::Large: return p.map_large;
    case MetricKey::Kind::PerClass: {
      const auto it = p.per_class_map.find(metric.category_id);
      if (it == p.per_class_map.end())
        fail(errc::unknown_metric,
             "profile " + p.id() + " has no class:" + std::to_string(metric.category_id) + " column");
      return it->second;
    }
  }
  fail(errc::unknown_metric, "bad metric kind");
}

}  // namespace netsel
