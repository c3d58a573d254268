#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "netsel/error.hpp"
#include "netsel/pca.hpp"
#include "netsel/rng.hpp"

namespace netsel {

struct LabeledRow {
  std::int64_t image_id = 0;
  std::vector<double> features;
  std::string label;  // target network id
};

struct LabeledCorpus {
  std::vector<LabeledRow> rows;
};

// Seeded undersampling to the minority-class count.
inline LabeledCorpus balance(const LabeledCorpus& corpus, std::uint64_t seed) {
  if (corpus.rows.empty()) fail(errc::empty_class, "cannot balance an empty corpus");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < corpus.rows.size(); ++i)
    by_label[corpus.rows[i].label].push_back(i);

  std::size_t minority = corpus.rows.size();
  for (const auto& [label, idx] : by_label) minority = std::min(minority, idx.size());

  Rng rng(seed);
  std::vector<std::size_t> kept;
  for (auto& [label, idx] : by_label) {
    rng.shuffle(idx);
    kept.insert(kept.end(), idx.begin(), idx.begin() + minority);
  }
  std::sort(kept.begin(), kept.end());

  LabeledCorpus out;
  out.rows.reserve(kept.size());
  for (const std::size_t i : kept) out.rows.push_back(corpus.rows[i]);
  return out;
}

// Seeded shuffle split into disjoint, exhaustive train/test parts.
inline std::pair<LabeledCorpus, LabeledCorpus> split(const LabeledCorpus& corpus,
                                                     double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0) || !(train_fraction < 1))
    fail(errc::invalid_argument, "train fraction must be in (0, 1)");
  std::vector<std::size_t> order(corpus.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(order.size())));
  LabeledCorpus train, test;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? train : test).rows.push_back(corpus.rows[order[i]]);
  return {std::move(train), std::move(test)};
}

enum class ClassifierKind { KNearest, DecisionTree, Majority };

inline const char* to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::KNearest: return "knn";
    case ClassifierKind::DecisionTree: return "tree";
    case ClassifierKind::Majority: return "majority";
  }
  return "?";
}

inline ClassifierKind parse_classifier_kind(const std::string& s) {
  if (s == "knn") return ClassifierKind::KNearest;
  if (s == "tree") return ClassifierKind::DecisionTree;
  if (s == "majority") return ClassifierKind::Majority;
  fail(errc::unknown_kind, "unknown classifier kind '" + s + "'");
}

struct TrainParams {
  int knn_k = 5;
  int tree_max_depth = 10;
  int tree_min_leaf = 2;
};

struct KnnModel {
  int k = 5;
  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
};

struct TreeNode {
  int feature = -1;        // -1 for leaves
  double threshold = 0;
  int left = -1;           // node indices
  int right = -1;
  std::string label;       // leaf prediction
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct MajorityModel {
  std::string label;
};

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::Majority;
  std::variant<KnnModel, TreeModel, MajorityModel> model = MajorityModel{};
};

namespace detail {

inline std::string majority_label(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {  // map order resolves ties lexicographically
      best = label;
      best_count = count;
    }
  }
  return best;
}

inline double gini(const std::map<std::string, std::size_t>& counts, std::size_t total) {
  double impurity = 1.0;
  for (const auto& [label, count] : counts) {
    const double p = static_cast<double>(count) / static_cast<double>(total);
    impurity -= p * p;
  }
  return impurity;
}

// Recursive Gini-greedy builder: midpoint thresholds, first-feature tie-break,
// depth and leaf-size limits.
inline int build_tree(TreeModel& tree, const LabeledCorpus& corpus,
                      const std::vector<std::size_t>& rows, int depth, const TrainParams& params) {
  std::map<std::string, std::size_t> counts;
  for (const std::size_t r : rows) ++counts[corpus.rows[r].label];

  const int node_index = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  tree.nodes[node_index].label = majority_label(counts);
  if (counts.size() <= 1 || depth >= params.tree_max_depth) return node_index;

  const std::size_t dims = corpus.rows[rows.front()].features.size();
  const double parent_impurity = gini(counts, rows.size());
  int best_feature = -1;
  double best_threshold = 0;
  double best_score = parent_impurity;  // must strictly improve

  std::vector<std::pair<double, std::string>> column(rows.size());
  for (std::size_t f = 0; f < dims; ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      column[i] = {corpus.rows[rows[i]].features[f], corpus.rows[rows[i]].label};
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::map<std::string, std::size_t> left_counts;
    std::map<std::string, std::size_t> right_counts = counts;
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      ++left_counts[column[i].second];
      auto it = right_counts.find(column[i].second);
      if (--it->second == 0) right_counts.erase(it);
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t n_left = i + 1, n_right = column.size() - n_left;
      if (n_left < static_cast<std::size_t>(params.tree_min_leaf) ||
          n_right < static_cast<std::size_t>(params.tree_min_leaf))
        continue;
      const double score =
          (static_cast<double>(n_left) * gini(left_counts, n_left) +
           static_cast<double>(n_right) * gini(right_counts, n_right)) /
          static_cast<double>(column.size());
      if (score < best_score - 1e-12) {
        best_score = score;
        best_feature = static_cast<int>(f);
        best_threshold = (column[i].first + column[i + 1].first) / 2.0;
      }
    }
  }
  if (best_feature < 0) return node_index;

  std::vector<std::size_t> left_rows, right_rows;
  for (const std::size_t r : rows)
    (corpus.rows[r].features[best_feature] <= best_threshold ? left_rows : right_rows)
        .push_back(r);
  tree.nodes[node_index].feature = best_feature;
  tree.nodes[node_index].threshold = best_threshold;
  const int left = build_tree(tree, corpus, left_rows, depth + 1, params);
  const int right = build_tree(tree, corpus, right_rows, depth + 1, params);
  tree.nodes[node_index].left = left;
  tree.nodes[node_index].right = right;
  return node_index;
}

}  // namespace detail

inline ClassifierModel train(ClassifierKind kind, const LabeledCorpus& corpus,
                             const TrainParams& params = {}, std::uint64_t seed = 42) {
  (void)seed;  // all three kinds are deterministic given the input order
  if (corpus.rows.empty()) fail(errc::empty_class, "cannot train on an empty corpus");

  ClassifierModel out;
  out.kind = kind;
  switch (kind) {
    case ClassifierKind::KNearest: {
      KnnModel m;
      m.k = std::max(1, params.knn_k);
      for (const auto& r : corpus.rows) {
        m.points.push_back(r.features);
        m.labels.push_back(r.label);
      }
      out.model = std::move(m);
      break;
    }
    case ClassifierKind::DecisionTree: {
      TreeModel m;
      std::vector<std::size_t> rows(corpus.rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      detail::build_tree(m, corpus, rows, 0, params);
      out.model = std::move(m);
      break;
    }
    case ClassifierKind::Majority: {
      std::map<std::string, std::size_t> counts;
      for (const auto& r : corpus.rows) ++counts[r.label];
      out.model = MajorityModel{detail::majority_label(counts)};
      break;
    }
  }
  return out;
}

inline std::string predict(const ClassifierModel& model, const std::vector<double>& features) {
  if (const auto* knn = std::get_if<KnnModel>(&model.model)) {
    struct Neighbor {
      double dist2;
      const std::string* label;
    };
    std::vector<Neighbor> neighbors;
    neighbors.reserve(knn->points.size());
    for (std::size_t i = 0; i < knn->points.size(); ++i) {
      double d2 = 0;
      for (std::size_t j = 0; j < features.size(); ++j) {
        const double d = features[j] - knn->points[i][j];
        d2 += d * d;
      }
      neighbors.push_back({d2, &knn->labels[i]});
    }
    const std::size_t k = std::min<std::size_t>(knn->k, neighbors.size());
    // Distance ties resolve by lexicographic label so votes are reproducible.
    std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
      return *a.label < *b.label;
    });
    std::map<std::string, std::size_t> votes;
    for (std::size_t i = 0; i < k; ++i) ++votes[*neighbors[i].label];
    return detail::majority_label(votes);
  }
  if (const auto* tree = std::get_if<TreeModel>(&model.model)) {
    int node = 0;
    while (tree->nodes[node].feature >= 0) {
      const TreeNode& n = tree->nodes[node];
      node = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    return tree->nodes[node].label;
  }
  return std::get<MajorityModel>(model.model).label;
}

struct ClassifierReport {
  double accuracy = 0;
  double baseline_accuracy = 0;  // Majority on the same test set
  double delta = 0;
  std::map<std::string, std::map<std::string, std::size_t>> confusion;  // true -> predicted
};

inline ClassifierReport evaluate(const ClassifierModel& model, const LabeledCorpus& test,
                                 const ClassifierModel& majority_baseline) {
  if (test.rows.empty()) fail(errc::empty_class, "cannot evaluate on an empty test set");
  ClassifierReport report;
  std::size_t correct = 0, baseline_correct = 0;
  for (const auto& r : test.rows) {
    const std::string predicted = predict(model, r.features);
    ++report.confusion[r.label][predicted];
    if (predicted == r.label) ++correct;
    if (predict(majority_baseline, r.features) == r.label) ++baseline_correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(test.rows.size());
  report.baseline_accuracy =
      static_cast<double>(baseline_correct) / static_cast<double>(test.rows.size());
  report.delta = report.accuracy - report.baseline_accuracy;
  return report;
}

// --- predictor bundle (standardize -> PCA -> classifier) -------------------

struct PredictorModel {
  PcaModel pca;
  ClassifierModel classifier;
};

inline std::string predict(const PredictorModel& model, const std::vector<double>& raw_features) {
  return predict(model.classifier, pca_transform(model.pca, raw_features));
}

inline constexpr int kModelFormatVersion = 1;

inline void save_predictor(const PredictorModel& model, const std::string& path) {
  nlohmann::json doc;
  doc["format"] = "netsel-predictor";
  doc["version"] = kModelFormatVersion;
  doc["pca"] = {{"means", model.pca.means},
                {"stdevs", model.pca.stdevs},
                {"components", model.pca.components},
                {"explained_variance_ratio", model.pca.explained_variance_ratio}};
  nlohmann::json clf;
  clf["kind"] = to_string(model.classifier.kind);
  if (const auto* knn = std::get_if<KnnModel>(&model.classifier.model)) {
    clf["k"] = knn->k;
    clf["points"] = knn->points;
    clf["labels"] = knn->labels;
  } else if (const auto* tree = std::get_if<TreeModel>(&model.classifier.model)) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree->nodes)
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"label", n.label}});
    clf["nodes"] = std::move(nodes);
  } else {
    clf["label"] = std::get<MajorityModel>(model.classifier.model).label;
  }
  doc["classifier"] = std::move(clf);
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

inline PredictorModel load_predictor(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) fail(errc::malformed_file, path + ": invalid JSON");
  try {
    if (doc.at("format") != "netsel-predictor" || doc.at("version") != kModelFormatVersion)
      fail(errc::malformed_file, path + ": not a netsel predictor model (or wrong version)");
    PredictorModel model;
    const auto& pca = doc.at("pca");
    model.pca.means = pca.at("means").get<std::vector<double>>();
    model.pca.stdevs = pca.at("stdevs").get<std::vector<double>>();
    model.pca.components = pca.at("components").get<std::vector<std::vector<double>>>();
    model.pca.explained_variance_ratio =
        pca.at("explained_variance_ratio").get<std::vector<double>>();
    const auto& clf = doc.at("classifier");
    model.classifier.kind = parse_classifier_kind(clf.at("kind").get<std::string>());
    switch (model.classifier.kind) {
      case ClassifierKind::KNearest: {
        KnnModel m;
        m.k = clf.at("k").get<int>();
        m.points = clf.at("points").get<std::vector<std::vector<double>>>();
        m.labels = clf.at("labels").get<std::vector<std::string>>();
        model.classifier.model = std::move(m);
        break;
      }
      case ClassifierKind::DecisionTree: {
        TreeModel m;
        for (const auto& n : clf.at("nodes"))
          m.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(),
                             n.at("left").get<int>(), n.at("right").get<int>(),
                             n.at("label").get<std::string>()});
        model.classifier.model = std::move(m);
        break;
      }
      case ClassifierKind::Majority:
        model.classifier.model = MajorityModel{clf.at("label").get<std::string>()};
        break;
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed_file, path + ": " + e.what());
  }
}

}  // namespace netsel
