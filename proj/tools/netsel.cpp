// netsel: benchmark-driven network selection for object detection.
//
// Subcommands chain into the usual workflows:
//   eval -> pareto -> oracle -> features -> train -> predict, plus simulate
// for constraint-driven stream runs. All outputs are deterministic for a
// fixed seed; nothing writes timestamps.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netsel/netsel.hpp"

namespace fs = std::filesystem;
using namespace netsel;

namespace {

// Tracks files written by a command so a failure removes partial outputs.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& p : paths_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
  std::string track(const fs::path& p) {
    paths_.push_back(p);
    return p.string();
  }
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> paths_;
  bool committed_ = false;
};

struct GlobalOptions {
  unsigned threads = default_thread_count();
  std::uint64_t seed = 42;
};

fs::path ensure_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<NetworkProfile> load_registry(const std::string& path) {
  LoadStats stats;
  auto profiles = load_profiles(path, &stats);
  if (stats.nonstandard_batches)
    std::cerr << "warning: " << stats.nonstandard_batches << " profile(s) in " << path
              << " use batch sizes outside {1,2,4,8,16,32}\n";
  if (profiles.empty()) fail(errc::empty_registry, path + " contains no profiles");
  return profiles;
}

void report_load_stats(const std::string& what, const LoadStats& stats) {
  if (stats.dropped_degenerate_boxes)
    std::cerr << "warning: dropped " << stats.dropped_degenerate_boxes
              << " degenerate box(es) from " << what << '\n';
  if (stats.clamped_scores)
    std::cerr << "warning: clamped " << stats.clamped_scores << " out-of-range score(s) in "
              << what << '\n';
}

// Detection files are named after the configuration that produced them:
// <model>__<BACKEND>__<batch>.json.
ParsedNetworkId network_id_of(const std::string& path) {
  const std::string stem = fs::path(path).stem().string();
  try {
    return parse_network_id(stem);
  } catch (const Error&) {
    fail(errc::invalid_argument,
         "detection file '" + path + "' must be named <model>__<BACKEND>__<batch>.json");
  }
}

std::map<std::string, double> load_latency_map(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || csv::join(rows.front()) != "network_id,latency_ms")
    fail(errc::malformed_file, path + ": expected header 'network_id,latency_ms'");
  std::map<std::string, double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) fail(errc::malformed_file, path + ": expected 2 fields");
    out[rows[r][0]] = csv::parse_double(rows[r][1], path);
  }
  return out;
}

svg::Marker marker_for(Backend b) {
  switch (b) {
    case Backend::CPU: return svg::Marker::Circle;
    case Backend::CPU_AVX2: return svg::Marker::Square;
    case Backend::GPU: return svg::Marker::Triangle;
    case Backend::GPU_TRT: return svg::Marker::Diamond;
    case Backend::GPU_TRT_DYN: return svg::Marker::Cross;
  }
  return svg::Marker::Circle;
}

std::string profile_scatter_svg(const std::vector<NetworkProfile>& registry,
                                const std::vector<FrontierPoint>& frontier,
                                const MetricKey& metric) {
  std::map<std::string, std::size_t> model_color;
  for (const auto& p : registry) model_color.emplace(p.model_name, model_color.size());

  double max_latency = 0, max_accuracy = 0;
  for (const auto& p : registry) {
    max_latency = std::max(max_latency, p.latency_ms);
    max_accuracy = std::max(max_accuracy, accuracy_of(p, metric));
  }
  svg::Axis x{"latency [ms]", 0, max_latency * 1.05};
  svg::Axis y{"mAP (" + metric.str() + ")", 0, std::max(0.01, max_accuracy * 1.15)};

  std::vector<svg::ScatterPoint> points;
  for (const auto& p : registry) {
    svg::ScatterPoint pt;
    pt.x = p.latency_ms;
    pt.y = accuracy_of(p, metric);
    pt.size = 2.5 + 1.2 * std::sqrt(static_cast<double>(p.batch_size));
    pt.marker = marker_for(p.backend);
    pt.color = svg::palette()[model_color.at(p.model_name) % svg::palette().size()];
    pt.tooltip = p.id();
    points.push_back(std::move(pt));
  }
  std::vector<std::pair<double, double>> line;
  for (const auto& f : frontier) line.emplace_back(f.latency_ms, f.accuracy);
  std::vector<svg::LegendEntry> legend;
  for (const auto& [model, idx] : model_color)
    legend.push_back({model, svg::palette()[idx % svg::palette().size()]});
  return svg::scatter_chart("accuracy vs latency (marker: backend, size: batch)", x, y, points,
                            line, legend);
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string dataset;
  std::vector<std::string> detections;
  std::string latencies;
  std::string out_dir;
  bool per_image = false;
  bool per_class = false;
};

void run_eval(const EvalArgs& args, const GlobalOptions& global) {
  const Dataset dataset = load_ground_truth(args.dataset);
  report_load_stats(args.dataset, dataset.stats);
  std::map<std::string, double> latencies;
  if (!args.latencies.empty()) latencies = load_latency_map(args.latencies);

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string report_path = guard.track(out / "eval_report.csv");
  const std::string scores_path = guard.track(out / "per_image_scores.csv");

  const auto class_columns = dataset.sorted_category_ids();
  struct RowResult {
    std::string row;
    std::vector<PerImageScore> scores;
  };
  std::vector<RowResult> results(args.detections.size());
  parallel_for(args.detections.size(), global.threads, [&](std::size_t i) {
    const std::string& path = args.detections[i];
    const ParsedNetworkId id = network_id_of(path);
    const DetectionSet detset = load_detections(path, dataset);
    const EvalReport report = evaluate_dataset(dataset, detset, {}, true);
    const auto lat = latencies.find(detset.network_id);
    const double latency = lat == latencies.end() ? 0.0 : lat->second;
    results[i].row = report_row(report, id.model, id.backend, id.batch, latency,
                                args.per_class ? std::span<const std::int64_t>(class_columns)
                                               : std::span<const std::int64_t>{});
    if (args.per_image)
      results[i].scores = evaluate_per_image(dataset, detset, std::nullopt, latency);
  });

  std::ofstream report_file(report_path);
  report_file << kProfileHeader;
  if (args.per_class)
    for (const auto c : class_columns) report_file << ",class:" << c;
  report_file << '\n';
  for (const auto& r : results) report_file << r.row << '\n';
  report_file.close();

  if (args.per_image) {
    std::vector<PerImageScore> all;
    for (const auto& r : results) all.insert(all.end(), r.scores.begin(), r.scores.end());
    save_per_image_scores(all, scores_path);
  } else {
    fs::remove(scores_path);
  }
  guard.commit();
  std::cerr << "evaluated " << args.detections.size() << " detection set(s) -> " << report_path
            << '\n';
}

// --- pareto -----------------------------------------------------------------

struct ParetoArgs {
  std::string profiles;
  std::string metric = "overall";
  std::string out_dir;
};

void run_pareto(const ParetoArgs& args) {
  const auto registry = load_registry(args.profiles);
  const MetricKey metric = MetricKey::parse(args.metric);
  const auto frontier = pareto_frontier(registry, metric);
  const auto best = best_per_network(registry, metric);

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string frontier_path = guard.track(out / "frontier.csv");
  const std::string best_path = guard.track(out / "best_per_network.csv");
  const std::string svg_path = guard.track(out / "frontier.svg");

  std::ofstream f(frontier_path);
  f << "model,backend,batch,latency_ms,accuracy\n";
  for (const auto& p : frontier)
    f << p.profile.model_name << ',' << to_string(p.profile.backend) << ','
      << p.profile.batch_size << ',' << csv::fmt(p.latency_ms) << ',' << csv::fmt(p.accuracy)
      << '\n';
  f.close();

  std::ofstream b(best_path);
  b << "model,backend,batch,latency_ms,accuracy\n";
  for (const auto& [model, p] : best)
    b << model << ',' << to_string(p.profile.backend) << ',' << p.profile.batch_size << ','
      << csv::fmt(p.latency_ms) << ',' << csv::fmt(p.accuracy) << '\n';
  b.close();

  svg::write_file(profile_scatter_svg(registry, frontier, metric), svg_path);
  guard.commit();
  std::cerr << "frontier has " << frontier.size() << " of " << registry.size()
            << " configurations -> " << frontier_path << '\n';
}

// --- oracle -----------------------------------------------------------------

struct OracleArgs {
  std::string dataset;
  std::vector<std::string> detections;
  std::vector<std::string> score_tables;
  std::string profiles;
  std::string bucket;  // "", small, medium, large
  std::string metric = "overall";
  std::string out_dir;
  bool pareto_only = false;
};

void run_oracle(const OracleArgs& args, const GlobalOptions& global) {
  const auto registry = load_registry(args.profiles);
  std::map<std::string, const NetworkProfile*> by_id;
  for (const auto& p : registry) by_id[p.id()] = &p;

  std::optional<SizeBucket> bucket;
  if (args.bucket == "small") bucket = SizeBucket::Small;
  else if (args.bucket == "medium") bucket = SizeBucket::Medium;
  else if (args.bucket == "large") bucket = SizeBucket::Large;
  else if (!args.bucket.empty())
    fail(errc::invalid_argument, "--bucket must be small, medium or large");

  std::vector<PerImageScore> scores;
  if (!args.detections.empty()) {
    if (args.dataset.empty())
      fail(errc::invalid_argument, "--dataset is required when scoring detection files");
    const Dataset dataset = load_ground_truth(args.dataset);
    report_load_stats(args.dataset, dataset.stats);
    std::vector<std::vector<PerImageScore>> per_net(args.detections.size());
    parallel_for(args.detections.size(), global.threads, [&](std::size_t i) {
      const DetectionSet detset = load_detections(args.detections[i], dataset);
      const auto it = by_id.find(detset.network_id);
      if (it == by_id.end())
        fail(errc::incomplete_scores,
             "no profile for detection set " + detset.network_id + " (check --profiles)");
      per_net[i] = evaluate_per_image(dataset, detset, bucket, it->second->latency_ms);
    });
    for (auto& s : per_net) scores.insert(scores.end(), s.begin(), s.end());
  }
  for (const auto& table : args.score_tables) {
    const auto loaded = load_per_image_scores(table);
    scores.insert(scores.end(), loaded.begin(), loaded.end());
  }
  if (scores.empty())
    fail(errc::invalid_argument, "nothing to label: pass --detections or --scores");

  // Candidates are the networks that were actually scored; the profile table
  // may cover a larger campaign.
  std::set<std::string> scored;
  for (const auto& s : scores) scored.insert(s.network_id);
  std::vector<NetworkProfile> candidates;
  for (const auto& p : registry)
    if (scored.count(p.id())) candidates.push_back(p);
  for (const auto& id : scored)
    if (!by_id.count(id))
      fail(errc::incomplete_scores, "no profile for scored network " + id);
  std::cerr << "considering " << candidates.size() << " scored network(s)\n";

  OracleResult result;
  if (args.pareto_only) {
    const auto frontier = pareto_frontier(candidates, MetricKey::parse(args.metric));
    result = restrict_to_pareto(scores, frontier);
    std::cerr << "restricted to " << frontier.size() << " Pareto-optimal network(s)\n";
  } else {
    result = build_oracle(scores, candidates);
  }

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string oracle_path = guard.track(out / "oracle.csv");
  const std::string scores_path = guard.track(out / "per_image_scores.csv");
  const std::string dist_path = guard.track(out / "distribution.csv");
  const std::string pie_path = guard.track(out / "distribution.svg");

  save_oracle(result, oracle_path);
  save_per_image_scores(scores, scores_path);
  const auto dist = oracle_distribution(result.labels);
  save_distribution(dist, result.excluded_no_ground_truth, dist_path);

  std::vector<std::pair<std::string, double>> slices;
  for (const auto& [id, e] : dist) slices.emplace_back(id, e.fraction);
  std::sort(slices.begin(), slices.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  svg::write_file(svg::pie_chart("oracle composition", slices), pie_path);

  guard.commit();
  std::cerr << "labeled " << result.labels.size() << " image(s), excluded "
            << result.excluded_no_ground_truth << " without ground truth -> " << oracle_path
            << '\n';
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string profiles;
  std::string scenario;
  std::string latency_trace;
  std::string infeasible = "fallback";
  std::int64_t frames = 0;
  std::string out_dir;
};

void run_simulate(const SimulateArgs& args) {
  const auto registry = load_registry(args.profiles);
  InfeasiblePolicy policy;
  if (args.infeasible == "fallback") policy = InfeasiblePolicy::FastestFallback;
  else if (args.infeasible == "reject") policy = InfeasiblePolicy::Reject;
  else fail(errc::invalid_argument, "--infeasible must be 'fallback' or 'reject'");
  const auto events = load_scenario(args.scenario, policy);
  std::map<std::int64_t, double> overrides;
  if (!args.latency_trace.empty()) overrides = load_latency_trace(args.latency_trace);

  const SelectionTrace trace = simulate_stream(registry, events, args.frames, overrides);

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string trace_path = guard.track(out / "trace.csv");
  const std::string svg_path = guard.track(out / "trace.svg");
  save_trace(trace, trace_path);

  svg::Series latency{"latency [ms]", "#1f77b4", {}};
  svg::Series objective{"objective", "#2ca02c", {}};
  svg::Series overall{"mAP overall", "#d62728", {}};
  for (const auto& e : trace) {
    latency.points.emplace_back(static_cast<double>(e.frame), e.latency_ms);
    objective.points.emplace_back(static_cast<double>(e.frame), e.objective);
    overall.points.emplace_back(static_cast<double>(e.frame), e.map_overall);
  }
  std::vector<double> marks;
  for (const auto& e : events)
    if (e.frame_index > 0 && e.frame_index < args.frames)
      marks.push_back(static_cast<double>(e.frame_index));
  svg::write_file(svg::timeseries_chart("stream simulation", "frame",
                                        {latency, objective, overall}, marks),
                  svg_path);
  guard.commit();

  std::size_t switches = 0;
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].network_id != trace[i - 1].network_id) ++switches;
  std::cerr << "simulated " << trace.size() << " frame(s), " << switches
            << " network switch(es) -> " << trace_path << '\n';
}

// --- features ---------------------------------------------------------------

struct FeatureArgs {
  std::vector<std::string> images;
  std::string out_dir;
  FeatureConfig config;
  bool timings = false;
};

std::vector<std::string> expand_images(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& input : inputs) {
    if (fs::is_directory(input)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(input)) {
        const auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".bmp") found.push_back(entry.path().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(input);
    }
  }
  if (files.empty()) fail(errc::invalid_argument, "no input images found");
  return files;
}

void run_features(const FeatureArgs& args, const GlobalOptions& global) {
  const auto files = expand_images(args.images);
  std::vector<std::pair<std::int64_t, FeatureVector>> rows(files.size());
  parallel_for(files.size(), global.threads, [&](std::size_t i) {
    const std::string stem = fs::path(files[i]).stem().string();
    std::int64_t id = 0;
    try {
      id = csv::parse_int(stem, files[i]);
    } catch (const Error&) {
      fail(errc::invalid_argument,
           "image file name '" + files[i] + "' must be a numeric image id");
    }
    rows[i] = {id, extract_all(load_image(files[i]), args.config)};
  });
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].first == rows[i - 1].first)
      fail(errc::invalid_argument,
           "two input images share the id " + std::to_string(rows[i].first));

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string table_path = guard.track(out / "features.csv");
  save_feature_table(rows, table_path);
  guard.commit();

  if (args.timings) {
    // Per-group timing over the whole corpus, reported to stderr so the CSV
    // outputs stay byte-stable.
    using clock = std::chrono::steady_clock;
    double glcm_ms = 0, hist_ms = 0, grad_ms = 0, peak_ms = 0, corner_ms = 0;
    for (const auto& f : files) {
      const RasterImage img = load_image(f);
      const GrayImage gray = to_grayscale(img);
      const auto time_of = [](auto&& fn) {
        const auto t0 = clock::now();
        fn();
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      };
      glcm_ms += time_of([&] { glcm_features(gray); });
      hist_ms += time_of([&] { histogram_features(img); });
      grad_ms += time_of([&] { gradient_features(gray, args.config); });
      peak_ms += time_of([&] { count_peaks(gray, args.config); });
      corner_ms += time_of([&] { count_corners(gray, args.config); });
    }
    std::cerr << "feature timing over " << files.size() << " image(s) [ms total]: glcm="
              << glcm_ms << " histograms=" << hist_ms << " gradients=" << grad_ms
              << " peaks=" << peak_ms << " corners=" << corner_ms << '\n';
  }
  std::cerr << "extracted " << rows.size() << " feature row(s) -> " << table_path << '\n';
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string features;
  std::string oracle;
  std::string out_dir;
  double variance_target = 0.95;
  double train_fraction = 0.9;
  TrainParams params;
  std::string control = "none";
  bool no_balance = false;
};

LabeledCorpus join_corpus(const std::string& feature_path, const std::string& oracle_path) {
  const auto features = load_feature_table(feature_path);
  const auto labels = load_oracle(oracle_path);
  std::map<std::int64_t, std::string> label_of;
  for (const auto& l : labels)
    if (!label_of.emplace(l.image_id, l.network_id).second)
      fail(errc::malformed_file, oracle_path + ": duplicate label for image " +
                                     std::to_string(l.image_id));
  LabeledCorpus corpus;
  std::size_t unlabeled = 0;
  std::set<std::int64_t> with_features;
  for (const auto& [id, v] : features) {
    if (!with_features.insert(id).second)
      fail(errc::malformed_file, feature_path + ": duplicate image id " + std::to_string(id));
    const auto it = label_of.find(id);
    if (it == label_of.end()) {
      ++unlabeled;
      continue;
    }
    LabeledRow row;
    row.image_id = id;
    row.features.assign(v.values.begin(), v.values.end());
    row.label = it->second;
    corpus.rows.push_back(std::move(row));
  }
  std::size_t featureless = 0;
  for (const auto& l : labels)
    if (!with_features.count(l.image_id)) ++featureless;
  if (unlabeled || featureless)
    std::cerr << "warning: skipped " << unlabeled << " image(s) without oracle label and "
              << featureless << " label(s) without features\n";
  if (corpus.rows.empty())
    fail(errc::empty_class, "no images have both features and an oracle label");
  return corpus;
}

void run_train(const TrainArgs& args, const GlobalOptions& global) {
  LabeledCorpus corpus = join_corpus(args.features, args.oracle);

  if (args.control == "shuffled") {
    // Negative control: re-pair feature vectors with labels at random.
    std::vector<std::size_t> order(corpus.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(global.seed + 1000003);
    rng.shuffle(order);
    LabeledCorpus shuffled = corpus;
    for (std::size_t i = 0; i < order.size(); ++i)
      shuffled.rows[i].features = corpus.rows[order[i]].features;
    corpus = std::move(shuffled);
    std::cerr << "control: features permuted against labels\n";
  } else if (args.control != "none") {
    fail(errc::invalid_argument, "--control must be 'none' or 'shuffled'");
  }

  if (!args.no_balance) corpus = balance(corpus, global.seed);
  const auto [train_set, test_set] = split(corpus, args.train_fraction, global.seed + 1);
  if (test_set.rows.empty()) fail(errc::degenerate_corpus, "test split is empty");

  std::vector<std::vector<double>> train_features;
  for (const auto& r : train_set.rows) train_features.push_back(r.features);
  const PcaModel pca = pca_fit(train_features, args.variance_target);
  LabeledCorpus train_reduced = train_set, test_reduced = test_set;
  for (auto& r : train_reduced.rows) r.features = pca_transform(pca, r.features);
  for (auto& r : test_reduced.rows) r.features = pca_transform(pca, r.features);
  std::cerr << "train=" << train_set.rows.size() << " test=" << test_set.rows.size()
            << " pca_components=" << pca.n_components() << '\n';

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string report_path = guard.track(out / "train_report.csv");

  const ClassifierModel majority =
      train(ClassifierKind::Majority, train_reduced, args.params, global.seed);
  std::ofstream report(report_path);
  report << "kind,accuracy,baseline_accuracy,delta\n";
  for (const auto kind :
       {ClassifierKind::KNearest, ClassifierKind::DecisionTree, ClassifierKind::Majority}) {
    const ClassifierModel model = train(kind, train_reduced, args.params, global.seed);
    const ClassifierReport r = evaluate(model, test_reduced, majority);
    report << to_string(kind) << ',' << csv::fmt(r.accuracy) << ','
           << csv::fmt(r.baseline_accuracy) << ',' << csv::fmt(r.delta) << '\n';
    PredictorModel bundle{pca, model};
    save_predictor(bundle,
                   guard.track(out / ("model_" + std::string(to_string(kind)) + ".json")));
  }
  report.close();
  guard.commit();
  std::cerr << "wrote " << report_path << '\n';
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string features;
  std::string out_dir;
};

void run_predict(const PredictArgs& args, const GlobalOptions& global) {
  const PredictorModel model = load_predictor(args.model);
  const auto features = load_feature_table(args.features);

  std::vector<std::string> predicted(features.size());
  parallel_for(features.size(), global.threads, [&](std::size_t i) {
    std::vector<double> raw(features[i].second.values.begin(),
                            features[i].second.values.end());
    predicted[i] = predict(model, raw);
  });

  const fs::path out = ensure_out_dir(args.out_dir);
  OutputGuard guard;
  const std::string path = guard.track(out / "predictions.csv");
  std::ofstream f(path);
  f << "image_id,network_id\n";
  for (std::size_t i = 0; i < features.size(); ++i)
    f << features[i].first << ',' << predicted[i] << '\n';
  f.close();
  guard.commit();
  std::cerr << "predicted " << features.size() << " image(s) -> " << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netsel: benchmark-driven network selection for object detection"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  GlobalOptions global;
  app.add_option("--threads", global.threads, "worker thread cap")
      ->envname("NETSEL_THREADS")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", global.seed, "seed for every random choice")->capture_default_str();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score detection files against ground truth");
  eval->add_option("--dataset", eval_args.dataset, "COCO-style annotation JSON")->required();
  eval->add_option("--detections", eval_args.detections,
                   "COCO-style result JSON files, named <model>__<BACKEND>__<batch>.json")
      ->required()
      ->expected(-1);
  eval->add_option("--latencies", eval_args.latencies,
                   "optional CSV network_id,latency_ms merged into the report");
  eval->add_flag("--per-image", eval_args.per_image, "also write per-image scores");
  eval->add_flag("--per-class", eval_args.per_class, "append class:<id> columns");
  eval->add_option("--out-dir", eval_args.out_dir, "output directory")->required();

  ParetoArgs pareto_args;
  auto* pareto = app.add_subcommand("pareto", "extract the accuracy/latency Pareto frontier");
  pareto->add_option("--profiles", pareto_args.profiles, "benchmark profile CSV")->required();
  pareto->add_option("--metric", pareto_args.metric,
                     "accuracy metric: overall|small|medium|large|class:<id>")
      ->capture_default_str();
  pareto->add_option("--out-dir", pareto_args.out_dir, "output directory")->required();

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "label each image with its best network");
  oracle->add_option("--dataset", oracle_args.dataset, "COCO-style annotation JSON");
  oracle->add_option("--detections", oracle_args.detections, "per-network result JSON files")
      ->expected(-1);
  oracle->add_option("--scores", oracle_args.score_tables,
                     "precomputed per-image score tables (skip scoring)")
      ->expected(-1);
  oracle->add_option("--profiles", oracle_args.profiles, "benchmark profile CSV")->required();
  oracle->add_option("--bucket", oracle_args.bucket,
                     "score on a size bucket instead of overall: small|medium|large");
  oracle->add_flag("--pareto-only", oracle_args.pareto_only,
                   "restrict candidates to the Pareto frontier");
  oracle->add_option("--metric", oracle_args.metric, "frontier metric for --pareto-only")
      ->capture_default_str();
  oracle->add_option("--out-dir", oracle_args.out_dir, "output directory")->required();

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "run the constraint-driven stream simulator");
  simulate->add_option("--profiles", sim_args.profiles, "benchmark profile CSV")->required();
  simulate->add_option("--scenario", sim_args.scenario,
                       "scenario CSV: frame,label,max_latency_ms,min_accuracy,objective")
      ->required();
  simulate->add_option("--frames", sim_args.frames, "number of frames to simulate")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--latency-trace", sim_args.latency_trace,
                       "optional per-frame latency override CSV: frame,latency_ms");
  simulate->add_option("--infeasible", sim_args.infeasible, "fallback|reject")
      ->capture_default_str();
  simulate->add_option("--out-dir", sim_args.out_dir, "output directory")->required();

  FeatureArgs feature_args;
  auto* features = app.add_subcommand("features", "extract the 56-value image descriptor");
  features->add_option("--images", feature_args.images,
                       "PNG/BMP files or directories; stems are numeric image ids")
      ->required()
      ->expected(-1);
  features->add_option("--edge-threshold", feature_args.config.edge_threshold,
                       "edge cut as a fraction of max gradient magnitude")
      ->capture_default_str();
  features->add_option("--peak-threshold", feature_args.config.peak_min_level,
                       "peak brightness cut as a fraction of 255")
      ->capture_default_str();
  features->add_option("--harris-k", feature_args.config.harris_k, "Harris k parameter")
      ->capture_default_str();
  features->add_option("--harris-threshold", feature_args.config.harris_threshold,
                       "corner cut as a fraction of max response")
      ->capture_default_str();
  features->add_flag("--timings", feature_args.timings, "report per-feature timing to stderr");
  features->add_option("--out-dir", feature_args.out_dir, "output directory")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train the oracle predictor pipeline");
  train_cmd->add_option("--features", train_args.features, "feature table CSV")->required();
  train_cmd->add_option("--oracle", train_args.oracle, "oracle label CSV")->required();
  train_cmd->add_option("--variance-target", train_args.variance_target,
                        "explained-variance retention target")
      ->capture_default_str();
  train_cmd->add_option("--train-fraction", train_args.train_fraction, "train split fraction")
      ->capture_default_str();
  train_cmd->add_option("--knn-k", train_args.params.knn_k, "k for k-NN")->capture_default_str();
  train_cmd->add_option("--tree-max-depth", train_args.params.tree_max_depth,
                        "decision tree depth limit")
      ->capture_default_str();
  train_cmd->add_option("--tree-min-leaf", train_args.params.tree_min_leaf,
                        "minimum rows per leaf")
      ->capture_default_str();
  train_cmd->add_option("--control", train_args.control,
                        "none|shuffled (shuffled permutes features against labels)")
      ->capture_default_str();
  train_cmd->add_flag("--no-balance", train_args.no_balance, "skip class balancing");
  train_cmd->add_option("--out-dir", train_args.out_dir, "output directory")->required();

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "predict the best network per image");
  predict_cmd->add_option("--model", predict_args.model, "trained model JSON")->required();
  predict_cmd->add_option("--features", predict_args.features, "feature table CSV")->required();
  predict_cmd->add_option("--out-dir", predict_args.out_dir, "output directory")->required();

  // Global options (--seed, --threads) are accepted after the subcommand too.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (eval->parsed()) run_eval(eval_args, global);
    if (pareto->parsed()) run_pareto(pareto_args);
    if (oracle->parsed()) run_oracle(oracle_args, global);
    if (simulate->parsed()) run_simulate(sim_args);
    if (features->parsed()) run_features(feature_args, global);
    if (train_cmd->parsed()) run_train(train_args, global);
    if (predict_cmd->parsed()) run_predict(predict_args, global);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == errc::infeasible ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
