#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "span/model/forward.hpp"
#include "span/train/pattern.hpp"

namespace span::train {

enum class Task { SubgraphPrediction, PatternPrediction };

Task task_from_string(const std::string& name);
std::string to_string(Task task);

struct TrainConfig {
  Task task = Task::SubgraphPrediction;
  std::size_t k = 10;
  std::size_t dim = 128;
  std::size_t blocks = 6;
  std::size_t heads = 4;
  std::size_t ffn_dim = 0;  // 0 means 4 * dim
  double lr = 0.005;
  std::size_t epochs = 10;
  std::size_t snapshots = 10;             // subgraph prediction only
  std::size_t pairs_per_snapshot = 10000;  // training pairs per transition
  std::size_t test_pairs = 2000;
  std::size_t batch_size = 64;
  double alpha = 0.01;
  std::uint64_t seed = 0;
  int variant = 4;
  unsigned threads = 1;
  /// Replaces every label with a balanced coin flip (no-signal control).
  bool shuffle_labels = false;
  std::optional<PatternSpec> pattern;  // pattern prediction only

  void validate() const;
  model::ModelConfig model_config(std::size_t num_nodes, std::size_t num_types) const;
};

/// Encoded training and test samples for one task.
struct Dataset {
  Task task = Task::SubgraphPrediction;
  std::size_t num_nodes = 0;
  std::size_t num_types = 0;
  /// Training samples grouped by transition, in chronological order.
  std::vector<std::vector<model::EncodedSubgraph>> train;
  std::vector<model::EncodedSubgraph> test;
  std::vector<sampling::SubgraphPair> test_pairs;
  /// Current-graph degrees of every test subgraph's nodes, for the baseline.
  std::vector<std::vector<std::size_t>> test_degrees;
  std::vector<std::string> warnings;

  std::size_t num_train() const;
};

/// Subgraph evolution prediction: transitions (1,2) .. (T-2,T-1) train, (T-1,T)
/// tests. Snapshots without edges are skipped with a warning; an error is
/// raised when nothing is left to train on.
/// With `with_train` false only the test set is built.
Dataset build_subgraph_dataset(const graph::DynamicGraph& g, const TrainConfig& cfg, bool with_train = true);

/// Pattern prediction: the first 70% of edges form the current graph and the
/// rest the later one. Labels come from `cfg.pattern` and are balanced by
/// down-sampling the larger class; fewer than 50 positives is an error.
Dataset build_pattern_dataset(const graph::DynamicGraph& g, const TrainConfig& cfg, bool with_train = true);

struct MetricsRecord {
  std::size_t epoch = 0;
  double loss = 0.0;     // mean training loss per prediction unit
  double auc = 0.0;      // test AUC after the epoch
  double seconds = 0.0;  // cumulative training wall time
  std::size_t params = 0;
};

struct Evaluation {
  std::vector<double> scores;
  std::vector<int> labels;
  double auc = 0.0;
  double loss = 0.0;  // mean cross entropy per prediction unit
};

/// Scores every prediction unit of `samples` with frozen parameters.
Evaluation evaluate(const model::SpanModel<float>& model, std::span<const model::EncodedSubgraph> samples,
                    unsigned threads = 1);

/// Scores each candidate pair of the test subgraphs by deg(u) * deg(v) in the
/// current graph; subgraph prediction only.
Evaluation degree_product_baseline(const Dataset& data);

struct TrainResult {
  model::SpanModel<float> model;
  std::vector<MetricsRecord> metrics;
  Evaluation fresh;  // test evaluation before the first update
  Evaluation final;
};

using EpochCallback = std::function<void(const MetricsRecord&)>;

TrainResult train_model(const Dataset& data, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

TrainResult train_subgraph_prediction(const graph::DynamicGraph& g, const TrainConfig& cfg);
TrainResult train_pattern_prediction(const graph::DynamicGraph& g, const TrainConfig& cfg);

}  // namespace span::train
