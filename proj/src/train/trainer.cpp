#include "span/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

#include "span/tensor/adam.hpp"
#include "span/train/auc.hpp"

namespace span::train {

using model::EncodedSubgraph;
using model::HeadKind;
using model::SpanModel;

Task task_from_string(const std::string& name) {
  if (name == "subgraph") return Task::SubgraphPrediction;
  if (name == "pattern") return Task::PatternPrediction;
  throw std::invalid_argument("unknown task '" + name + "' (expected subgraph or pattern)");
}

std::string to_string(Task task) { return task == Task::SubgraphPrediction ? "subgraph" : "pattern"; }

void TrainConfig::validate() const {
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (dim == 0 || blocks == 0 || heads == 0) throw std::invalid_argument("D, b and h must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
  if (pairs_per_snapshot == 0 || test_pairs == 0) throw std::invalid_argument("pair counts must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (variant < 1 || variant > 4) throw std::invalid_argument("ablation variant must be 1, 2, 3 or 4");
  if (threads == 0) throw std::invalid_argument("threads must be positive");
  if (task == Task::SubgraphPrediction && snapshots < 3) {
    throw std::invalid_argument("subgraph prediction needs at least 3 snapshots");
  }
  if (task == Task::PatternPrediction && !pattern) throw std::invalid_argument("pattern prediction needs a pattern");
}

model::ModelConfig TrainConfig::model_config(std::size_t num_nodes, std::size_t num_types) const {
  model::ModelConfig m;
  m.num_nodes = num_nodes;
  m.num_types = num_types;
  m.dim = dim;
  m.blocks = blocks;
  m.heads = heads;
  m.ffn_dim = ffn_dim;
  m.max_nodes = k;
  m.head = task == Task::SubgraphPrediction ? HeadKind::Span : HeadKind::SpanH;
  m.variant = model::variant_from_int(variant);
  m.seed = seed;
  return m;
}

std::size_t Dataset::num_train() const {
  std::size_t n = 0;
  for (const auto& group : train) n += group.size();
  return n;
}

namespace {

sampling::SamplerConfig sampler_config(const TrainConfig& cfg) {
  sampling::SamplerConfig s;
  s.max_nodes = static_cast<int>(cfg.k);
  s.jump_probability = cfg.alpha;
  s.seed = cfg.seed;
  return s;
}

std::vector<std::size_t> degrees_of(const sampling::SubgraphPair& pair, const graph::Snapshot& s) {
  std::vector<std::size_t> out;
  for (auto v : pair.nodes) out.push_back(s.degree(v));
  return out;
}

// Coin-flip labels for the no-signal control, symmetric for edge labels.
void shuffle_labels(std::vector<EncodedSubgraph>& samples, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  for (auto& s : samples) {
    for (std::size_t i = 0; i < s.n; ++i) {
      for (std::size_t j = i + 1; j < s.n; ++j) {
        const double y = coin(rng) ? 1.0 : 0.0;
        s.next_adjacency[i * s.k + j] = y;
        s.next_adjacency[j * s.k + i] = y;
      }
    }
    s.pattern_label = coin(rng) ? 1.0 : 0.0;
  }
}

constexpr std::uint64_t kShuffleSalt = 0x6c62272e07bb0142ULL;
constexpr std::uint64_t kLabelSalt = 0x2545f4914f6cdd1dULL;

}  // namespace

Dataset build_subgraph_dataset(const graph::DynamicGraph& g, const TrainConfig& cfg, bool with_train) {
  cfg.validate();
  Dataset data;
  data.task = Task::SubgraphPrediction;
  data.num_nodes = g.num_nodes();
  data.num_types = g.num_types();
  const auto snaps = graph::split_snapshots(g, cfg.snapshots);
  const auto scfg = sampler_config(cfg);

  for (std::size_t t = 0; t + 2 < snaps.size(); ++t) {
    if (!with_train) break;
    if (snaps[t].num_edges() == 0) {
      data.warnings.push_back("snapshot " + std::to_string(snaps[t].index()) + " has no edges; skipped");
      continue;
    }
    auto pairs = sampling::sample_pairs(snaps[t], snaps[t + 1], scfg, cfg.pairs_per_snapshot, 0, cfg.threads);
    std::vector<EncodedSubgraph> group;
    group.reserve(pairs.size());
    for (const auto& p : pairs) group.push_back(model::encode_pair(p, snaps[t], cfg.k));
    data.train.push_back(std::move(group));
  }
  if (with_train && data.train.empty()) throw std::runtime_error("every training snapshot is empty; nothing to train on");

  const auto& current = snaps[snaps.size() - 2];
  const auto& next = snaps.back();
  if (current.num_edges() == 0) throw std::runtime_error("the test snapshot has no edges");
  data.test_pairs = sampling::sample_pairs(current, next, scfg, cfg.test_pairs, 0, cfg.threads);
  for (const auto& p : data.test_pairs) {
    data.test.push_back(model::encode_pair(p, current, cfg.k));
    data.test_degrees.push_back(degrees_of(p, current));
  }

  if (cfg.shuffle_labels) {
    // Separate streams keep test labels identical whether or not training
    // samples were built.
    std::mt19937_64 train_rng(cfg.seed ^ kLabelSalt);
    std::mt19937_64 test_rng(~cfg.seed ^ kLabelSalt);
    for (auto& group : data.train) shuffle_labels(group, train_rng);
    shuffle_labels(data.test, test_rng);
  }
  return data;
}

Dataset build_pattern_dataset(const graph::DynamicGraph& g, const TrainConfig& cfg, bool with_train) {
  cfg.validate();
  const PatternSpec& spec = *cfg.pattern;
  if (spec.needs_types() && g.num_types() == 0) {
    throw std::invalid_argument("pattern " + spec.to_string() + " needs node types");
  }
  Dataset data;
  data.task = Task::PatternPrediction;
  data.num_nodes = g.num_nodes();
  data.num_types = g.num_types();
  const auto [current, later] = graph::split_by_edge_fraction(g, 0.7);
  if (current.num_edges() == 0) throw std::runtime_error("the first 70% of edges form an empty graph");
  const auto scfg = sampler_config(cfg);
  const auto types = current.node_types();

  // Labels every candidate, then keeps equally many of each class in draw order.
  auto labeled = [&](std::size_t count, std::size_t first_index, const char* what) {
    auto pairs = sampling::sample_pairs(current, later, scfg, count, first_index, cfg.threads);
    std::vector<sampling::SubgraphPair> pos, neg;
    for (auto& p : pairs) {
      std::vector<int> sub_types;
      if (!types.empty()) {
        for (auto v : p.nodes) sub_types.push_back(types[v]);
      }
      (spec.holds(p.current, p.next, sub_types) ? pos : neg).push_back(std::move(p));
    }
    if (pos.size() < 50) {
      throw std::runtime_error(std::string("only ") + std::to_string(pos.size()) + " positive " + what +
                               " examples for pattern " + spec.to_string() + "; at least 50 are needed");
    }
    if (neg.empty()) throw std::runtime_error(std::string("no negative ") + what + " examples");
    const std::size_t keep = std::min(pos.size(), neg.size());
    std::vector<std::pair<sampling::SubgraphPair, bool>> out;
    for (std::size_t i = 0; i < keep; ++i) {
      out.emplace_back(std::move(pos[i]), true);
      out.emplace_back(std::move(neg[i]), false);
    }
    return out;
  };

  auto encode = [&](const sampling::SubgraphPair& p, bool label) {
    auto enc = model::encode_pair(p, current, cfg.k);
    enc.pattern_label = label ? 1.0 : 0.0;
    return enc;
  };

  if (with_train) {
    std::vector<EncodedSubgraph> group;
    for (const auto& [p, label] : labeled(cfg.pairs_per_snapshot, 0, "training")) group.push_back(encode(p, label));
    data.train.push_back(std::move(group));
  }
  for (auto& [p, label] : labeled(cfg.test_pairs, cfg.pairs_per_snapshot, "test")) {
    data.test.push_back(encode(p, label));
    data.test_degrees.push_back(degrees_of(p, current));
    data.test_pairs.push_back(std::move(p));
  }

  if (cfg.shuffle_labels) {
    // Separate streams keep test labels identical whether or not training
    // samples were built.
    std::mt19937_64 train_rng(cfg.seed ^ kLabelSalt);
    std::mt19937_64 test_rng(~cfg.seed ^ kLabelSalt);
    for (auto& group : data.train) shuffle_labels(group, train_rng);
    shuffle_labels(data.test, test_rng);
  }
  return data;
}

namespace {

void collect(const SpanModel<float>& model, const EncodedSubgraph& enc, tensor::Tape<float>& tape,
             Evaluation& out) {
  auto result = model::forward_sample(tape, model, enc);
  out.loss += result.loss.item();
  if (model.config().head == HeadKind::Span) {
    for (std::size_t i = 0; i < enc.n; ++i) {
      for (std::size_t j = i + 1; j < enc.n; ++j) {
        out.scores.push_back(result.prediction(i, j));
        out.labels.push_back(enc.next_adjacency[i * enc.k + j] > 0.5 ? 1 : 0);
      }
    }
  } else {
    out.scores.push_back(result.prediction.item());
    out.labels.push_back(enc.pattern_label > 0.5 ? 1 : 0);
  }
}

}  // namespace

Evaluation evaluate(const SpanModel<float>& model, std::span<const EncodedSubgraph> samples, unsigned threads) {
  if (samples.empty()) throw std::invalid_argument("nothing to evaluate");
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, samples.size());
  std::vector<Evaluation> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    try {
      tensor::Tape<float> tape(false);
      const std::size_t lo = samples.size() * w / workers, hi = samples.size() * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) collect(model, samples[i], tape, parts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Evaluation out;
  for (auto& p : parts) {
    out.scores.insert(out.scores.end(), p.scores.begin(), p.scores.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.loss += p.loss;
  }
  out.loss /= static_cast<double>(out.scores.size());
  out.auc = evaluate_auc(out.scores, out.labels);
  return out;
}

Evaluation degree_product_baseline(const Dataset& data) {
  if (data.task != Task::SubgraphPrediction) throw std::invalid_argument("the degree baseline scores edge pairs");
  Evaluation out;
  for (std::size_t s = 0; s < data.test.size(); ++s) {
    const auto& enc = data.test[s];
    const auto& deg = data.test_degrees[s];
    for (std::size_t i = 0; i < enc.n; ++i) {
      for (std::size_t j = i + 1; j < enc.n; ++j) {
        out.scores.push_back(static_cast<double>(deg[i]) * static_cast<double>(deg[j]));
        out.labels.push_back(enc.next_adjacency[i * enc.k + j] > 0.5 ? 1 : 0);
      }
    }
  }
  out.auc = evaluate_auc(out.scores, out.labels);
  return out;
}

TrainResult train_model(const Dataset& data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.num_train() == 0 || data.test.empty()) throw std::invalid_argument("dataset has no samples");
  TrainResult result{SpanModel<float>(cfg.model_config(data.num_nodes, data.num_types)), {}, {}, {}};
  auto& model = result.model;
  auto params = model.parameters();
  tensor::AdamOptions opts;
  opts.lr = cfg.lr;
  auto adam = tensor::AdamState<float>::for_parameters(params, opts);
  const std::size_t params_total = model.param_count();

  result.fresh = evaluate(model, data.test, cfg.threads);
  std::mt19937_64 rng(cfg.seed ^ kShuffleSalt);
  double seconds = 0.0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    std::size_t units = 0;
    for (const auto& group : data.train) {
      std::vector<std::size_t> order(group.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
        const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
        tensor::Tape<float> tape;
        tensor::Tensor<float> total;
        for (std::size_t i = lo; i < hi; ++i) {
          auto out = model::forward_sample(tape, model, group[order[i]]);
          loss_sum += out.loss.item();
          units += out.units;
          total = total.defined() ? tape.add(total, out.loss) : out.loss;
        }
        tape.backward(tape.scale(total, 1.0f / static_cast<float>(hi - lo)));
        tensor::adam_step(std::span<tensor::Tensor<float>>(params), adam);
      }
    }
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    result.final = evaluate(model, data.test, cfg.threads);
    MetricsRecord rec{epoch, units ? loss_sum / static_cast<double>(units) : 0.0, result.final.auc, seconds,
                      params_total};
    result.metrics.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

TrainResult train_subgraph_prediction(const graph::DynamicGraph& g, const TrainConfig& cfg) {
  if (cfg.task != Task::SubgraphPrediction) throw std::invalid_argument("config is not a subgraph prediction task");
  return train_model(build_subgraph_dataset(g, cfg), cfg);
}

TrainResult train_pattern_prediction(const graph::DynamicGraph& g, const TrainConfig& cfg) {
  if (cfg.task != Task::PatternPrediction) throw std::invalid_argument("config is not a pattern prediction task");
  return train_model(build_pattern_dataset(g, cfg), cfg);
}

}  // namespace span::train
