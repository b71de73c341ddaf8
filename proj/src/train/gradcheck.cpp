#include "span/train/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace span::train {

using model::SpanModel;

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-5});
}

namespace {

double loss_of(const SpanModel<double>& model, const model::EncodedSubgraph& sample) {
  tensor::Tape<double> tape(false);
  return model::forward_sample(tape, model, sample).loss.item();
}

}  // namespace

GradCheckResult check_gradients(const SpanModel<double>& model, const model::EncodedSubgraph& sample,
                                const GradCheckOptions& options) {
  auto named = model.named_parameters();
  for (auto& p : named) p.tensor.zero_grad();
  {
    tensor::Tape<double> tape;
    auto out = model::forward_sample(tape, model, sample);
    tape.backward(out.loss);
  }

  // Candidate coordinates per tensor; embedding tables only where used.
  const std::size_t d = model.config().dim;
  std::vector<std::vector<std::size_t>> candidates(named.size());
  for (std::size_t t = 0; t < named.size(); ++t) {
    const auto& name = named[t].name;
    std::vector<std::int64_t> rows;
    if (name == "latent") rows.assign(sample.node_ids.begin(), sample.node_ids.end());
    if (name == "types") rows.assign(sample.type_ids.begin(), sample.type_ids.end());
    if (name == "latent" || name == "types") {
      for (auto r : rows) {
        if (r < 0) continue;
        for (std::size_t c = 0; c < d; ++c) candidates[t].push_back(static_cast<std::size_t>(r) * d + c);
      }
    } else {
      for (std::size_t i = 0; i < named[t].tensor.size(); ++i) candidates[t].push_back(i);
    }
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (std::size_t t = 0; t < named.size() && options.every_tensor; ++t) {
    if (candidates[t].empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, candidates[t].size() - 1);
    picks.emplace_back(t, candidates[t][pick(rng)]);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t t = 0; t < named.size(); ++t) {
    for (auto i : candidates[t]) pool.emplace_back(t, i);
  }
  std::uniform_int_distribution<std::size_t> pick_any(0, pool.size() - 1);
  for (std::size_t c = 0; c < options.coordinates; ++c) picks.push_back(pool[pick_any(rng)]);

  GradCheckResult result;
  for (auto [t, i] : picks) {
    auto values = named[t].tensor.values();
    const double saved = values[i];
    values[i] = saved + options.step;
    const double up = loss_of(model, sample);
    values[i] = saved - options.step;
    const double down = loss_of(model, sample);
    values[i] = saved;
    GradCheckEntry e{named[t].name, i, named[t].tensor.grad()[i], (up - down) / (2.0 * options.step), 0.0};
    e.rel_error = relative_error(e.analytic, e.numeric);
    result.max_rel_error = std::max(result.max_rel_error, e.rel_error);
    result.entries.push_back(e);
  }
  for (auto& p : named) p.tensor.zero_grad();
  result.passed = result.max_rel_error < options.tolerance;
  return result;
}

SpanModel<double> make_gradcheck_model(const model::ModelConfig& config, std::uint64_t seed) {
  SpanModel<double> m(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(config.dim));
  for (auto& p : m.named_parameters()) {
    if (p.name == "latent" || p.name == "types") continue;
    // Head logits stay O(1): tower outputs are layer-normed, so their inner
    // products and pooled sums grow like D.
    const bool head = p.name.rfind("head.", 0) == 0;
    const double scale = head ? inv_sqrt_d : 0.3 / std::sqrt(static_cast<double>(p.tensor.rows()));
    for (auto& v : p.tensor.values()) v += scale * noise(rng);
  }
  return m;
}

model::EncodedSubgraph make_gradcheck_sample(const model::ModelConfig& config, std::uint64_t seed) {
  if (config.num_nodes < 4 || config.max_nodes < 4) {
    throw std::invalid_argument("gradient check needs at least 4 nodes and k >= 4");
  }
  std::mt19937_64 rng(seed);
  const auto n = static_cast<graph::NodeId>(config.num_nodes);
  std::uniform_int_distribution<graph::NodeId> node(0, n - 1);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::vector<graph::TemporalEdge> edges;
  // A ring keeps every node active; random chords and later edges add variety.
  for (graph::NodeId v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n, weight(rng), 0.0});
  for (std::size_t i = 0; i < 2 * config.num_nodes; ++i) {
    const auto a = node(rng), b = node(rng);
    if (a != b) edges.push_back({a, b, weight(rng), i % 2 == 0 ? 0.0 : 1.0});
  }
  graph::DynamicGraph g(std::move(edges), config.num_nodes);
  if (config.num_types > 0) {
    std::vector<int> types(config.num_nodes);
    for (std::size_t v = 0; v < types.size(); ++v) types[v] = static_cast<int>(v % config.num_types);
    g.set_node_types(std::move(types));
  }
  const auto snaps = graph::split_snapshots(g, 2);

  sampling::SamplerConfig scfg;
  scfg.max_nodes = 4;
  scfg.seed = seed;
  for (std::uint64_t i = 0;; ++i) {
    auto stream = sampling::pair_stream(seed, 0, i);
    auto pair = sampling::sample_subgraph_pair(snaps[0], snaps[1], scfg, stream);
    if (pair.size() != 4) continue;
    auto enc = model::encode_pair(pair, snaps[0], config.max_nodes);
    enc.pattern_label = static_cast<double>(i % 2);
    return enc;
  }
}

}  // namespace span::train
