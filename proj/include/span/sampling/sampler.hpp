#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "span/graph/temporal_graph.hpp"

namespace span::sampling {

using graph::InducedSubgraph;
using graph::NodeId;
using graph::Snapshot;

struct SamplerConfig {
  int max_nodes = 10;             // k
  double jump_probability = 0.01;  // alpha
  std::uint64_t seed = 0;
  int max_retries = 64;

  void validate() const;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major n x n matrix of path probabilities between subgraph nodes.
struct BayesAttentionMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }

  friend bool operator==(const BayesAttentionMatrix&, const BayesAttentionMatrix&) = default;
};

/// One subgraph evolution pair: the same ordered node set induced in the
/// current graph and the next one.
struct SubgraphPair {
  std::size_t t = 0;
  std::vector<NodeId> nodes;
  InducedSubgraph current;
  InducedSubgraph next;
  BayesAttentionMatrix attention;

  std::size_t size() const { return nodes.size(); }
  friend bool operator==(const SubgraphPair&, const SubgraphPair&) = default;
};

/// w(v_i, v_j) / sum_k w(v_i, v_k) over the snapshot's edges.
double transfer_probability(const Snapshot& s, NodeId from, NodeId to);

/// Draws a neighbor of `from` with probability proportional to edge weight,
/// skipping nodes for which `excluded` returns true. Returns false when every
/// neighbor is excluded.
template <typename Excluded>
bool draw_neighbor(const Snapshot& s, NodeId from, std::mt19937_64& rng, Excluded excluded, NodeId& out) {
  double total = 0.0;
  for (const auto& nb : s.neighbors(from)) {
    if (!excluded(nb.id)) total += nb.weight;
  }
  if (total <= 0.0) return false;
  double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  NodeId last = 0;
  for (const auto& nb : s.neighbors(from)) {
    if (excluded(nb.id)) continue;
    last = nb.id;
    r -= nb.weight;
    if (r < 0.0) break;
  }
  out = last;
  return true;
}

inline NodeId draw_neighbor(const Snapshot& s, NodeId from, std::mt19937_64& rng) {
  NodeId out = 0;
  if (!draw_neighbor(s, from, rng, [](NodeId) { return false; }, out)) {
    throw SamplingError("node has no neighbors");
  }
  return out;
}

/// Grows one node set in `current` by weighted neighbor expansion with random
/// jumps, and induces it in both graphs.
SubgraphPair sample_subgraph_pair(const Snapshot& current, const Snapshot& next, const SamplerConfig& cfg,
                                  std::mt19937_64& rng);

/// Independent RNG stream for pair `index` of transition `t`; results do not
/// depend on how pairs are spread across threads.
std::mt19937_64 pair_stream(std::uint64_t seed, std::uint64_t t, std::uint64_t index);

/// Samples `count` pairs using `threads` workers. Pair i is drawn from
/// pair_stream(cfg.seed, current.index(), first_index + i).
std::vector<SubgraphPair> sample_pairs(const Snapshot& current, const Snapshot& next, const SamplerConfig& cfg,
                                       std::size_t count, std::size_t first_index = 0, unsigned threads = 1);

}  // namespace span::sampling
