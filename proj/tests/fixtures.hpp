#pragma once

// Random fixtures and conversions shared by the model tests and the
// acceptance run.

#include <algorithm>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "span/model/forward.hpp"
#include "span/sampling/sampler.hpp"

namespace fixtures {

using namespace span::model;
using oracle::Matrix;
using span::graph::NodeId;
using span::graph::Snapshot;
using span::sampling::SubgraphPair;

template <typename Real>
inline Matrix to_matrix(const Tensor<Real>& t) {
  Matrix m = oracle::zeros(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t(i, j);
  return m;
}

inline Tensor<double> from_matrix(const Matrix& m) {
  std::vector<double> v;
  for (const auto& row : m) v.insert(v.end(), row.begin(), row.end());
  return Tensor<double>::from_values(m.size(), m[0].size(), v);
}

inline std::vector<double> row_vector(const Tensor<double>& t) { return {t.values().begin(), t.values().end()}; }

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m = oracle::zeros(r, c);
  for (auto& row : m)
    for (auto& x : row) x = n(rng);
  return m;
}

// k x D matrix whose rows >= n are zero.
inline Matrix padded_random(std::size_t n, std::size_t k, std::size_t d, std::mt19937_64& rng) {
  Matrix m = random_matrix(k, d, rng);
  for (std::size_t i = n; i < k; ++i) std::fill(m[i].begin(), m[i].end(), 0.0);
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b, std::size_t rows, std::size_t cols) {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

// Copy of a double model in another precision.
template <typename Real>
SpanModel<Real> convert(const SpanModel<double>& src) {
  SpanModel<Real> dst(src.config());
  auto from = src.named_parameters();
  auto to = dst.named_parameters();
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto in = from[i].tensor.values();
    auto out = to[i].tensor.values();
    for (std::size_t j = 0; j < in.size(); ++j) out[j] = static_cast<Real>(in[j]);
  }
  return dst;
}

struct Fixture {
  Snapshot current;
  Snapshot next;
  std::vector<SubgraphPair> pairs;
};

// Two random snapshots over `nodes` nodes with sampled pairs of size <= max_nodes.
inline Fixture make_fixture(std::size_t nodes, int max_nodes, std::size_t count, std::uint64_t seed, double alpha = 0.1) {
  std::mt19937_64 rng(seed);
  auto random_snapshot = [&](std::size_t index) {
    std::vector<Snapshot::Edge> edges;
    std::uniform_real_distribution<double> w(0.5, 2.0);
    std::bernoulli_distribution keep(3.0 / static_cast<double>(nodes));
    for (NodeId u = 0; u < nodes; ++u)
      for (NodeId v = u + 1; v < nodes; ++v)
        if (keep(rng) || v == u + 1) edges.push_back({u, v, w(rng)});
    return Snapshot(nodes, edges, index);
  };
  Fixture f{random_snapshot(1), random_snapshot(2), {}};
  span::sampling::SamplerConfig cfg;
  cfg.max_nodes = max_nodes;
  cfg.jump_probability = alpha;
  cfg.seed = seed;
  f.pairs = span::sampling::sample_pairs(f.current, f.next, cfg, count);
  return f;
}

inline ModelConfig small_config(std::size_t nodes, std::size_t k, std::mt19937_64& rng) {
  ModelConfig c;
  c.num_nodes = nodes;
  c.dim = std::vector<std::size_t>{4, 8, 12}[rng() % 3];
  c.blocks = 1 + rng() % 2;
  c.heads = 1 + rng() % 2;
  c.ffn_dim = c.dim * 2;
  c.max_nodes = k;
  c.seed = rng();
  return c;
}

inline SubgraphPair permute_pair(const SubgraphPair& p, const std::vector<std::size_t>& perm, const Fixture& f) {
  SubgraphPair q;
  q.t = p.t;
  for (auto i : perm) q.nodes.push_back(p.nodes[i]);
  q.current = span::graph::induced_subgraph(f.current, q.nodes);
  q.next = span::graph::induced_subgraph(f.next, q.nodes);
  q.attention.n = p.size();
  q.attention.values.resize(p.size() * p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) q.attention(i, j) = p.attention(perm[i], perm[j]);
  return q;
}

}  // namespace fixtures
