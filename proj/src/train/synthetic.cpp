#include "span/train/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace span::train {

using graph::NodeId;
using graph::TemporalEdge;

namespace {

using EdgeSet = std::set<std::pair<NodeId, NodeId>>;

std::pair<NodeId, NodeId> ordered(NodeId a, NodeId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

std::vector<std::vector<NodeId>> adjacency_of(const EdgeSet& edges, std::size_t nodes) {
  std::vector<std::vector<NodeId>> adj(nodes);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

// Every (u, v) that is not an edge but shares a neighbor w.
EdgeSet wedge_closures(const EdgeSet& edges, std::size_t nodes) {
  const auto adj = adjacency_of(edges, nodes);
  EdgeSet out;
  for (const auto& nb : adj) {
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        auto e = ordered(nb[a], nb[b]);
        if (!edges.count(e)) out.insert(e);
      }
    }
  }
  return out;
}

graph::DynamicGraph make_graph(std::vector<TemporalEdge> edges, std::size_t nodes) {
  std::vector<std::int64_t> ids(nodes);
  for (std::size_t i = 0; i < nodes; ++i) ids[i] = static_cast<std::int64_t>(i);
  return graph::DynamicGraph(std::move(edges), nodes, std::move(ids));
}

graph::DynamicGraph triadic_closure(std::size_t nodes, std::size_t snapshots, std::mt19937_64& rng) {
  // Small random trees: closure halves every component's diameter each step,
  // so they densify over the first few steps and then stay cliques, while
  // different components never connect.
  EdgeSet edges;
  std::uniform_int_distribution<std::size_t> size_dist(3, 6);
  for (std::size_t start = 0; start < nodes;) {
    std::size_t len = std::min(size_dist(rng), nodes - start);
    if (nodes - start - len < 3) len = nodes - start;
    for (std::size_t i = 1; i < len; ++i) {
      std::uniform_int_distribution<std::size_t> parent(0, i - 1);
      edges.insert(ordered(static_cast<NodeId>(start + parent(rng)), static_cast<NodeId>(start + i)));
    }
    start += len;
  }

  std::vector<TemporalEdge> out;
  for (std::size_t t = 0;; ++t) {
    for (auto [u, v] : edges) out.push_back({u, v, 1.0, static_cast<double>(t)});
    if (t + 1 == snapshots) break;

    const EdgeSet closing = wedge_closures(edges, nodes);
    std::vector<std::pair<NodeId, NodeId>> existing(edges.begin(), edges.end());
    std::shuffle(existing.begin(), existing.end(), rng);
    const auto removed = static_cast<std::size_t>(0.05 * static_cast<double>(existing.size()));
    EdgeSet next(existing.begin() + static_cast<std::ptrdiff_t>(removed), existing.end());
    next.insert(closing.begin(), closing.end());
    edges = std::move(next);
  }
  return make_graph(std::move(out), nodes);
}

graph::DynamicGraph periodic_blocks(std::size_t nodes, std::size_t snapshots, std::mt19937_64& rng) {
  constexpr std::size_t block = 8;
  const std::size_t blocks = nodes / block;
  std::vector<int> types(nodes, 0);
  for (std::size_t v = 0; v < nodes; ++v) types[v] = static_cast<int>(v % 2);

  // Background periods: per block, two same-type and one cross-type edge.
  std::vector<TemporalEdge> early;
  EdgeSet early_set;
  std::uniform_int_distribution<std::size_t> pick(0, block - 1);
  for (std::size_t t = 0; t + 1 < snapshots; ++t) {
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t base = b * block;
      auto add = [&](bool same_type) {
        for (;;) {
          const std::size_t u = pick(rng), v = pick(rng);
          if (u == v || ((u % 2) == (v % 2)) != same_type) continue;
          const auto e = ordered(static_cast<NodeId>(base + u), static_cast<NodeId>(base + v));
          early.push_back({e.first, e.second, 1.0, static_cast<double>(t)});
          early_set.insert(e);
          return;
        }
      };
      add(true);
      add(true);
      add(false);
    }
  }
  // Leftover nodes (nodes not divisible by 8) hang off the last block.
  for (std::size_t v = blocks * block; v < nodes; ++v) {
    const auto e = ordered(static_cast<NodeId>(v), static_cast<NodeId>(v - block));
    early.push_back({e.first, e.second, 1.0, 0.0});
    early_set.insert(e);
  }

  std::vector<std::pair<NodeId, NodeId>> cross;
  for (auto e : wedge_closures(early_set, nodes)) {
    if (types[e.first] != types[e.second]) cross.push_back(e);
  }

  // Keep the closures (and nothing else new) in the last 30% of edges:
  // floor(0.7 * total) must equal the number of early edges.
  std::vector<TemporalEdge> same_type_early;
  for (const auto& e : early) {
    if (types[e.src] == types[e.dst]) same_type_early.push_back(e);
  }
  auto split_ok = [](std::size_t e, std::size_t l) { return static_cast<std::size_t>(0.7 * (e + l)) == e; };
  std::uniform_int_distribution<std::size_t> pick_same(0, same_type_early.size() - 1);
  while (cross.size() * 7 > early.size() * 3) {
    auto e = same_type_early[pick_same(rng)];
    e.timestamp = 0.0;
    early.push_back(e);
  }
  std::size_t later = cross.size();
  while (!split_ok(early.size(), later)) ++later;

  std::vector<TemporalEdge> out = early;
  const double last = static_cast<double>(snapshots - 1);
  for (auto [u, v] : cross) out.push_back({u, v, 1.0, last});
  for (std::size_t i = cross.size(); i < later; ++i) {
    auto e = same_type_early[pick_same(rng)];
    e.timestamp = last;
    out.push_back(e);
  }
  auto g = make_graph(std::move(out), nodes);
  g.set_node_types(std::move(types));
  return g;
}

}  // namespace

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  if (name == "triadic-closure") return SyntheticKind::TriadicClosure;
  if (name == "periodic-blocks") return SyntheticKind::PeriodicBlocks;
  throw std::invalid_argument("unknown synthetic graph kind '" + name +
                              "' (expected triadic-closure or periodic-blocks)");
}

std::string to_string(SyntheticKind kind) {
  return kind == SyntheticKind::TriadicClosure ? "triadic-closure" : "periodic-blocks";
}

graph::DynamicGraph generate_synthetic(SyntheticKind kind, std::size_t nodes, std::size_t snapshots,
                                       std::uint64_t seed) {
  if (nodes < 20) throw std::invalid_argument("synthetic graphs need at least 20 nodes");
  if (snapshots < 3) throw std::invalid_argument("synthetic graphs need at least 3 snapshots");
  std::mt19937_64 rng(seed);
  return kind == SyntheticKind::TriadicClosure ? triadic_closure(nodes, snapshots, rng)
                                               : periodic_blocks(nodes, snapshots, rng);
}

}  // namespace span::train
