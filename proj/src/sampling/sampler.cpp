#include "span/sampling/sampler.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "span/sampling/bayes_attention.hpp"

namespace span::sampling {

void SamplerConfig::validate() const {
  if (max_nodes < 3) throw std::invalid_argument("k must be at least 3");
  if (!(jump_probability >= 0.0 && jump_probability <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  if (max_retries < 1) throw std::invalid_argument("max_retries must be positive");
}

double transfer_probability(const Snapshot& s, NodeId from, NodeId to) {
  double total = s.weighted_degree(from);
  if (total <= 0.0) throw SamplingError("node " + std::to_string(from) + " has no neighbors");
  double w = s.edge_weight(from, to);
  if (w <= 0.0) {
    throw SamplingError("(" + std::to_string(from) + ", " + std::to_string(to) + ") is not an edge");
  }
  return w / total;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool contains(const std::vector<NodeId>& members, NodeId v) {
  return std::find(members.begin(), members.end(), v) != members.end();
}

bool has_outside_neighbor(const Snapshot& s, NodeId v, const std::vector<NodeId>& members) {
  for (const auto& nb : s.neighbors(v)) {
    if (!contains(members, nb.id)) return true;
  }
  return false;
}

// Uniform node from `active` that is not yet a member. Caller guarantees one exists.
NodeId draw_jump(const std::vector<NodeId>& active, const std::vector<NodeId>& members, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  if (active.size() > 2 * members.size()) {
    for (;;) {
      NodeId v = active[pick(rng)];
      if (!contains(members, v)) return v;
    }
  }
  std::vector<NodeId> pool;
  for (NodeId v : active) {
    if (!contains(members, v)) pool.push_back(v);
  }
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

// Returns false when the node set cannot reach size n.
bool grow(const Snapshot& s, const std::vector<NodeId>& active, std::size_t n, double alpha, std::mt19937_64& rng,
          std::vector<NodeId>& members) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<NodeId> frontier;
  while (members.size() < n) {
    const bool pool_empty = members.size() >= active.size();
    bool jump = coin(rng) < alpha;
    if (!jump) {
      frontier.clear();
      for (NodeId v : members) {
        if (has_outside_neighbor(s, v, members)) frontier.push_back(v);
      }
      if (frontier.empty()) {
        jump = true;  // component exhausted
      } else {
        NodeId from = frontier[std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng)];
        NodeId to = 0;
        draw_neighbor(s, from, rng, [&](NodeId id) { return contains(members, id); }, to);
        members.push_back(to);
        continue;
      }
    }
    if (pool_empty) return false;
    members.push_back(draw_jump(active, members, rng));
  }
  return true;
}

SubgraphPair sample_with_active(const Snapshot& current, const Snapshot& next, const std::vector<NodeId>& active,
                                const SamplerConfig& cfg, std::mt19937_64& rng) {
  if (active.empty()) throw SamplingError("snapshot has no edges to sample from");
  std::uniform_int_distribution<int> size_dist(3, cfg.max_nodes);
  std::uniform_int_distribution<std::size_t> seed_dist(0, active.size() - 1);
  std::vector<NodeId> members;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    auto n = static_cast<std::size_t>(size_dist(rng));
    members.clear();
    members.push_back(active[seed_dist(rng)]);
    if (!grow(current, active, n, cfg.jump_probability, rng, members)) continue;

    SubgraphPair pair;
    pair.t = current.index();
    pair.nodes = members;
    pair.current = graph::induced_subgraph(current, members);
    pair.next = graph::induced_subgraph(next, members);
    pair.attention = bayesian_attention(pair.current, current);
    return pair;
  }
  throw SamplingError("subgraph expansion stalled after " + std::to_string(cfg.max_retries) + " attempts");
}

}  // namespace

SubgraphPair sample_subgraph_pair(const Snapshot& current, const Snapshot& next, const SamplerConfig& cfg,
                                  std::mt19937_64& rng) {
  cfg.validate();
  if (current.num_nodes() != next.num_nodes()) throw std::invalid_argument("snapshots differ in node universe");
  return sample_with_active(current, next, current.active_nodes(), cfg, rng);
}

std::mt19937_64 pair_stream(std::uint64_t seed, std::uint64_t t, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ t);
  h = splitmix64(h ^ index);
  return std::mt19937_64(h);
}

std::vector<SubgraphPair> sample_pairs(const Snapshot& current, const Snapshot& next, const SamplerConfig& cfg,
                                       std::size_t count, std::size_t first_index, unsigned threads) {
  cfg.validate();
  if (current.num_nodes() != next.num_nodes()) throw std::invalid_argument("snapshots differ in node universe");
  const auto active = current.active_nodes();
  std::vector<SubgraphPair> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));

  auto work = [&](unsigned worker, std::exception_ptr& error) {
    try {
      for (std::size_t i = worker; i < count; i += threads) {
        auto rng = pair_stream(cfg.seed, current.index(), first_index + i);
        out[i] = sample_with_active(current, next, active, cfg, rng);
      }
    } catch (...) {
      error = std::current_exception();
    }
  };

  std::vector<std::exception_ptr> errors(threads);
  if (threads == 1) {
    work(0, errors[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w, std::ref(errors[w]));
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace span::sampling
