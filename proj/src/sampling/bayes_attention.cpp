#include "span/sampling/bayes_attention.hpp"

#include <queue>

namespace span::sampling {

BayesAttentionMatrix bayesian_attention(const InducedSubgraph& sg, const Snapshot& s) {
  const std::size_t n = sg.size();
  if (n == 0) throw std::invalid_argument("attention needs at least one node");

  // Transfer probabilities between subgraph members, looked up once.
  std::vector<double> transfer(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && sg.edge(u, v)) transfer[u * n + v] = transfer_probability(s, sg.nodes[u], sg.nodes[v]);
    }
  }

  BayesAttentionMatrix p{n, std::vector<double>(n * n, 0.0)};
  std::vector<int> depth(n);
  std::vector<std::size_t> order;
  std::vector<char> on_path(n);

  for (std::size_t src = 0; src < n; ++src) {
    std::fill(depth.begin(), depth.end(), -1);
    order.clear();
    depth[src] = 0;
    order.push_back(src);
    for (std::size_t head = 0; head < order.size(); ++head) {
      std::size_t u = order[head];
      for (std::size_t v = 0; v < n; ++v) {
        if (depth[v] < 0 && sg.edge(u, v)) {
          depth[v] = depth[u] + 1;
          order.push_back(v);
        }
      }
    }

    p(src, src) = 1.0;
    for (std::size_t dst = 0; dst < n; ++dst) {
      if (dst == src || depth[dst] < 0) continue;

      // Backward sweep in reverse BFS order marks nodes on some shortest path.
      std::fill(on_path.begin(), on_path.end(), 0);
      on_path[dst] = 1;
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::size_t v = *it;
        if (!on_path[v]) continue;
        for (std::size_t u = 0; u < n; ++u) {
          if (depth[u] == depth[v] - 1 && sg.edge(u, v)) on_path[u] = 1;
        }
      }

      double prob = 1.0;
      for (std::size_t v : order) {
        if (v == src || !on_path[v]) continue;
        double sum = 0.0;
        int parents = 0;
        for (std::size_t u = 0; u < n; ++u) {
          if (on_path[u] && depth[u] == depth[v] - 1 && sg.edge(u, v)) {
            sum += transfer[u * n + v];
            ++parents;
          }
        }
        prob *= sum / parents;
      }
      p(src, dst) = prob;
    }
  }
  return p;
}

}  // namespace span::sampling
