#include "span/graph/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace span::graph {

DynamicGraph::DynamicGraph(std::vector<TemporalEdge> edges, std::size_t num_nodes,
                           std::vector<std::int64_t> original_ids)
    : edges_(std::move(edges)), num_nodes_(num_nodes), original_ids_(std::move(original_ids)) {
  auto by_time = [](const TemporalEdge& a, const TemporalEdge& b) { return a.timestamp < b.timestamp; };
  if (!std::is_sorted(edges_.begin(), edges_.end(), by_time)) std::stable_sort(edges_.begin(), edges_.end(), by_time);
  for (const auto& e : edges_) {
    if (e.src >= num_nodes_ || e.dst >= num_nodes_) {
      throw std::invalid_argument("edge endpoint outside node universe");
    }
    if (!(e.weight > 0.0)) throw std::invalid_argument("edge weight must be positive");
  }
  if (original_ids_.empty()) {
    original_ids_.resize(num_nodes_);
    for (std::size_t v = 0; v < num_nodes_; ++v) original_ids_[v] = static_cast<std::int64_t>(v);
  } else if (original_ids_.size() != num_nodes_) {
    throw std::invalid_argument("original id table size does not match node count");
  }
}

void DynamicGraph::set_node_types(std::vector<int> types) {
  if (!types.empty() && types.size() != num_nodes_) {
    throw std::invalid_argument("node type table size does not match node count");
  }
  int max_type = -1;
  for (int t : types) {
    if (t < 0) throw std::invalid_argument("node types must be non-negative");
    max_type = std::max(max_type, t);
  }
  node_types_ = std::move(types);
  num_types_ = static_cast<std::size_t>(max_type + 1);
}

double DynamicGraph::min_time() const {
  if (edges_.empty()) throw std::logic_error("empty graph has no time range");
  return edges_.front().timestamp;
}

double DynamicGraph::max_time() const {
  if (edges_.empty()) throw std::logic_error("empty graph has no time range");
  return edges_.back().timestamp;
}

Snapshot::Snapshot(std::size_t num_nodes, std::span<const Edge> edges, std::size_t index,
                   double t_start, double t_end)
    : index_(index),
      t_start_(t_start),
      t_end_(t_end),
      num_nodes_(num_nodes),
      num_temporal_edges_(edges.size()) {
  // Merge parallel edges: collect both directions, sort, then fold duplicates.
  std::vector<std::pair<NodeId, Neighbor>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) throw std::invalid_argument("snapshot edge outside node universe");
    if (e.u == e.v) continue;
    directed.push_back({e.u, {e.v, e.weight}});
    directed.push_back({e.v, {e.u, e.weight}});
  }
  std::sort(directed.begin(), directed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.id < b.second.id;
  });

  offsets_.assign(num_nodes + 1, 0);
  weighted_degree_.assign(num_nodes, 0.0);
  adjacency_.reserve(directed.size());
  for (std::size_t i = 0; i < directed.size(); ++i) {
    const auto& [u, nb] = directed[i];
    if (!adjacency_.empty() && i > 0 && directed[i - 1].first == u && directed[i - 1].second.id == nb.id) {
      adjacency_.back().weight += nb.weight;
    } else {
      adjacency_.push_back(nb);
      ++offsets_[u + 1];
    }
    weighted_degree_[u] += nb.weight;
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    max_degree_ = std::max(max_degree_, offsets_[v + 1]);
    offsets_[v + 1] += offsets_[v];
  }
  num_edges_ = adjacency_.size() / 2;
}

std::span<const Neighbor> Snapshot::neighbors(NodeId v) const {
  if (v >= num_nodes_) throw std::out_of_range("node id outside snapshot");
  return std::span<const Neighbor>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::size_t Snapshot::degree(NodeId v) const {
  if (v >= num_nodes_) throw std::out_of_range("node id outside snapshot");
  return offsets_[v + 1] - offsets_[v];
}

double Snapshot::edge_weight(NodeId u, NodeId v) const {
  auto nbs = neighbors(u);
  auto it = std::lower_bound(nbs.begin(), nbs.end(), v,
                             [](const Neighbor& n, NodeId id) { return n.id < id; });
  return (it != nbs.end() && it->id == v) ? it->weight : 0.0;
}

std::vector<Snapshot::Edge> Snapshot::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (const auto& nb : neighbors(u)) {
      if (u < nb.id) out.push_back({u, nb.id, nb.weight});
    }
  }
  return out;
}

std::vector<NodeId> Snapshot::active_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < num_nodes_; ++v) {
    if (offsets_[v + 1] > offsets_[v]) out.push_back(v);
  }
  return out;
}

std::size_t InducedSubgraph::num_edges() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) count += edge(i, j) ? 1 : 0;
  }
  return count;
}

namespace {

struct RawEdge {
  std::int64_t src;
  std::int64_t dst;
  double weight;
  double timestamp;
};

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> fields;
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

std::int64_t parse_id(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "invalid node id '" + s + "'");
  }
  if (pos != s.size() || v < 0) throw ParseError(line, "invalid node id '" + s + "'");
  return v;
}

double parse_real(const std::string& s, std::size_t line, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("invalid ") + what + " '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) throw ParseError(line, std::string("invalid ") + what + " '" + s + "'");
  return v;
}

}  // namespace

DynamicGraph parse_edge_list(std::istream& in, bool weighted) {
  std::vector<RawEdge> raw;
  std::size_t dropped = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%') continue;
    auto fields = split_fields(line);
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError(line_no, "expected 'src dst [weight] timestamp', got " + std::to_string(fields.size()) +
                                    " fields");
    }
    RawEdge e{};
    e.src = parse_id(fields[0], line_no);
    e.dst = parse_id(fields[1], line_no);
    e.weight = 1.0;
    if (fields.size() == 4) {
      double w = parse_real(fields[2], line_no, "weight");
      if (!(w > 0.0)) throw ParseError(line_no, "weight must be positive");
      if (weighted) e.weight = w;
    }
    e.timestamp = parse_real(fields.back(), line_no, "timestamp");
    if (e.timestamp < 0.0) throw ParseError(line_no, "timestamp must be non-negative");
    if (e.src == e.dst) {
      ++dropped;
      continue;
    }
    raw.push_back(e);
  }
  if (raw.empty()) throw std::runtime_error("edge list contains no edges");

  std::vector<std::int64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    ids.push_back(e.src);
    ids.push_back(e.dst);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto dense = [&](std::int64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<TemporalEdge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) edges.push_back({dense(e.src), dense(e.dst), e.weight, e.timestamp});
  const std::size_t num_nodes = ids.size();
  DynamicGraph g(std::move(edges), num_nodes, std::move(ids));
  g.set_dropped_self_loops(dropped);
  return g;
}

DynamicGraph ingest_edge_list(const std::filesystem::path& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path.string());
  return parse_edge_list(in, weighted);
}

void load_node_types(DynamicGraph& g, std::istream& in) {
  std::map<std::int64_t, std::int64_t> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto fields = split_fields(line);
    if (fields.size() != 2) throw ParseError(line_no, "expected 'node_id type_id'");
    raw[parse_id(fields[0], line_no)] = parse_id(fields[1], line_no);
  }

  std::vector<std::int64_t> type_ids;
  for (const auto& [node, type] : raw) type_ids.push_back(type);
  std::sort(type_ids.begin(), type_ids.end());
  type_ids.erase(std::unique(type_ids.begin(), type_ids.end()), type_ids.end());

  std::vector<int> types(g.num_nodes(), -1);
  auto originals = g.original_ids();
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    auto it = raw.find(originals[v]);
    if (it == raw.end()) {
      throw std::runtime_error("node " + std::to_string(originals[v]) + " has no type in the node-type file");
    }
    types[v] = static_cast<int>(std::lower_bound(type_ids.begin(), type_ids.end(), it->second) - type_ids.begin());
  }
  g.set_node_types(std::move(types));
}

void load_node_types(DynamicGraph& g, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open node-type file " + path.string());
  load_node_types(g, in);
}

std::vector<Snapshot> split_snapshots(const DynamicGraph& g, std::size_t count) {
  if (g.num_edges() == 0) throw std::invalid_argument("cannot split an empty graph");
  if (count < 2) throw std::invalid_argument("snapshot count must be at least 2");
  const double t_min = g.min_time();
  const double t_max = g.max_time();
  if (!(t_max > t_min)) throw std::invalid_argument("all edges share one timestamp; windows would have zero width");
  const double width = (t_max - t_min) / static_cast<double>(count);

  std::vector<std::vector<Snapshot::Edge>> buckets(count);
  for (const auto& e : g.edges()) {
    auto slot = static_cast<std::size_t>(std::floor((e.timestamp - t_min) / width));
    slot = std::min(slot, count - 1);
    buckets[slot].push_back({e.src, e.dst, e.weight});
  }
  std::vector<Snapshot> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double start = t_min + width * static_cast<double>(i);
    double end = (i + 1 == count) ? t_max : t_min + width * static_cast<double>(i + 1);
    out.emplace_back(g.num_nodes(), buckets[i], i + 1, start, end);
    if (g.has_types()) out.back().set_node_types(g.node_types());
  }
  return out;
}

std::pair<Snapshot, Snapshot> split_by_edge_fraction(const DynamicGraph& g, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  if (g.num_edges() < 2) throw std::invalid_argument("need at least two edges to split");
  auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(g.num_edges())));
  cut = std::clamp<std::size_t>(cut, 1, g.num_edges() - 1);
  std::vector<Snapshot::Edge> early, late;
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edges()[i];
    (i < cut ? early : late).push_back({e.src, e.dst, e.weight});
  }
  Snapshot first(g.num_nodes(), early, 1, g.edges().front().timestamp, g.edges()[cut].timestamp);
  Snapshot second(g.num_nodes(), late, 2, g.edges()[cut].timestamp, g.edges().back().timestamp);
  if (g.has_types()) {
    first.set_node_types(g.node_types());
    second.set_node_types(g.node_types());
  }
  return {std::move(first), std::move(second)};
}

std::size_t degree(const Snapshot& s, NodeId v) { return s.degree(v); }

InducedSubgraph induced_subgraph(const Snapshot& s, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("induced subgraph needs at least one node");
  std::unordered_set<NodeId> seen;
  for (NodeId v : nodes) {
    if (v >= s.num_nodes()) throw std::out_of_range("node id outside snapshot");
    if (!seen.insert(v).second) throw std::invalid_argument("duplicate node " + std::to_string(v) + " in subgraph");
  }
  InducedSubgraph sg;
  sg.nodes.assign(nodes.begin(), nodes.end());
  const std::size_t n = nodes.size();
  sg.adjacency.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::uint8_t bit = s.has_edge(nodes[i], nodes[j]) ? 1 : 0;
      sg.adjacency[i * n + j] = bit;
      sg.adjacency[j * n + i] = bit;
    }
  }
  return sg;
}

}  // namespace span::graph
