#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace span::graph {

using NodeId = std::uint32_t;

struct TemporalEdge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 1.0;
  double timestamp = 0.0;

  friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Timestamped, undirected edge store over a dense node universe 0..|V|-1.
///
/// Edges are kept sorted (stably) by timestamp. `original_ids()[v]` gives the
/// identifier node `v` carried in the source file. Node types are optional and,
/// when present, are dense 0..num_types()-1.
class DynamicGraph {
 public:
  DynamicGraph() = default;
  DynamicGraph(std::vector<TemporalEdge> edges, std::size_t num_nodes,
               std::vector<std::int64_t> original_ids = {});

  std::span<const TemporalEdge> edges() const { return edges_; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const std::int64_t> original_ids() const { return original_ids_; }

  bool has_types() const { return !node_types_.empty(); }
  std::size_t num_types() const { return num_types_; }
  std::span<const int> node_types() const { return node_types_; }
  void set_node_types(std::vector<int> types);

  std::size_t dropped_self_loops() const { return dropped_self_loops_; }
  void set_dropped_self_loops(std::size_t n) { dropped_self_loops_ = n; }

  double min_time() const;
  double max_time() const;

  friend bool operator==(const DynamicGraph&, const DynamicGraph&) = default;

 private:
  std::vector<TemporalEdge> edges_;
  std::size_t num_nodes_ = 0;
  std::vector<std::int64_t> original_ids_;
  std::vector<int> node_types_;
  std::size_t num_types_ = 0;
  std::size_t dropped_self_loops_ = 0;
};

struct Neighbor {
  NodeId id = 0;
  double weight = 0.0;
};

/// Undirected weighted view of the edges falling in one time window.
///
/// Adjacency is stored in CSR form with neighbor lists sorted by id. Parallel
/// edges inside the window are merged and their weights summed.
class Snapshot {
 public:
  Snapshot() = default;

  struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double weight = 1.0;
  };
  Snapshot(std::size_t num_nodes, std::span<const Edge> edges, std::size_t index = 1,
           double t_start = 0.0, double t_end = 0.0);

  std::size_t index() const { return index_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return num_edges_; }
  std::size_t num_temporal_edges() const { return num_temporal_edges_; }

  std::span<const Neighbor> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const;
  double weighted_degree(NodeId v) const { return weighted_degree_.at(v); }
  std::size_t max_degree() const { return max_degree_; }
  bool has_edge(NodeId u, NodeId v) const { return edge_weight(u, v) > 0.0; }
  double edge_weight(NodeId u, NodeId v) const;

  /// Each undirected edge once, u < v, in (u, v) order.
  std::vector<Edge> edge_list() const;
  /// Nodes with at least one neighbor, ascending.
  std::vector<NodeId> active_nodes() const;

  std::span<const int> node_types() const { return node_types_; }
  void set_node_types(std::span<const int> types) { node_types_.assign(types.begin(), types.end()); }

 private:
  std::size_t index_ = 1;
  double t_start_ = 0.0;
  double t_end_ = 0.0;
  std::size_t num_nodes_ = 0;
  std::size_t num_edges_ = 0;
  std::size_t num_temporal_edges_ = 0;
  std::size_t max_degree_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> weighted_degree_;
  std::vector<int> node_types_;
};

/// Node list and binary adjacency of a snapshot restricted to `nodes`, in the
/// order given.
struct InducedSubgraph {
  std::vector<NodeId> nodes;
  std::vector<std::uint8_t> adjacency;  // row-major n x n, symmetric, zero diagonal

  std::size_t size() const { return nodes.size(); }
  bool edge(std::size_t i, std::size_t j) const { return adjacency[i * nodes.size() + j] != 0; }
  std::size_t num_edges() const;

  friend bool operator==(const InducedSubgraph&, const InducedSubgraph&) = default;
};

DynamicGraph parse_edge_list(std::istream& in, bool weighted);
DynamicGraph ingest_edge_list(const std::filesystem::path& path, bool weighted);

/// Reads `node_id type_id` lines. Ids refer to the original file ids; type ids
/// are remapped densely in ascending order. Every node of `g` needs a type.
void load_node_types(DynamicGraph& g, std::istream& in);
void load_node_types(DynamicGraph& g, const std::filesystem::path& path);

/// Splits [t_min, t_max] into `count` equal-width windows, half-open except the
/// last. Snapshot indices are 1-based.
std::vector<Snapshot> split_snapshots(const DynamicGraph& g, std::size_t count);

/// Continuous-time split: the first floor(fraction * |E|) edges in timestamp
/// order form the first graph, the rest the second.
std::pair<Snapshot, Snapshot> split_by_edge_fraction(const DynamicGraph& g, double fraction);

std::size_t degree(const Snapshot& s, NodeId v);

InducedSubgraph induced_subgraph(const Snapshot& s, std::span<const NodeId> nodes);

}  // namespace span::graph
