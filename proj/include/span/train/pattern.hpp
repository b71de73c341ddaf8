#pragma once

#include <functional>
#include <span>
#include <string>

#include "span/graph/temporal_graph.hpp"

namespace span::train {

/// A predicate over a node set's induced subgraph now and in the later graph.
struct PatternSpec {
  enum class Kind { Densify, NewCrossTypeEdge, Custom };
  using Predicate =
      std::function<bool(const graph::InducedSubgraph& now, const graph::InducedSubgraph& later,
                          std::span<const int> types)>;

  Kind kind = Kind::Densify;
  /// Densify: the later subgraph has more than (current edges + threshold) edges.
  int threshold = 0;
  std::string name;  // custom predicates only
  Predicate custom;

  static PatternSpec densify(int threshold = 0);
  /// Some pair of differently typed nodes gains an edge.
  static PatternSpec new_cross_type_edge();
  static PatternSpec from_predicate(std::string name, Predicate predicate);
  /// "densify", "densify:<threshold>" or "new-cross-type-edge".
  static PatternSpec parse(const std::string& text);

  bool needs_types() const { return kind == Kind::NewCrossTypeEdge; }
  /// `types` holds the types of the subgraph's nodes in subgraph order.
  bool holds(const graph::InducedSubgraph& now, const graph::InducedSubgraph& later,
             std::span<const int> types) const;
  std::string to_string() const;
};

}  // namespace span::train
