#pragma once

#include <cstdint>
#include <string>

#include "span/graph/temporal_graph.hpp"

namespace span::train {

enum class SyntheticKind {
  /// Disjoint small random trees that evolve by closing every open wedge each step while
  /// losing 5% of the existing edges at random. Edge timestamps are the
  /// snapshot index, so splitting into `snapshots` windows recovers the steps.
  TriadicClosure,
  /// Typed blocks of eight nodes (four of each of two types). Random edges
  /// accumulate during the background periods; in the final period every
  /// open cross-type wedge closes, padded with repeats of earlier same-type
  /// edges so that the last period holds 30% of all edges.
  PeriodicBlocks,
};

SyntheticKind synthetic_kind_from_string(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Deterministic for a given (kind, nodes, snapshots, seed). Requires
/// nodes >= 20 and snapshots >= 3.
graph::DynamicGraph generate_synthetic(SyntheticKind kind, std::size_t nodes, std::size_t snapshots,
                                       std::uint64_t seed);

}  // namespace span::train
