#pragma once

#include "span/sampling/sampler.hpp"

namespace span::sampling {

/// Path-probability attention between every ordered pair of subgraph nodes.
///
/// For a source i and target j the shortest-path layers of the subgraph form a
/// DAG: BFS depths from i, edges from depth d to d + 1, restricted to nodes
/// that lie on some shortest i -> j path. The entry is the product, over every
/// non-source DAG node v, of the mean transfer probability p(v | u) over its DAG
/// parents u. Transfer probabilities use the full snapshot's weights. The
/// diagonal is 1 and unreachable targets get 0.
BayesAttentionMatrix bayesian_attention(const InducedSubgraph& sg, const Snapshot& s);

}  // namespace span::sampling
