#pragma once

#include <cstdint>
#include <vector>

#include "span/model/model.hpp"
#include "span/sampling/sampler.hpp"
#include "span/tensor/tape.hpp"

namespace span::model {

using tensor::Tape;

/// Marks the first n of k rows as real nodes.
template <typename Real>
struct PaddingMask {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<Real> rows;  // 1 for real rows, 0 for padding
  Tensor<Real> bias;       // k x k, 0 on real columns, -inf on padded ones

  static PaddingMask make(std::size_t n, std::size_t k);
  bool real(std::size_t i) const { return i < n; }
};

/// Everything about one sampled pair that the model consumes as constants,
/// padded to k rows.
struct EncodedSubgraph {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::int64_t> node_ids;  // k, -1 on padding
  std::vector<std::int64_t> type_ids;  // k, -1 on padding or untyped graphs
  std::vector<double> degree_feature;  // k, log(1 + deg) / log(1 + max deg)
  std::vector<double> context;         // k x k, row-normalized attention, zero on padding
  std::vector<double> next_adjacency;  // k x k, labels from the next graph
  double pattern_label = 0.0;
};

EncodedSubgraph encode_pair(const sampling::SubgraphPair& pair, const graph::Snapshot& current, std::size_t k);

template <typename Real>
struct ModelInputs {
  Tensor<Real> y;  // node attributes, k x D
  Tensor<Real> c;  // context, P-hat * Y
  PaddingMask<Real> mask;
};

/// Y rows are latent rows of the subgraph nodes (plus type embeddings), with
/// dimension 0 replaced by the degree feature; padded rows are zero. C = P-hat Y.
template <typename Real>
ModelInputs<Real> build_inputs(Tape<Real>& tape, const SpanModel<Real>& model, const EncodedSubgraph& enc);

}  // namespace span::model
