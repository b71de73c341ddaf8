#pragma once

#include "span/model/layers.hpp"

namespace span::model {

/// Edge probabilities: M = sigmoid(scale * M_y M_c^T), returned as (M + M^T) / 2.
/// An undefined `scale` means a factor of 1.
template <typename Real>
Tensor<Real> span_head(Tape<Real>& tape, const Tensor<Real>& attribute, const Tensor<Real>& context,
                       const Tensor<Real>& scale);

/// Cross entropy summed over unordered real-node pairs i < j; the diagonal and
/// padding are excluded. `labels` is the k x k next-step adjacency.
template <typename Real>
Tensor<Real> span_loss(Tape<Real>& tape, const Tensor<Real>& edge_prob, std::span<const double> labels,
                       const PaddingMask<Real>& mask);

template <typename Real>
struct PoolOutput {
  Tensor<Real> attribute;  // M_wy, 1 x D
  Tensor<Real> context;    // M_wc, 1 x D
  Tensor<Real> alpha;      // 1 x k
  Tensor<Real> beta;       // 1 x k
};

/// Weighted attention pooling: alpha_v = softmax_v <M_y,v, sum_u M_c,u> and
/// beta_v = softmax_v <M_c,v, sum_u M_y,u> over real nodes, then the weighted
/// row sums.
template <typename Real>
PoolOutput<Real> spanh_pool(Tape<Real>& tape, const Tensor<Real>& attribute, const Tensor<Real>& context,
                            const PaddingMask<Real>& mask);

template <typename Real>
struct PatternOutput {
  Tensor<Real> prob;  // 1 x 1
  Tensor<Real> loss;  // 1 x 1
};

/// sigmoid([M_wy | M_wc] W^s) and its binary cross entropy against `label`.
template <typename Real>
PatternOutput<Real> spanh_head_loss(Tape<Real>& tape, const Tensor<Real>& pooled_attribute,
                                    const Tensor<Real>& pooled_context, const Tensor<Real>& classifier, double label);

}  // namespace span::model
