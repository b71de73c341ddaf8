#pragma once

#include "span/model/inputs.hpp"

namespace span::model {

/// softmax(X X^T / sqrt(D) + mask) X with padded rows zeroed.
template <typename Real>
Tensor<Real> self_attention(Tape<Real>& tape, const Tensor<Real>& x, const PaddingMask<Real>& mask);

/// Concat(head_1..head_h) W^o, head_i = softmax((Q Wq_i)(K Wk_i)^T / sqrt(D) + mask)(V Wv_i).
/// Every head is full width D.
template <typename Real>
Tensor<Real> multi_head_attention(Tape<Real>& tape, const Tensor<Real>& query, const Tensor<Real>& key,
                                  const Tensor<Real>& value, const MultiHeadParams<Real>& params,
                                  const PaddingMask<Real>& mask);

/// max(0, x W1 + b1) W2 + b2
template <typename Real>
Tensor<Real> feed_forward(Tape<Real>& tape, const Tensor<Real>& x, const FeedForwardParams<Real>& params);

template <typename Real>
struct TowerStates {
  Tensor<Real> attribute;  // M_y
  Tensor<Real> context;    // M_c
};

/// One twin-tower block with cross-attention. Both towers read the block's
/// inputs:
///   u  = LN(M_y + SA(M_y));  v = LN(u + MA(M_c, M_c, u));  M_y' = LN(v + FFN(v))
/// and the mirror image for M_c. Padded rows are zeroed after every norm.
template <typename Real>
TowerStates<Real> ablock_forward(Tape<Real>& tape, const TowerStates<Real>& in, const BlockParams<Real>& attribute,
                                 const BlockParams<Real>& context, const PaddingMask<Real>& mask);

/// A block without cross-attention: u = LN(X + SA(X)); X' = LN(u + FFN(u)).
template <typename Real>
Tensor<Real> plain_block_forward(Tape<Real>& tape, const Tensor<Real>& x, const BlockParams<Real>& params,
                                 const PaddingMask<Real>& mask);

}  // namespace span::model
