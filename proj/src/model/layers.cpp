#include "span/model/layers.hpp"

#include <cmath>

namespace span::model {

namespace {

template <typename Real>
Tensor<Real> norm_and_mask(Tape<Real>& tape, const Tensor<Real>& x, const LayerNormParams<Real>& p,
                           const PaddingMask<Real>& mask) {
  return tape.mask_rows(tape.layer_norm(x, p.gain, p.bias), mask.rows);
}

template <typename Real>
Tensor<Real> attend(Tape<Real>& tape, const Tensor<Real>& q, const Tensor<Real>& k, const Tensor<Real>& v,
                    const PaddingMask<Real>& mask, std::size_t dim) {
  auto scores = tape.scale(tape.matmul_transposed(q, k), Real(1) / std::sqrt(static_cast<Real>(dim)));
  return tape.matmul(tape.softmax_rows(scores, &mask.bias), v);
}

}  // namespace

template <typename Real>
Tensor<Real> self_attention(Tape<Real>& tape, const Tensor<Real>& x, const PaddingMask<Real>& mask) {
  return tape.mask_rows(attend(tape, x, x, x, mask, x.cols()), mask.rows);
}

template <typename Real>
Tensor<Real> multi_head_attention(Tape<Real>& tape, const Tensor<Real>& query, const Tensor<Real>& key,
                                  const Tensor<Real>& value, const MultiHeadParams<Real>& params,
                                  const PaddingMask<Real>& mask) {
  const std::size_t h = params.query.size();
  if (params.key.size() != h || params.value.size() != h || params.output.rows() != h * query.cols()) {
    throw tensor::ShapeError("multi_head_attention: inconsistent head parameters");
  }
  std::vector<Tensor<Real>> heads;
  heads.reserve(h);
  for (std::size_t i = 0; i < h; ++i) {
    heads.push_back(attend(tape, tape.matmul(query, params.query[i]), tape.matmul(key, params.key[i]),
                           tape.matmul(value, params.value[i]), mask, query.cols()));
  }
  return tape.matmul(tape.concat_cols(std::span<const Tensor<Real>>(heads)), params.output);
}

template <typename Real>
Tensor<Real> feed_forward(Tape<Real>& tape, const Tensor<Real>& x, const FeedForwardParams<Real>& p) {
  auto hidden = tape.relu(tape.add_row(tape.matmul(x, p.w1), p.b1));
  return tape.add_row(tape.matmul(hidden, p.w2), p.b2);
}

namespace {

template <typename Real>
Tensor<Real> tower_step(Tape<Real>& tape, const Tensor<Real>& own, const Tensor<Real>& other,
                        const BlockParams<Real>& p, const PaddingMask<Real>& mask) {
  auto u = norm_and_mask(tape, tape.add(own, self_attention(tape, own, mask)), p.self_norm, mask);
  auto v = norm_and_mask(
      tape, tape.add(u, multi_head_attention(tape, other, other, u, p.cross->attention, mask)), p.cross->norm, mask);
  return norm_and_mask(tape, tape.add(v, feed_forward(tape, v, p.ffn)), p.ffn_norm, mask);
}

}  // namespace

template <typename Real>
TowerStates<Real> ablock_forward(Tape<Real>& tape, const TowerStates<Real>& in, const BlockParams<Real>& attribute,
                                 const BlockParams<Real>& context, const PaddingMask<Real>& mask) {
  if (!attribute.cross || !context.cross) {
    throw std::invalid_argument("ablock_forward needs cross-attention parameters in both towers");
  }
  return {tower_step(tape, in.attribute, in.context, attribute, mask),
          tower_step(tape, in.context, in.attribute, context, mask)};
}

template <typename Real>
Tensor<Real> plain_block_forward(Tape<Real>& tape, const Tensor<Real>& x, const BlockParams<Real>& p,
                                 const PaddingMask<Real>& mask) {
  auto u = norm_and_mask(tape, tape.add(x, self_attention(tape, x, mask)), p.self_norm, mask);
  return norm_and_mask(tape, tape.add(u, feed_forward(tape, u, p.ffn)), p.ffn_norm, mask);
}

#define SPAN_INSTANTIATE_LAYERS(Real)                                                                              \
  template Tensor<Real> self_attention<Real>(Tape<Real>&, const Tensor<Real>&, const PaddingMask<Real>&);          \
  template Tensor<Real> multi_head_attention<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,          \
                                                   const Tensor<Real>&, const MultiHeadParams<Real>&,              \
                                                   const PaddingMask<Real>&);                                      \
  template Tensor<Real> feed_forward<Real>(Tape<Real>&, const Tensor<Real>&, const FeedForwardParams<Real>&);      \
  template TowerStates<Real> ablock_forward<Real>(Tape<Real>&, const TowerStates<Real>&, const BlockParams<Real>&, \
                                                  const BlockParams<Real>&, const PaddingMask<Real>&);             \
  template Tensor<Real> plain_block_forward<Real>(Tape<Real>&, const Tensor<Real>&, const BlockParams<Real>&,      \
                                                  const PaddingMask<Real>&);

SPAN_INSTANTIATE_LAYERS(float)
SPAN_INSTANTIATE_LAYERS(double)

}  // namespace span::model
