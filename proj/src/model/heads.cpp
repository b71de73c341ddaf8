#include "span/model/heads.hpp"

namespace span::model {

template <typename Real>
Tensor<Real> span_head(Tape<Real>& tape, const Tensor<Real>& attribute, const Tensor<Real>& context,
                       const Tensor<Real>& scale) {
  auto scores = tape.matmul_transposed(attribute, context);
  if (scale.defined()) scores = tape.mul_scalar(scores, scale);
  auto m = tape.sigmoid(scores);
  return tape.scale(tape.add(m, tape.transpose(m)), Real(0.5));
}

template <typename Real>
Tensor<Real> span_loss(Tape<Real>& tape, const Tensor<Real>& edge_prob, std::span<const double> labels,
                       const PaddingMask<Real>& mask) {
  const std::size_t k = mask.k;
  if (edge_prob.rows() != k || edge_prob.cols() != k || labels.size() != k * k) {
    throw tensor::ShapeError("span_loss: expected k x k predictions and labels");
  }
  std::vector<Real> target(k * k, Real(0));
  std::vector<Real> weight(k * k, Real(0));
  for (std::size_t i = 0; i < mask.n; ++i) {
    for (std::size_t j = i + 1; j < mask.n; ++j) {
      target[i * k + j] = static_cast<Real>(labels[i * k + j]);
      weight[i * k + j] = Real(1);
    }
  }
  return tape.binary_cross_entropy(edge_prob, target, weight);
}

template <typename Real>
PoolOutput<Real> spanh_pool(Tape<Real>& tape, const Tensor<Real>& attribute, const Tensor<Real>& context,
                            const PaddingMask<Real>& mask) {
  const std::size_t k = mask.k;
  std::vector<Real> bias(mask.bias.values().begin(), mask.bias.values().begin() + static_cast<std::ptrdiff_t>(k));
  auto column_bias = Tensor<Real>::from_values(1, k, std::move(bias));

  // Padded rows are zero, so the plain column sums range over real nodes only.
  auto context_total = tape.sum_rows(context);
  auto attribute_total = tape.sum_rows(attribute);
  auto alpha = tape.softmax_rows(tape.matmul_transposed(context_total, attribute), &column_bias);
  auto beta = tape.softmax_rows(tape.matmul_transposed(attribute_total, context), &column_bias);
  return {tape.matmul(alpha, attribute), tape.matmul(beta, context), alpha, beta};
}

template <typename Real>
PatternOutput<Real> spanh_head_loss(Tape<Real>& tape, const Tensor<Real>& pooled_attribute,
                                    const Tensor<Real>& pooled_context, const Tensor<Real>& classifier,
                                    double label) {
  const Tensor<Real> parts[] = {pooled_attribute, pooled_context};
  auto joined = tape.concat_cols(parts);
  if (classifier.rows() != joined.cols() || classifier.cols() != 1) {
    throw tensor::ShapeError("spanh_head_loss: classifier must be 2D x 1");
  }
  auto prob = tape.sigmoid(tape.matmul(joined, classifier));
  const Real target[] = {static_cast<Real>(label)};
  const Real weight[] = {Real(1)};
  return {prob, tape.binary_cross_entropy(prob, target, weight)};
}

#define SPAN_INSTANTIATE_HEADS(Real)                                                                              \
  template Tensor<Real> span_head<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,                    \
                                        const Tensor<Real>&);                                                     \
  template Tensor<Real> span_loss<Real>(Tape<Real>&, const Tensor<Real>&, std::span<const double>,               \
                                        const PaddingMask<Real>&);                                                \
  template PoolOutput<Real> spanh_pool<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,              \
                                             const PaddingMask<Real>&);                                           \
  template PatternOutput<Real> spanh_head_loss<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,      \
                                                     const Tensor<Real>&, double);

SPAN_INSTANTIATE_HEADS(float)
SPAN_INSTANTIATE_HEADS(double)

}  // namespace span::model
