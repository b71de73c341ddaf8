#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "span/tensor/tensor.hpp"

namespace span::model {

using tensor::NamedTensor;
using tensor::Tensor;

enum class HeadKind { Span, SpanH };

/// Tower layouts compared in the ablation study.
enum class Variant : int {
  AttributeOnly = 1,   // one tower over Y, self-attention + FFN
  ContextOnly = 2,     // one tower over C, self-attention + FFN
  TwinTower = 3,       // both towers, no cross-attention
  CrossAttention = 4,  // full model
};

Variant variant_from_int(int v);
std::string to_string(HeadKind h);
HeadKind head_from_string(const std::string& s);

struct ModelConfig {
  std::size_t num_nodes = 0;
  std::size_t num_types = 0;  // 0 disables the type-embedding table
  std::size_t dim = 128;      // D
  std::size_t blocks = 6;     // b
  std::size_t heads = 4;      // h
  std::size_t ffn_dim = 0;    // 0 means 4 * D
  std::size_t max_nodes = 10;  // k
  HeadKind head = HeadKind::Span;
  Variant variant = Variant::CrossAttention;
  std::uint64_t seed = 0;
  double init_std = 0.02;      // projection weights
  double embedding_std = 1.0;  // latent matrix and type table

  std::size_t ffn_width() const { return ffn_dim == 0 ? 4 * dim : ffn_dim; }
  bool uses_attribute_tower() const { return variant != Variant::ContextOnly; }
  bool uses_context_tower() const { return variant != Variant::AttributeOnly; }
  bool uses_cross_attention() const { return variant == Variant::CrossAttention; }
  void validate() const;
};

template <typename Real>
struct LayerNormParams {
  Tensor<Real> gain;  // 1 x D
  Tensor<Real> bias;  // 1 x D
};

template <typename Real>
struct MultiHeadParams {
  std::vector<Tensor<Real>> query;  // h of D x D
  std::vector<Tensor<Real>> key;
  std::vector<Tensor<Real>> value;
  Tensor<Real> output;  // hD x D
};

template <typename Real>
struct FeedForwardParams {
  Tensor<Real> w1;  // D x F
  Tensor<Real> b1;  // 1 x F
  Tensor<Real> w2;  // F x D
  Tensor<Real> b2;  // 1 x D
};

template <typename Real>
struct CrossParams {
  MultiHeadParams<Real> attention;
  LayerNormParams<Real> norm;
};

/// One attention-based block of one tower.
template <typename Real>
struct BlockParams {
  LayerNormParams<Real> self_norm;
  std::optional<CrossParams<Real>> cross;
  FeedForwardParams<Real> ffn;
  LayerNormParams<Real> ffn_norm;
};

/// Latent node matrix, the two towers and the prediction head.
///
/// The attribute tower starts from Y and the context tower from C. Variants 1
/// and 2 keep only one of them; only variant 4 carries cross-attention
/// parameters. The SPAN head owns a scalar score scale and the SPAN-H head a
/// 2D x 1 classifier; both start at zero so a fresh model predicts 0.5.
template <typename Real>
class SpanModel {
 public:
  explicit SpanModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }

  Tensor<Real>& latent() { return latent_; }
  const Tensor<Real>& latent() const { return latent_; }
  const Tensor<Real>& type_table() const { return type_table_; }
  const std::vector<BlockParams<Real>>& attribute_tower() const { return attribute_tower_; }
  const std::vector<BlockParams<Real>>& context_tower() const { return context_tower_; }
  const Tensor<Real>& score_scale() const { return score_scale_; }
  const Tensor<Real>& classifier() const { return classifier_; }

  std::vector<NamedTensor<Real>> named_parameters() const;
  std::vector<Tensor<Real>> parameters() const;
  std::size_t param_count() const;

 private:
  ModelConfig config_;
  Tensor<Real> latent_;
  Tensor<Real> type_table_;
  std::vector<BlockParams<Real>> attribute_tower_;
  std::vector<BlockParams<Real>> context_tower_;
  Tensor<Real> score_scale_;
  Tensor<Real> classifier_;
};

/// Closed-form parameter count for a configuration; agrees with
/// SpanModel::param_count().
std::size_t param_count(const ModelConfig& config);
std::size_t block_param_count(const ModelConfig& config);

extern template class SpanModel<float>;
extern template class SpanModel<double>;

}  // namespace span::model
