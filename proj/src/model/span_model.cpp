#include "span/model/model.hpp"

#include <random>
#include <stdexcept>

namespace span::model {

Variant variant_from_int(int v) {
  if (v < 1 || v > 4) throw std::invalid_argument("unknown ablation variant " + std::to_string(v));
  return static_cast<Variant>(v);
}

std::string to_string(HeadKind h) { return h == HeadKind::Span ? "span" : "span-h"; }

HeadKind head_from_string(const std::string& s) {
  if (s == "span") return HeadKind::Span;
  if (s == "span-h") return HeadKind::SpanH;
  throw std::invalid_argument("unknown head '" + s + "' (expected span or span-h)");
}

void ModelConfig::validate() const {
  if (num_nodes == 0) throw std::invalid_argument("model needs at least one node");
  if (dim == 0) throw std::invalid_argument("D must be positive");
  if (blocks == 0) throw std::invalid_argument("b must be positive");
  if (heads == 0) throw std::invalid_argument("h must be positive");
  if (max_nodes < 3) throw std::invalid_argument("k must be at least 3");
  variant_from_int(static_cast<int>(variant));
  if (!(init_std >= 0.0) || !(embedding_std >= 0.0)) throw std::invalid_argument("init scales must be non-negative");
}

namespace {

template <typename Real>
class Initializer {
 public:
  Initializer(std::uint64_t seed, double stddev) : rng_(seed), stddev_(stddev) {}

  Tensor<Real> normal(std::size_t rows, std::size_t cols) { return normal(rows, cols, stddev_); }
  Tensor<Real> normal(std::size_t rows, std::size_t cols, double stddev) {
    std::vector<Real> v(rows * cols);
    for (auto& x : v) x = static_cast<Real>(stddev * normal_(rng_));
    return Tensor<Real>::from_values(rows, cols, std::move(v), true);
  }
  Tensor<Real> constant(std::size_t rows, std::size_t cols, Real value) {
    return Tensor<Real>::full(rows, cols, value, true);
  }
  LayerNormParams<Real> layer_norm(std::size_t d) { return {constant(1, d, Real(1)), constant(1, d, Real(0))}; }

 private:
  std::mt19937_64 rng_;
  double stddev_;
  std::normal_distribution<double> normal_;
};

template <typename Real>
std::vector<BlockParams<Real>> make_tower(const ModelConfig& cfg, Initializer<Real>& init) {
  const std::size_t d = cfg.dim, f = cfg.ffn_width(), h = cfg.heads;
  std::vector<BlockParams<Real>> tower;
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    BlockParams<Real> block;
    block.self_norm = init.layer_norm(d);
    if (cfg.uses_cross_attention()) {
      CrossParams<Real> cross;
      for (std::size_t i = 0; i < h; ++i) {
        cross.attention.query.push_back(init.normal(d, d));
        cross.attention.key.push_back(init.normal(d, d));
        cross.attention.value.push_back(init.normal(d, d));
      }
      cross.attention.output = init.normal(h * d, d);
      cross.norm = init.layer_norm(d);
      block.cross = std::move(cross);
    }
    block.ffn = {init.normal(d, f), init.constant(1, f, Real(0)), init.normal(f, d), init.constant(1, d, Real(0))};
    block.ffn_norm = init.layer_norm(d);
    tower.push_back(std::move(block));
  }
  return tower;
}

template <typename Real>
void append_tower(std::vector<NamedTensor<Real>>& out, const std::string& prefix,
                  const std::vector<BlockParams<Real>>& tower) {
  for (std::size_t b = 0; b < tower.size(); ++b) {
    const auto& blk = tower[b];
    const std::string p = prefix + "." + std::to_string(b) + ".";
    out.push_back({p + "self_norm.gain", blk.self_norm.gain});
    out.push_back({p + "self_norm.bias", blk.self_norm.bias});
    if (blk.cross) {
      const auto& a = blk.cross->attention;
      for (std::size_t i = 0; i < a.query.size(); ++i) {
        out.push_back({p + "cross.query." + std::to_string(i), a.query[i]});
        out.push_back({p + "cross.key." + std::to_string(i), a.key[i]});
        out.push_back({p + "cross.value." + std::to_string(i), a.value[i]});
      }
      out.push_back({p + "cross.output", a.output});
      out.push_back({p + "cross_norm.gain", blk.cross->norm.gain});
      out.push_back({p + "cross_norm.bias", blk.cross->norm.bias});
    }
    out.push_back({p + "ffn.w1", blk.ffn.w1});
    out.push_back({p + "ffn.b1", blk.ffn.b1});
    out.push_back({p + "ffn.w2", blk.ffn.w2});
    out.push_back({p + "ffn.b2", blk.ffn.b2});
    out.push_back({p + "ffn_norm.gain", blk.ffn_norm.gain});
    out.push_back({p + "ffn_norm.bias", blk.ffn_norm.bias});
  }
}

}  // namespace

template <typename Real>
SpanModel<Real>::SpanModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  Initializer<Real> init(config_.seed, config_.init_std);
  latent_ = init.normal(config_.num_nodes, config_.dim, config_.embedding_std);
  if (config_.num_types > 0) type_table_ = init.normal(config_.num_types, config_.dim, config_.embedding_std);
  if (config_.uses_attribute_tower()) attribute_tower_ = make_tower(config_, init);
  if (config_.uses_context_tower()) context_tower_ = make_tower(config_, init);
  if (config_.head == HeadKind::Span) {
    score_scale_ = init.constant(1, 1, Real(0));
  } else {
    classifier_ = init.constant(2 * config_.dim, 1, Real(0));
  }
}

template <typename Real>
std::vector<NamedTensor<Real>> SpanModel<Real>::named_parameters() const {
  std::vector<NamedTensor<Real>> out;
  out.push_back({"latent", latent_});
  if (type_table_.defined()) out.push_back({"types", type_table_});
  append_tower(out, "attribute", attribute_tower_);
  append_tower(out, "context", context_tower_);
  if (score_scale_.defined()) out.push_back({"head.score_scale", score_scale_});
  if (classifier_.defined()) out.push_back({"head.classifier", classifier_});
  return out;
}

template <typename Real>
std::vector<Tensor<Real>> SpanModel<Real>::parameters() const {
  std::vector<Tensor<Real>> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

template <typename Real>
std::size_t SpanModel<Real>::param_count() const {
  std::size_t total = 0;
  for (const auto& nt : named_parameters()) total += nt.tensor.size();
  return total;
}

std::size_t block_param_count(const ModelConfig& c) {
  const std::size_t d = c.dim, f = c.ffn_width(), h = c.heads;
  std::size_t count = 2 * d;                 // self-attention norm
  count += d * f + f + f * d + d + 2 * d;    // FFN and its norm
  if (c.uses_cross_attention()) count += 3 * h * d * d + h * d * d + 2 * d;
  return count;
}

std::size_t param_count(const ModelConfig& c) {
  const std::size_t towers = (c.uses_attribute_tower() ? 1 : 0) + (c.uses_context_tower() ? 1 : 0);
  std::size_t count = c.num_nodes * c.dim + c.num_types * c.dim;
  count += towers * c.blocks * block_param_count(c);
  count += c.head == HeadKind::Span ? 1 : 2 * c.dim;
  return count;
}

template class SpanModel<float>;
template class SpanModel<double>;

}  // namespace span::model
