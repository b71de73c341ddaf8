#include "span/model/forward.hpp"

namespace span::model {

template <typename Real>
TowerStates<Real> ablation_forward(Tape<Real>& tape, Variant variant, const SpanModel<Real>& model,
                                   const ModelInputs<Real>& inputs) {
  const auto& attribute = model.attribute_tower();
  const auto& context = model.context_tower();
  const std::size_t blocks = model.config().blocks;
  auto require = [&](bool ok, const char* what) {
    if (!ok) {
      throw std::invalid_argument("variant " + std::to_string(static_cast<int>(variant)) + " needs " + what);
    }
  };

  switch (variant) {
    case Variant::AttributeOnly: {
      require(attribute.size() == blocks, "the attribute tower");
      auto x = inputs.y;
      for (const auto& blk : attribute) x = plain_block_forward(tape, x, blk, inputs.mask);
      return {x, x};
    }
    case Variant::ContextOnly: {
      require(context.size() == blocks, "the context tower");
      auto x = inputs.c;
      for (const auto& blk : context) x = plain_block_forward(tape, x, blk, inputs.mask);
      return {x, x};
    }
    case Variant::TwinTower: {
      require(attribute.size() == blocks && context.size() == blocks, "both towers");
      TowerStates<Real> s{inputs.y, inputs.c};
      for (std::size_t b = 0; b < blocks; ++b) {
        s = {plain_block_forward(tape, s.attribute, attribute[b], inputs.mask),
             plain_block_forward(tape, s.context, context[b], inputs.mask)};
      }
      return s;
    }
    case Variant::CrossAttention: {
      require(attribute.size() == blocks && context.size() == blocks && attribute.front().cross,
              "both towers with cross-attention");
      TowerStates<Real> s{inputs.y, inputs.c};
      for (std::size_t b = 0; b < blocks; ++b) s = ablock_forward(tape, s, attribute[b], context[b], inputs.mask);
      return s;
    }
  }
  throw std::invalid_argument("unknown ablation variant");
}

template <typename Real>
SampleOutput<Real> forward_sample(Tape<Real>& tape, const SpanModel<Real>& model, const EncodedSubgraph& enc) {
  auto inputs = build_inputs(tape, model, enc);
  auto states = ablation_forward(tape, model.config().variant, model, inputs);
  if (model.config().head == HeadKind::Span) {
    auto edges = span_head(tape, states.attribute, states.context, model.score_scale());
    auto loss = span_loss(tape, edges, enc.next_adjacency, inputs.mask);
    return {edges, loss, enc.n * (enc.n - 1) / 2};
  }
  auto pooled = spanh_pool(tape, states.attribute, states.context, inputs.mask);
  auto out = spanh_head_loss(tape, pooled.attribute, pooled.context, model.classifier(), enc.pattern_label);
  return {out.prob, out.loss, 1};
}

template <typename Real>
Tensor<Real> span_forward(Tape<Real>& tape, const SpanModel<Real>& model, const EncodedSubgraph& enc) {
  if (model.config().head != HeadKind::Span) throw std::invalid_argument("span_forward needs a SPAN head");
  auto inputs = build_inputs(tape, model, enc);
  auto states = ablation_forward(tape, model.config().variant, model, inputs);
  return span_head(tape, states.attribute, states.context, model.score_scale());
}

#define SPAN_INSTANTIATE_FORWARD(Real)                                                                          \
  template TowerStates<Real> ablation_forward<Real>(Tape<Real>&, Variant, const SpanModel<Real>&,               \
                                                    const ModelInputs<Real>&);                                  \
  template SampleOutput<Real> forward_sample<Real>(Tape<Real>&, const SpanModel<Real>&, const EncodedSubgraph&); \
  template Tensor<Real> span_forward<Real>(Tape<Real>&, const SpanModel<Real>&, const EncodedSubgraph&);

SPAN_INSTANTIATE_FORWARD(float)
SPAN_INSTANTIATE_FORWARD(double)

}  // namespace span::model
