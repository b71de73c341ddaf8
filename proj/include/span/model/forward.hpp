#pragma once

#include "span/model/heads.hpp"

namespace span::model {

/// Runs the towers of `variant` over the inputs and returns the last block's
/// states. Single-tower variants return their tower's output in both slots, so
/// the heads are unchanged. The model must hold the parameters the variant
/// needs; a full model can run every variant.
template <typename Real>
TowerStates<Real> ablation_forward(Tape<Real>& tape, Variant variant, const SpanModel<Real>& model,
                                   const ModelInputs<Real>& inputs);

/// Output of one sample under the model's own head and variant.
template <typename Real>
struct SampleOutput {
  Tensor<Real> prediction;  // k x k edge probabilities (SPAN) or 1 x 1 pattern probability (SPAN-H)
  Tensor<Real> loss;        // summed over the sample's prediction units
  std::size_t units = 0;    // real pairs (SPAN) or 1 (SPAN-H)
};

template <typename Real>
SampleOutput<Real> forward_sample(Tape<Real>& tape, const SpanModel<Real>& model, const EncodedSubgraph& enc);

/// Edge probabilities M_f for the pair; requires a SPAN head.
template <typename Real>
Tensor<Real> span_forward(Tape<Real>& tape, const SpanModel<Real>& model, const EncodedSubgraph& enc);

}  // namespace span::model
