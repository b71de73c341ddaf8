#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "span/tensor/tensor.hpp"

namespace span::tensor {

struct AdamOptions {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment buffers for a fixed parameter list.
template <typename Real>
struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<std::vector<Real>> first_moment;
  std::vector<std::vector<Real>> second_moment;
  std::vector<Shape> shapes;

  static AdamState for_parameters(std::span<const Tensor<Real>> params, AdamOptions options = {});
};

/// Bias-corrected Adam update using each parameter's accumulated gradient,
/// after which the gradients are zeroed.
template <typename Real>
void adam_step(std::span<Tensor<Real>> params, AdamState<Real>& state);

/// Same update on raw buffers; `step` is the 1-based step number.
template <typename Real>
void adam_update(std::span<Real> param, std::span<const Real> grad, std::span<Real> m, std::span<Real> v,
                 std::uint64_t step, const AdamOptions& options);

}  // namespace span::tensor
