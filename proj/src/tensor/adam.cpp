#include "span/tensor/adam.hpp"

#include <cmath>

namespace span::tensor {

template <typename Real>
AdamState<Real> AdamState<Real>::for_parameters(std::span<const Tensor<Real>> params, AdamOptions options) {
  if (!(options.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  AdamState st;
  st.options = options;
  for (const auto& p : params) {
    st.first_moment.emplace_back(p.size(), Real(0));
    st.second_moment.emplace_back(p.size(), Real(0));
    st.shapes.push_back(p.shape());
  }
  return st;
}

template <typename Real>
void adam_update(std::span<Real> param, std::span<const Real> grad, std::span<Real> m, std::span<Real> v,
                 std::uint64_t step, const AdamOptions& o) {
  if (grad.size() != param.size() || m.size() != param.size() || v.size() != param.size()) {
    throw ShapeError("adam_update: buffer sizes differ");
  }
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(step));
  const Real b1 = static_cast<Real>(o.beta1), b2 = static_cast<Real>(o.beta2);
  const Real lr_t = static_cast<Real>(o.lr / c1);
  const Real inv_c2 = static_cast<Real>(1.0 / c2);
  const Real eps = static_cast<Real>(o.eps);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const Real g = grad[i];
    m[i] = b1 * m[i] + (Real(1) - b1) * g;
    v[i] = b2 * v[i] + (Real(1) - b2) * g * g;
    param[i] -= lr_t * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
  }
}

template <typename Real>
void adam_step(std::span<Tensor<Real>> params, AdamState<Real>& state) {
  if (params.size() != state.shapes.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters but state tracks " +
                     std::to_string(state.shapes.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != state.shapes[i]) {
      throw ShapeError("adam_step: parameter " + std::to_string(i) + " has shape " + to_string(params[i].shape()) +
                       ", state expects " + to_string(state.shapes[i]));
    }
    if (!params[i].requires_grad()) throw std::invalid_argument("adam_step: parameter does not track gradients");
  }
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam_update<Real>(params[i].values(), params[i].grad(), state.first_moment[i], state.second_moment[i],
                      state.step, state.options);
    params[i].zero_grad();
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<Tensor<float>>, AdamState<float>&);
template void adam_step<double>(std::span<Tensor<double>>, AdamState<double>&);
template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>, std::span<float>,
                                 std::uint64_t, const AdamOptions&);
template void adam_update<double>(std::span<double>, std::span<const double>, std::span<double>, std::span<double>,
                                  std::uint64_t, const AdamOptions&);

}  // namespace span::tensor
