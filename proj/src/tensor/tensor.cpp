#include "span/tensor/tensor.hpp"

#include <algorithm>

namespace span::tensor {

std::string to_string(const Shape& s) { return std::to_string(s.rows) + "x" + std::to_string(s.cols); }

template <typename Real>
Tensor<Real> Tensor<Real>::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return full(rows, cols, Real(0), requires_grad);
}

template <typename Real>
Tensor<Real> Tensor<Real>::full(std::size_t rows, std::size_t cols, Real value, bool requires_grad) {
  auto s = std::make_shared<Storage>();
  s->shape = {rows, cols};
  s->values.assign(rows * cols, value);
  s->requires_grad = requires_grad;
  if (requires_grad) s->grad.assign(rows * cols, Real(0));
  return Tensor(std::move(s));
}

template <typename Real>
Tensor<Real> Tensor<Real>::from_values(std::size_t rows, std::size_t cols, std::vector<Real> values,
                                       bool requires_grad) {
  if (values.size() != rows * cols) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                     to_string(Shape{rows, cols}));
  }
  auto s = std::make_shared<Storage>();
  s->shape = {rows, cols};
  s->values = std::move(values);
  s->requires_grad = requires_grad;
  if (requires_grad) s->grad.assign(rows * cols, Real(0));
  return Tensor(std::move(s));
}

template <typename Real>
Tensor<Real> Tensor<Real>::scalar(Real value, bool requires_grad) {
  return full(1, 1, value, requires_grad);
}

template <typename Real>
Real Tensor<Real>::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return impl_->values[0];
}

template <typename Real>
void Tensor<Real>::set_requires_grad(bool on) {
  impl_->requires_grad = on;
  if (on) {
    impl_->grad.assign(impl_->values.size(), Real(0));
  } else {
    impl_->grad.clear();
  }
}

template <typename Real>
void Tensor<Real>::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), Real(0));
}

template <typename Real>
Tensor<Real> Tensor<Real>::clone() const {
  return from_values(rows(), cols(), impl_->values, false);
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace span::tensor
