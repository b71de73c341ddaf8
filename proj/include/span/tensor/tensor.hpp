#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace span::tensor {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Real>
class Tape;

/// Dense row-major matrix with an optional gradient buffer.
///
/// A Tensor is a shared handle: copies alias the same storage, which is how
/// the tape keeps operands alive and how parameters receive gradients.
/// Vectors are 1 x n and scalars 1 x 1.
template <typename Real>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor full(std::size_t rows, std::size_t cols, Real value, bool requires_grad = false);
  static Tensor from_values(std::size_t rows, std::size_t cols, std::vector<Real> values,
                            bool requires_grad = false);
  static Tensor scalar(Real value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(impl_); }
  Shape shape() const { return impl_->shape; }
  std::size_t rows() const { return impl_->shape.rows; }
  std::size_t cols() const { return impl_->shape.cols; }
  std::size_t size() const { return impl_->values.size(); }

  std::span<Real> values() { return impl_->values; }
  std::span<const Real> values() const { return impl_->values; }
  // Gradient buffers are accumulators shared by every handle, so even a const
  // handle may add into them.
  std::span<Real> grad() const { return impl_->grad; }

  Real& operator()(std::size_t r, std::size_t c) { return impl_->values[r * impl_->shape.cols + c]; }
  Real operator()(std::size_t r, std::size_t c) const { return impl_->values[r * impl_->shape.cols + c]; }
  Real item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool on);
  void zero_grad();

  /// Deep copy without gradient.
  Tensor clone() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Storage {
    Shape shape;
    std::vector<Real> values;
    std::vector<Real> grad;
    bool requires_grad = false;
  };
  explicit Tensor(std::shared_ptr<Storage> s) : impl_(std::move(s)) {}

  std::shared_ptr<Storage> impl_;
};

template <typename Real>
struct NamedTensor {
  std::string name;
  Tensor<Real> tensor;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace span::tensor
