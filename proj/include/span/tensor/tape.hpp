#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "span/tensor/tensor.hpp"

namespace span::tensor {

/// Define-by-run reverse-mode recorder.
///
/// Every op computes its result eagerly. When any operand requires a gradient
/// the op also appends its adjoint to the tape; `backward` replays those in
/// exact reverse recording order, accumulating (+=) into operand gradient
/// buffers, then clears the tape. A tape belongs to one thread.
template <typename Real>
class Tape {
 public:
  using T = Tensor<Real>;

  /// With recording off, results never require gradients and nothing is
  /// appended; used for evaluation with frozen parameters.
  explicit Tape(bool recording = true) : recording_(recording) {}
  bool recording() const { return recording_; }

  T matmul(const T& a, const T& b);
  /// a * b^T without materializing the transpose.
  T matmul_transposed(const T& a, const T& b);
  T transpose(const T& a);

  T add(const T& a, const T& b);
  /// a + row, with `row` (1 x cols) broadcast over every row of a.
  T add_row(const T& a, const T& row);
  T mul(const T& a, const T& b);
  T scale(const T& a, Real factor);
  /// a * s for a learnable 1 x 1 tensor s.
  T mul_scalar(const T& a, const T& s);
  /// Multiplies row r of a by the constant weights[r].
  T mask_rows(const T& a, std::span<const Real> weights);

  T sigmoid(const T& a);
  T relu(const T& a);

  /// Row-wise softmax of x + mask. The mask is a constant of the same shape
  /// holding 0 or -infinity; masked entries come out exactly 0. Each row must
  /// keep at least one finite entry.
  T softmax_rows(const T& x, const T* mask = nullptr);

  /// Per-row standardization followed by gain * xhat + bias (both 1 x cols).
  T layer_norm(const T& x, const T& gain, const T& bias, Real eps = Real(1e-5));

  T concat_cols(std::span<const T> parts);
  /// Column sums, 1 x cols.
  T sum_rows(const T& a);
  T sum(const T& a);
  T mean(const T& a);

  /// Rows of `table` picked by `ids`; a negative id yields a zero row.
  T gather_rows(const T& table, std::span<const std::int64_t> ids);

  /// sum_i weight_i * -[y_i log p_i + (1 - y_i) log(1 - p_i)] with p clamped to
  /// [clamp, 1 - clamp]. Targets and weights are constants shaped like prob.
  T binary_cross_entropy(const T& prob, std::span<const Real> target, std::span<const Real> weight,
                         Real clamp = Real(1e-7));

  void backward(const T& loss);
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

 private:
  template <typename... Ts>
  bool track(const Ts&... operands) const {
    return recording_ && (operands.requires_grad() || ...);
  }
  void record(std::function<void()> adjoint) { entries_.push_back(std::move(adjoint)); }

  bool recording_ = true;
  std::vector<std::function<void()>> entries_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace span::tensor
