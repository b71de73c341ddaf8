#include "span/tensor/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace span::tensor {

namespace {

template <typename Real>
void require_same_shape(const Tensor<Real>& a, const Tensor<Real>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + to_string(a.shape()) + " and " + to_string(b.shape()) +
                     " differ");
  }
}

template <typename Real>
bool any_grad(const Tensor<Real>& a) {
  return a.requires_grad();
}

template <typename Real, typename... Rest>
bool any_grad(const Tensor<Real>& a, const Rest&... rest) {
  return a.requires_grad() || any_grad(rest...);
}

template <typename Real>
void check_finite([[maybe_unused]] const Tensor<Real>& t, [[maybe_unused]] const char* op) {
#ifndef NDEBUG
  for (Real v : t.values()) {
    if (!std::isfinite(v)) throw std::runtime_error(std::string(op) + " produced a non-finite value");
  }
#endif
}

// C (m x n) += A (m x k) * B (k x n), row-major. Zero rows of A (padding) are
// skipped. B is consumed four rows at a time by every live row of A, so the
// block stays in L1 while C is updated.
template <typename Real>
void gemm_accumulate(const Real* __restrict A, const Real* __restrict B, Real* __restrict C, std::size_t m,
                     std::size_t k, std::size_t n) {
  std::vector<std::size_t> live;
  live.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Real* arow = A + i * k;
    if (!std::all_of(arow, arow + k, [](Real v) { return v == Real(0); })) live.push_back(i);
  }
  std::size_t p = 0;
  for (; p + 4 <= k; p += 4) {
    const Real* b0 = B + p * n;
    const Real* b1 = b0 + n;
    const Real* b2 = b1 + n;
    const Real* b3 = b2 + n;
    for (std::size_t i : live) {
      const Real* arow = A + i * k + p;
      const Real a0 = arow[0], a1 = arow[1], a2 = arow[2], a3 = arow[3];
      Real* __restrict crow = C + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
    }
  }
  for (; p < k; ++p) {
    const Real* brow = B + p * n;
    for (std::size_t i : live) {
      const Real av = A[i * k + p];
      Real* __restrict crow = C + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace

template <typename Real>
Tensor<Real> Tape<Real>::matmul(const T& a, const T& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + to_string(a.shape()) + " times " + to_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  T out = T::zeros(m, n, track(a, b));
  gemm_accumulate(a.values().data(), b.values().data(), out.values().data(), m, k, n);
  check_finite(out, "matmul");
  if (out.requires_grad()) {
    record([a, b, out, m, k, n]() mutable {
      const Real* dC = out.grad().data();
      if (a.requires_grad()) {
        const Real* B = b.values().data();
        Real* dA = a.grad().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            Real acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += dC[i * n + j] * B[p * n + j];
            dA[i * k + p] += acc;
          }
        }
      }
      if (b.requires_grad()) {
        const Real* A = a.values().data();
        Real* dB = b.grad().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const Real av = A[i * k + p];
            if (av == Real(0)) continue;
            for (std::size_t j = 0; j < n; ++j) dB[p * n + j] += av * dC[i * n + j];
          }
        }
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::matmul_transposed(const T& a, const T& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_transposed: " + to_string(a.shape()) + " times transpose of " + to_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  T out = T::zeros(m, n, track(a, b));
  {
    const Real* A = a.values().data();
    const Real* B = b.values().data();
    Real* C = out.values().data();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Real acc = 0;
        for (std::size_t p = 0; p < k; ++p) acc += A[i * k + p] * B[j * k + p];
        C[i * n + j] = acc;
      }
    }
  }
  check_finite(out, "matmul_transposed");
  if (out.requires_grad()) {
    record([a, b, out, m, k, n]() mutable {
      const Real* dC = out.grad().data();
      if (a.requires_grad()) {
        const Real* B = b.values().data();
        Real* dA = a.grad().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const Real g = dC[i * n + j];
            if (g == Real(0)) continue;
            for (std::size_t p = 0; p < k; ++p) dA[i * k + p] += g * B[j * k + p];
          }
        }
      }
      if (b.requires_grad()) {
        const Real* A = a.values().data();
        Real* dB = b.grad().data();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const Real g = dC[i * n + j];
            if (g == Real(0)) continue;
            for (std::size_t p = 0; p < k; ++p) dB[j * k + p] += g * A[i * k + p];
          }
        }
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::transpose(const T& a) {
  const std::size_t m = a.rows(), n = a.cols();
  T out = T::zeros(n, m, track(a));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(j, i) = a(i, j);
  }
  if (out.requires_grad()) {
    record([a, out, m, n]() mutable {
      auto dA = a.grad();
      auto dO = out.grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) dA[i * n + j] += dO[j * m + i];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::add(const T& a, const T& b) {
  require_same_shape(a, b, "add");
  T out = T::zeros(a.rows(), a.cols(), track(a, b));
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] + bv[i];
  check_finite(out, "add");
  if (out.requires_grad()) {
    record([a, b, out]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto da = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
      }
      if (b.requires_grad()) {
        auto db = b.grad();
        for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::add_row(const T& a, const T& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError("add_row: cannot broadcast " + to_string(row.shape()) + " over " + to_string(a.shape()));
  }
  const std::size_t m = a.rows(), n = a.cols();
  T out = T::zeros(m, n, track(a, row));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a(i, j) + row(0, j);
  }
  if (out.requires_grad()) {
    record([a, row, out, m, n]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto da = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
      }
      if (row.requires_grad()) {
        auto dr = row.grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) dr[j] += g[i * n + j];
        }
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::mul(const T& a, const T& b) {
  require_same_shape(a, b, "mul");
  T out = T::zeros(a.rows(), a.cols(), track(a, b));
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * bv[i];
  check_finite(out, "mul");
  if (out.requires_grad()) {
    record([a, b, out]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto da = a.grad();
        auto bv = b.values();
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * bv[i];
      }
      if (b.requires_grad()) {
        auto db = b.grad();
        auto av = a.values();
        for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * av[i];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::scale(const T& a, Real factor) {
  T out = T::zeros(a.rows(), a.cols(), track(a));
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * factor;
  if (out.requires_grad()) {
    record([a, out, factor]() mutable {
      auto g = out.grad();
      auto da = a.grad();
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * factor;
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::mul_scalar(const T& a, const T& s) {
  if (s.size() != 1) throw ShapeError("mul_scalar: factor has shape " + to_string(s.shape()));
  const Real f = s.item();
  T out = T::zeros(a.rows(), a.cols(), track(a, s));
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * f;
  check_finite(out, "mul_scalar");
  if (out.requires_grad()) {
    record([a, s, out, f]() mutable {
      auto g = out.grad();
      auto av = a.values();
      if (a.requires_grad()) {
        auto da = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * f;
      }
      if (s.requires_grad()) {
        Real acc = 0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * av[i];
        s.grad()[0] += acc;
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::mask_rows(const T& a, std::span<const Real> weights) {
  if (weights.size() != a.rows()) throw ShapeError("mask_rows: weight count does not match row count");
  const std::size_t m = a.rows(), n = a.cols();
  T out = T::zeros(m, n, track(a));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a(i, j) * weights[i];
  }
  if (out.requires_grad()) {
    record([a, out, w = std::vector<Real>(weights.begin(), weights.end()), m, n]() mutable {
      auto g = out.grad();
      auto da = a.grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) da[i * n + j] += g[i * n + j] * w[i];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::sigmoid(const T& a) {
  T out = T::zeros(a.rows(), a.cols(), track(a));
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const Real x = av[i];
    // Split by sign so exp never overflows.
    if (x >= 0) {
      o[i] = Real(1) / (Real(1) + std::exp(-x));
    } else {
      const Real e = std::exp(x);
      o[i] = e / (Real(1) + e);
    }
  }
  if (out.requires_grad()) {
    record([a, out]() mutable {
      auto g = out.grad();
      auto y = out.values();
      auto da = a.grad();
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * y[i] * (Real(1) - y[i]);
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::relu(const T& a) {
  T out = T::zeros(a.rows(), a.cols(), track(a));
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] > 0 ? av[i] : Real(0);
  if (out.requires_grad()) {
    record([a, out]() mutable {
      auto g = out.grad();
      auto av = a.values();
      auto da = a.grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (av[i] > 0) da[i] += g[i];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::softmax_rows(const T& x, const T* mask) {
  if (mask) require_same_shape(x, *mask, "softmax_rows mask");
  const std::size_t m = x.rows(), n = x.cols();
  T out = T::zeros(m, n, track(x));
  std::vector<Real> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    Real max = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = x(i, j) + (mask ? (*mask)(i, j) : Real(0));
      max = std::max(max, row[j]);
    }
    if (!std::isfinite(max)) throw std::invalid_argument("softmax_rows: row " + std::to_string(i) + " is fully masked");
    Real total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - max);
      total += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) out(i, j) = row[j] / total;
  }
  if (out.requires_grad()) {
    record([x, out, m, n]() mutable {
      auto g = out.grad();
      auto y = out.values();
      auto dx = x.grad();
      for (std::size_t i = 0; i < m; ++i) {
        Real dot = 0;
        for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * y[i * n + j];
        for (std::size_t j = 0; j < n; ++j) dx[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::layer_norm(const T& x, const T& gain, const T& bias, Real eps) {
  const std::size_t m = x.rows(), n = x.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n) {
    throw ShapeError("layer_norm: gain/bias must be 1x" + std::to_string(n));
  }
  T out = T::zeros(m, n, track(x, gain, bias));
  std::vector<Real> xhat(m * n);
  std::vector<Real> inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    Real mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += x(i, j);
    mu /= static_cast<Real>(n);
    Real var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (x(i, j) - mu) * (x(i, j) - mu);
    var /= static_cast<Real>(n);
    inv_std[i] = Real(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (x(i, j) - mu) * inv_std[i];
      out(i, j) = gain(0, j) * xhat[i * n + j] + bias(0, j);
    }
  }
  check_finite(out, "layer_norm");
  if (out.requires_grad()) {
    record([x, gain, bias, out, xhat = std::move(xhat), inv_std = std::move(inv_std), m, n]() mutable {
      auto g = out.grad();
      if (gain.requires_grad()) {
        auto dg = gain.grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) dg[j] += g[i * n + j] * xhat[i * n + j];
        }
      }
      if (bias.requires_grad()) {
        auto db = bias.grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) db[j] += g[i * n + j];
        }
      }
      if (x.requires_grad()) {
        auto dx = x.grad();
        auto gv = gain.values();
        for (std::size_t i = 0; i < m; ++i) {
          Real mean_d = 0, mean_dx = 0;
          for (std::size_t j = 0; j < n; ++j) {
            const Real d = g[i * n + j] * gv[j];
            mean_d += d;
            mean_dx += d * xhat[i * n + j];
          }
          mean_d /= static_cast<Real>(n);
          mean_dx /= static_cast<Real>(n);
          for (std::size_t j = 0; j < n; ++j) {
            const Real d = g[i * n + j] * gv[j];
            dx[i * n + j] += inv_std[i] * (d - mean_d - xhat[i * n + j] * mean_dx);
          }
        }
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::concat_cols(std::span<const T> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: nothing to concatenate");
  const std::size_t m = parts[0].rows();
  std::size_t n = 0;
  bool grad = false;
  for (const auto& p : parts) {
    if (p.rows() != m) throw ShapeError("concat_cols: row counts differ");
    n += p.cols();
    grad = grad || p.requires_grad();
  }
  T out = T::zeros(m, n, recording_ && grad);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < p.cols(); ++j) out(i, offset + j) = p(i, j);
    }
    offset += p.cols();
  }
  if (out.requires_grad()) {
    record([ps = std::vector<T>(parts.begin(), parts.end()), out, m, n]() mutable {
      auto g = out.grad();
      std::size_t offset = 0;
      for (auto& p : ps) {
        const std::size_t w = p.cols();
        if (p.requires_grad()) {
          auto dp = p.grad();
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < w; ++j) dp[i * w + j] += g[i * n + offset + j];
          }
        }
        offset += w;
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::sum_rows(const T& a) {
  const std::size_t m = a.rows(), n = a.cols();
  T out = T::zeros(1, n, track(a));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(0, j) += a(i, j);
  }
  if (out.requires_grad()) {
    record([a, out, m, n]() mutable {
      auto g = out.grad();
      auto da = a.grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) da[i * n + j] += g[j];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::sum(const T& a) {
  Real total = 0;
  for (Real v : a.values()) total += v;
  T out = T::scalar(total, track(a));
  if (out.requires_grad()) {
    record([a, out]() mutable {
      const Real g = out.grad()[0];
      for (Real& d : a.grad()) d += g;
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::mean(const T& a) {
  if (a.size() == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), Real(1) / static_cast<Real>(a.size()));
}

template <typename Real>
Tensor<Real> Tape<Real>::gather_rows(const T& table, std::span<const std::int64_t> ids) {
  const std::size_t n = table.cols();
  T out = T::zeros(ids.size(), n, track(table));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0) continue;
    const auto r = static_cast<std::size_t>(ids[i]);
    if (r >= table.rows()) throw std::out_of_range("gather_rows: row " + std::to_string(r) + " outside table");
    for (std::size_t j = 0; j < n; ++j) out(i, j) = table(r, j);
  }
  if (out.requires_grad()) {
    record([table, out, idx = std::vector<std::int64_t>(ids.begin(), ids.end()), n]() mutable {
      auto g = out.grad();
      auto dt = table.grad();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0) continue;
        const auto r = static_cast<std::size_t>(idx[i]);
        for (std::size_t j = 0; j < n; ++j) dt[r * n + j] += g[i * n + j];
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> Tape<Real>::binary_cross_entropy(const T& prob, std::span<const Real> target,
                                              std::span<const Real> weight, Real clamp) {
  if (target.size() != prob.size() || weight.size() != prob.size()) {
    throw ShapeError("binary_cross_entropy: target/weight size does not match prediction");
  }
  auto p = prob.values();
  Real total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (weight[i] == Real(0)) continue;
    const Real pc = std::clamp(p[i], clamp, Real(1) - clamp);
    total -= weight[i] * (target[i] * std::log(pc) + (Real(1) - target[i]) * std::log(Real(1) - pc));
  }
  T out = T::scalar(total, track(prob));
  if (out.requires_grad()) {
    record([prob, out, y = std::vector<Real>(target.begin(), target.end()),
            w = std::vector<Real>(weight.begin(), weight.end()), clamp]() mutable {
      const Real g = out.grad()[0];
      auto p = prob.values();
      auto dp = prob.grad();
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (w[i] == Real(0) || p[i] <= clamp || p[i] >= Real(1) - clamp) continue;
        dp[i] += g * w[i] * (-y[i] / p[i] + (Real(1) - y[i]) / (Real(1) - p[i]));
      }
    });
  }
  return out;
}

template <typename Real>
void Tape<Real>::backward(const T& loss) {
  if (loss.size() != 1) throw ShapeError("backward needs a scalar loss, got " + to_string(loss.shape()));
  if (!loss.requires_grad()) {
    entries_.clear();
    return;
  }
  // Seed only this pass's contribution; parameter buffers keep accumulating.
  T seed = loss;
  seed.grad()[0] += Real(1);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
  entries_.clear();
}

template class Tape<float>;
template class Tape<double>;

}  // namespace span::tensor
