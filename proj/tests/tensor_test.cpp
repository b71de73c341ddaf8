#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

#include "span/tensor/adam.hpp"
#include "span/tensor/checkpoint.hpp"
#include "span/tensor/tape.hpp"

using namespace span::tensor;
using T = Tensor<double>;

namespace {

T random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, bool grad = true) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(r * c);
  for (auto& x : v) x = n(rng);
  return T::from_values(r, c, v, grad);
}

using Op = std::function<T(Tape<double>&, const std::vector<T>&)>;

// Reduces op(inputs) to a scalar through a fixed random projection, then
// compares every input gradient with central differences.
double max_gradient_error(const Op& op, std::vector<T> inputs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  T probe;
  auto loss_of = [&](Tape<double>& tape) {
    T out = op(tape, inputs);
    if (!probe.defined()) probe = random_tensor(out.rows(), out.cols(), rng, false);
    return tape.sum(tape.mul(out, probe));
  };
  Tape<double> tape;
  for (auto& x : inputs) x.zero_grad();
  tape.backward(loss_of(tape));

  const double h = 1e-5;
  double worst = 0.0;
  for (auto& x : inputs) {
    if (!x.requires_grad()) continue;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double keep = x.values()[i];
      Tape<double> off(false);
      x.values()[i] = keep + h;
      const double up = loss_of(off).item();
      x.values()[i] = keep - h;
      const double down = loss_of(off).item();
      x.values()[i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double analytic = x.grad()[i];
      worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-5}));
    }
  }
  return worst;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Tensor, ShapesAndErrors) {
  auto t = T::zeros(2, 3);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_THROW(T::from_values(2, 2, {1, 2, 3}), ShapeError);
  EXPECT_THROW(t.item(), ShapeError);
  auto alias = t;
  alias(1, 2) = 5.0;
  EXPECT_EQ(t(1, 2), 5.0);
  auto copy = t.clone();
  copy(1, 2) = 1.0;
  EXPECT_EQ(t(1, 2), 5.0);
  Tape<double> tape;
  EXPECT_THROW(tape.matmul(T::zeros(2, 3), T::zeros(2, 3)), ShapeError);
  EXPECT_THROW(tape.add(T::zeros(2, 3), T::zeros(3, 2)), ShapeError);
  EXPECT_THROW(tape.backward(T::zeros(2, 2, true)), ShapeError);
}

TEST(Softmax, Examples) {
  Tape<double> tape;
  auto a = tape.softmax_rows(T::from_values(1, 2, {0.0, 0.0}));
  EXPECT_DOUBLE_EQ(a(0, 0), 0.5);
  auto b = tape.softmax_rows(T::from_values(1, 2, {std::log(2.0), 0.0}));
  EXPECT_NEAR(b(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b(0, 1), 1.0 / 3.0, 1e-15);
  auto mask = T::from_values(1, 2, {0.0, -kInf});
  auto c = tape.softmax_rows(T::from_values(1, 2, {5.0, 7.0}), &mask);
  EXPECT_EQ(c(0, 0), 1.0);
  EXPECT_EQ(c(0, 1), 0.0);
  auto full = T::from_values(1, 2, {-kInf, -kInf});
  EXPECT_THROW(tape.softmax_rows(T::from_values(1, 2, {1.0, 2.0}), &full), std::invalid_argument);
  // stable for large logits
  auto big = tape.softmax_rows(T::from_values(1, 2, {1000.0, 1000.0}));
  EXPECT_DOUBLE_EQ(big(0, 1), 0.5);
}

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t k = 1 + trial % 10;
    auto x = random_tensor(k, k, rng, false);
    for (auto& v : x.values()) v *= 10.0;
    std::vector<float> vals(x.values().begin(), x.values().end());
    Tape<float> tape;
    auto s = tape.softmax_rows(Tensor<float>::from_values(k, k, vals));
    for (std::size_t i = 0; i < k; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += s(i, j);
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
  }
}

TEST(LayerNorm, StandardizesRows) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_tensor(4, 16, rng, false);
    for (auto& v : x.values()) v = 3.0 * v + 2.0;
    Tape<double> tape;
    auto y = tape.layer_norm(x, T::full(1, 16, 1.0), T::zeros(1, 16));
    for (std::size_t r = 0; r < 4; ++r) {
      double mean = 0.0, var = 0.0;
      for (std::size_t c = 0; c < 16; ++c) mean += y(r, c) / 16.0;
      for (std::size_t c = 0; c < 16; ++c) var += (y(r, c) - mean) * (y(r, c) - mean) / 16.0;
      EXPECT_LT(std::abs(mean), 1e-6);
      EXPECT_NEAR(var, 1.0, 1e-4);
    }
  }
}

TEST(Backward, TextbookGradients) {
  std::mt19937_64 rng(3);
  auto w = random_tensor(3, 4, rng);
  Tape<double> tape;
  tape.backward(tape.sum(tape.sigmoid(w)));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-w.values()[i]));
    EXPECT_NEAR(w.grad()[i], s * (1 - s), 1e-14);
  }
  EXPECT_EQ(tape.size(), 0u);

  auto a = random_tensor(2, 3, rng);
  auto b = random_tensor(3, 4, rng);
  tape.backward(tape.sum(tape.matmul(a, b)));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t p = 0; p < 3; ++p) {
      double expected = 0.0;
      for (std::size_t j = 0; j < 4; ++j) expected += b(p, j);
      EXPECT_NEAR(a.grad()[i * 3 + p], expected, 1e-14);
    }
}

TEST(Backward, GradientsAccumulate) {
  auto x = T::scalar(3.0, true);
  Tape<double> tape;
  tape.backward(tape.mul(x, x));
  tape.backward(tape.mul(x, x));
  EXPECT_DOUBLE_EQ(x.grad()[0], 12.0);
}

TEST(Backward, NonRecordingTapeTracksNothing) {
  auto x = T::scalar(3.0, true);
  Tape<double> tape(false);
  auto y = tape.mul(x, x);
  EXPECT_FALSE(y.requires_grad());
  EXPECT_EQ(tape.size(), 0u);
}

TEST(GradCheck, EveryOp) {
  std::mt19937_64 rng(4);
  auto r = [&](std::size_t a, std::size_t b) { return random_tensor(a, b, rng); };
  const std::vector<double> weights{1.0, 0.0, 2.0};
  std::vector<std::pair<const char*, std::pair<Op, std::vector<T>>>> cases = {
      {"matmul", {[](auto& t, auto& x) { return t.matmul(x[0], x[1]); }, {r(3, 4), r(4, 2)}}},
      {"matmul_transposed", {[](auto& t, auto& x) { return t.matmul_transposed(x[0], x[1]); }, {r(3, 4), r(5, 4)}}},
      {"transpose", {[](auto& t, auto& x) { return t.transpose(x[0]); }, {r(3, 4)}}},
      {"add", {[](auto& t, auto& x) { return t.add(x[0], x[1]); }, {r(3, 4), r(3, 4)}}},
      {"add_row", {[](auto& t, auto& x) { return t.add_row(x[0], x[1]); }, {r(3, 4), r(1, 4)}}},
      {"mul", {[](auto& t, auto& x) { return t.mul(x[0], x[1]); }, {r(3, 4), r(3, 4)}}},
      {"scale", {[](auto& t, auto& x) { return t.scale(x[0], 0.7); }, {r(3, 4)}}},
      {"mul_scalar", {[](auto& t, auto& x) { return t.mul_scalar(x[0], x[1]); }, {r(3, 4), r(1, 1)}}},
      {"mask_rows", {[&](auto& t, auto& x) { return t.mask_rows(x[0], weights); }, {r(3, 4)}}},
      {"sigmoid", {[](auto& t, auto& x) { return t.sigmoid(x[0]); }, {r(3, 4)}}},
      {"relu", {[](auto& t, auto& x) { return t.relu(x[0]); }, {r(3, 4)}}},
      {"softmax", {[](auto& t, auto& x) { return t.softmax_rows(x[0]); }, {r(4, 4)}}},
      {"softmax_masked",
       {[](auto& t, auto& x) {
          auto m = T::from_values(2, 3, {0, 0, -kInf, 0, 0, -kInf});
          return t.softmax_rows(x[0], &m);
        },
        {r(2, 3)}}},
      {"layer_norm", {[](auto& t, auto& x) { return t.layer_norm(x[0], x[1], x[2]); }, {r(3, 5), r(1, 5), r(1, 5)}}},
      {"concat",
       {[](auto& t, auto& x) {
          std::vector<T> parts{x[0], x[1]};
          return t.concat_cols(std::span<const T>(parts));
        },
        {r(3, 2), r(3, 4)}}},
      {"sum_rows", {[](auto& t, auto& x) { return t.sum_rows(x[0]); }, {r(3, 4)}}},
      {"mean", {[](auto& t, auto& x) { return t.mean(x[0]); }, {r(3, 4)}}},
      {"gather_rows",
       {[](auto& t, auto& x) {
          std::vector<std::int64_t> ids{2, -1, 0, 2};
          return t.gather_rows(x[0], ids);
        },
        {r(3, 4)}}},
      {"bce",
       {[](auto& t, auto& x) {
          std::vector<double> target{1, 0, 1, 0}, weight{1, 1, 0.5, 2};
          return t.binary_cross_entropy(t.sigmoid(x[0]), target, weight);
        },
        {r(2, 2)}}},
  };
  for (auto& [name, c] : cases) {
    EXPECT_LT(max_gradient_error(c.first, c.second, 5), 1e-4) << name;
  }
}

TEST(Adam, FirstStep) {
  auto x = T::scalar(1.0, true);
  std::vector<T> params{x};
  auto state = AdamState<double>::for_parameters(params);
  x.grad()[0] = 2.0;
  adam_step(std::span<T>(params), state);
  EXPECT_NEAR(x.item(), 0.995, 1e-9);
  EXPECT_EQ(x.grad()[0], 0.0);
}

TEST(Adam, ZeroGradientLeavesParameter) {
  auto x = T::scalar(1.0, true);
  std::vector<T> params{x};
  auto state = AdamState<double>::for_parameters(params);
  x.grad()[0] = 1.0;
  adam_step(std::span<T>(params), state);
  const double after_one = x.item();
  const double m = state.first_moment[0][0], v = state.second_moment[0][0];
  adam_step(std::span<T>(params), state);
  // m-hat is still nonzero, so use raw buffers to check the zero-gradient rule
  std::vector<double> p{1.0}, g{0.0}, m0{0.0}, v0{0.0};
  adam_update<double>(p, g, m0, v0, 1, AdamOptions{});
  EXPECT_EQ(p[0], 1.0);
  EXPECT_NEAR(state.first_moment[0][0], 0.9 * m, 1e-15);
  EXPECT_NEAR(state.second_moment[0][0], 0.999 * v, 1e-15);
  EXPECT_NE(after_one, 1.0);
}

TEST(Adam, MinimizesSquare) {
  auto x = T::scalar(1.0, true);
  std::vector<T> params{x};
  auto state = AdamState<double>::for_parameters(params);
  for (int i = 0; i < 2000; ++i) {
    Tape<double> tape;
    tape.backward(tape.mul(x, x));
    adam_step(std::span<T>(params), state);
  }
  EXPECT_LT(std::abs(x.item()), 0.05);
}

TEST(Adam, ShapeMismatch) {
  std::vector<T> params{T::zeros(2, 2, true)};
  auto state = AdamState<double>::for_parameters(params);
  std::vector<T> other{T::zeros(3, 2, true)};
  EXPECT_THROW(adam_step(std::span<T>(other), state), ShapeError);
  std::vector<double> p(2), g(3), m(2), v(2);
  EXPECT_THROW(adam_update<double>(p, g, m, v, 1, AdamOptions{}), ShapeError);
}

TEST(Adam, DeterministicSteps) {
  auto run = [] {
    std::mt19937_64 rng(9);
    auto w = Tensor<float>::from_values(4, 4, std::vector<float>(16, 0.1f), true);
    auto x = Tensor<float>::from_values(3, 4, {1, 2, 3, 4, 0, 1, 0, 1, -1, 2, 0, 1});
    std::vector<Tensor<float>> params{w};
    auto state = AdamState<float>::for_parameters(params);
    for (int i = 0; i < 20; ++i) {
      Tape<float> tape;
      tape.backward(tape.mean(tape.sigmoid(tape.matmul(x, w))));
      adam_step(std::span<Tensor<float>>(params), state);
    }
    return std::vector<float>(w.values().begin(), w.values().end());
  };
  EXPECT_EQ(run(), run());
}

class CheckpointTest : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "span_ckpt_test";
  void SetUp() override { std::filesystem::create_directories(dir); }
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(CheckpointTest, RoundTrip) {
  std::vector<NamedTensor<float>> saved{{"a", Tensor<float>::from_values(2, 3, {1, 2, 3, 4, 5, 6})},
                                        {"b.c", Tensor<float>::scalar(-0.5f)}};
  save_checkpoint(dir / "m.ckpt", saved);
  auto loaded = load_checkpoint(dir / "m.ckpt");
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].name, "a");
  EXPECT_EQ(loaded[0].tensor.shape(), (Shape{2, 3}));
  EXPECT_EQ(loaded[0].tensor(1, 2), 6.0f);

  std::vector<NamedTensor<double>> targets{{"b.c", Tensor<double>::zeros(1, 1)}, {"a", Tensor<double>::zeros(2, 3)}};
  restore_checkpoint(dir / "m.ckpt", targets);
  EXPECT_EQ(targets[0].tensor.item(), -0.5);
  EXPECT_EQ(targets[1].tensor(0, 1), 2.0);

  std::vector<NamedTensor<double>> wrong{{"a", Tensor<double>::zeros(3, 2)}, {"b.c", Tensor<double>::zeros(1, 1)}};
  EXPECT_THROW(restore_checkpoint(dir / "m.ckpt", wrong), CheckpointError);
  std::vector<NamedTensor<double>> missing{{"a", Tensor<double>::zeros(2, 3)}, {"x", Tensor<double>::zeros(1, 1)}};
  EXPECT_THROW(restore_checkpoint(dir / "m.ckpt", missing), CheckpointError);
}

TEST_F(CheckpointTest, RejectsCorruptFiles) {
  std::vector<NamedTensor<float>> saved{{"a", Tensor<float>::zeros(2, 2)}};
  save_checkpoint(dir / "m.ckpt", saved);
  {
    std::fstream f(dir / "m.ckpt", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt"), CheckpointError);
  save_checkpoint(dir / "m.ckpt", saved);
  {
    std::fstream f(dir / "m.ckpt", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const char v[4] = {9, 0, 0, 0};
    f.write(v, 4);
  }
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt"), CheckpointError);
  save_checkpoint(dir / "m.ckpt", saved);
  std::filesystem::resize_file(dir / "m.ckpt", std::filesystem::file_size(dir / "m.ckpt") - 3);
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt"), CheckpointError);
  EXPECT_THROW(load_checkpoint(dir / "absent.ckpt"), CheckpointError);
}
