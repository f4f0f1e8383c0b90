/*
 * Copyright 2026 The anomaly-pipeline Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include "anomaly/errors.hpp"
#include "anomaly/nn/activation.hpp"
#include "anomaly/nn/conv.hpp"
#include "anomaly/nn/dense.hpp"
#include "anomaly/nn/loss.hpp"
#include "anomaly/nn/lstm.hpp"
#include "anomaly/nn/param.hpp"
#include "anomaly/nn/pool.hpp"
#include "doctest.h"
#include "oracles.hpp"

using anomaly::Tensor;
using namespace anomaly::nn;

namespace {

void check_close(const Tensor& a, const Tensor& b, double tol = 1e-12) {
  REQUIRE(a.shape() == b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(tol));
  }
}

}  // namespace

TEST_CASE("same padding puts the extra cell at the bottom/right") {
  CHECK(Padding::same(1, 1) == Padding{0, 0, 0, 0});
  CHECK(Padding::same(2, 2) == Padding{0, 1, 0, 1});
  CHECK(Padding::same(3, 3) == Padding{1, 1, 1, 1});
}

TEST_CASE("conv2d matches the nested-loop oracle") {
  std::mt19937_64 rng(11);
  for (std::size_t k : {1u, 2u, 3u}) {
    for (std::size_t stride : {1u, 2u}) {
      ConvSpec spec{k, k, 4, stride, stride, Padding::same(k, k)};
      const Tensor x = oracle::random_tensor({3, 7, 6}, rng);
      const Tensor w = oracle::random_tensor({4, 3, k, k}, rng);
      const Tensor b = oracle::random_tensor({4}, rng);
      const Padding& p = spec.padding;
      check_close(conv2d_forward(x, spec, w, b),
                  oracle::conv2d(x, w, b, stride, stride, p.top, p.bottom,
                                 p.left, p.right));
    }
  }
}

TEST_CASE("same-padded stride-1 conv keeps the spatial extent") {
  std::mt19937_64 rng(3);
  const Tensor x = oracle::random_tensor({1, 7, 6}, rng);
  for (std::size_t k : {1u, 2u, 3u}) {
    ConvSpec spec{k, k, 2, 1, 1, Padding::same(k, k)};
    const Tensor out = conv2d_forward(x, spec, Tensor({2, 1, k, k}, 0.1),
                                      Tensor({2}));
    CHECK(out.shape() == anomaly::Shape{2, 7, 6});
  }
}

TEST_CASE("transposed conv matches the scatter oracle") {
  std::mt19937_64 rng(5);
  for (std::size_t stride : {1u, 2u, 3u}) {
    ConvSpec spec{3, 4, 2, stride, stride, {1, 0, 2, 1}};
    const Tensor x = oracle::random_tensor({3, 4, 3}, rng);
    const Tensor w = oracle::random_tensor({3, 2, 3, 4}, rng);
    const Tensor b = oracle::random_tensor({2}, rng);
    check_close(transposed_conv2d_forward(x, spec, w, b),
                oracle::transposed_conv2d(x, w, b, stride, 1, 0, 2, 1));
  }
}

TEST_CASE("transposed conv is the adjoint of conv") {
  // <conv(x), y> = <x, conv^T(y)> with zero biases and shared weights.
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> ker(1, 4), str(1, 3), outs(2, 6);
  std::size_t trials = 0;
  while (trials < 30) {
    const std::size_t a = ker(rng);
    const std::size_t s = str(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(0, a - 1)(rng);
    const std::size_t m = outs(rng);
    // Input extent for which the forward floor division is exact.
    if ((m - 1) * s + a <= 2 * p) continue;
    const std::size_t n = (m - 1) * s + a - 2 * p;
    ++trials;
    ConvSpec fwd{a, a, 3, s, s, Padding::symmetric(p)};
    const Tensor x = oracle::random_tensor({2, n, n}, rng);
    const Tensor w = oracle::random_tensor({3, 2, a, a}, rng);
    const Tensor cx = conv2d_forward(x, fwd, w, Tensor({3}));
    REQUIRE(cx.shape() == anomaly::Shape{3, m, m});
    const Tensor y = oracle::random_tensor(cx.shape(), rng);

    ConvSpec back = fwd;
    back.filters = 2;
    const Tensor ty = transposed_conv2d_forward(y, back, w, Tensor({2}));
    REQUIRE(ty.shape() == x.shape());
    CHECK(anomaly::dot(cx.values(), y.values()) ==
          doctest::Approx(anomaly::dot(x.values(), ty.values())).epsilon(1e-10));
  }
}

TEST_CASE("conv shape law over a random sweep") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> ext(1, 20), ker(1, 5), str(1, 4),
      pad(0, 3);
  std::size_t checked = 0;
  while (checked < 600) {
    const std::size_t nx = ext(rng), ny = ext(rng), a = ker(rng), b = ker(rng),
                      p = pad(rng), s = str(rng);
    if (nx + 2 * p < a || ny + 2 * p < b) continue;
    ++checked;
    const std::size_t out_r = (nx + 2 * p - a) / s + 1;
    const std::size_t out_c = (ny + 2 * p - b) / s + 1;
    CHECK(conv_output_extent(nx, a, s, p, p) == out_r);
    CHECK(conv_output_extent(ny, b, s, p, p) == out_c);

    ConvSpec spec{a, b, 1, s, s, Padding::symmetric(p)};
    const Tensor y = conv2d_forward(Tensor({1, nx, ny}, 1.0), spec,
                                    Tensor({1, 1, a, b}, 1.0), Tensor({1}));
    CHECK(y.shape() == anomaly::Shape{1, out_r, out_c});

    // Transposing maps the output extent back to the input extent, short by
    // the remainder the forward floor division discarded.
    const std::size_t rem_r = (nx + 2 * p - a) % s;
    const std::size_t rem_c = (ny + 2 * p - b) % s;
    if (out_r * s + a > 2 * p + s && out_c * s + b > 2 * p + s) {
      CHECK(transposed_output_extent(out_r, a, s, p, p) + rem_r == nx);
      CHECK(transposed_output_extent(out_c, b, s, p, p) + rem_c == ny);
    }
  }
}

TEST_CASE("conv rejects a kernel larger than the padded input") {
  ConvSpec spec{4, 4, 1, 1, 1, {}};
  CHECK_THROWS_AS(conv2d_forward(Tensor({1, 3, 3}), spec, Tensor({1, 1, 4, 4}),
                                 Tensor({1})),
                  anomaly::ShapeError);
  CHECK_THROWS_AS(conv2d_forward(Tensor({1, 5, 5}), spec, Tensor({1, 2, 4, 4}),
                                 Tensor({1})),
                  anomaly::ShapeError);
}

TEST_CASE("max pool picks the maximum and routes gradients to it") {
  Tensor x({1, 2, 4}, std::vector<double>{1, 5, 2, 2, 3, 4, 9, 0});
  const auto r = max_pool2d(x, 2, 2);
  REQUIRE(r.output.shape() == anomaly::Shape{1, 1, 2});
  CHECK(r.output[0] == 5.0);
  CHECK(r.output[1] == 9.0);
  const Tensor g = max_pool2d_backward(Tensor({1, 1, 2}, std::vector<double>{1, 2}),
                                       r.argmax, x.shape());
  CHECK(g.data() == std::vector<double>{0, 1, 0, 0, 0, 0, 2, 0});
}

TEST_CASE("max pool ties go to the first cell") {
  Tensor x({1, 2, 2}, 3.0);
  const auto r = max_pool2d(x, 2, 2);
  CHECK(r.argmax[0] == 0);
}

TEST_CASE("dense forward is act(Wx + b)") {
  Tensor w({2, 3}, std::vector<double>{1, 2, 3, -1, 0, 1});
  const std::vector<double> x = {1, 1, 1};
  const std::vector<double> b = {0.5, -0.5};
  const auto y = dense_forward(x, w, b, Activation::kIdentity);
  CHECK(y == std::vector<double>{6.5, -0.5});
  const auto r = dense_forward(x, w, b, Activation::kRelu);
  CHECK(r == std::vector<double>{6.5, 0.0});
  const auto s = dense_forward(x, w, b, Activation::kSigmoid);
  CHECK(s[0] == doctest::Approx(oracle::sigmoid(6.5)));
}

TEST_CASE("activations and their output-side derivatives") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  for (double x : {-2.0, -0.3, 0.7, 3.0}) {
    const double h = 1e-6;
    for (Activation a : {Activation::kSigmoid, Activation::kTanh,
                         Activation::kRelu, Activation::kIdentity}) {
      const double numeric = (apply(a, x + h) - apply(a, x - h)) / (2 * h);
      CHECK(derivative_from_output(a, apply(a, x)) ==
            doctest::Approx(numeric).epsilon(1e-6));
    }
  }
  CHECK(activation_from_string("tanh") == Activation::kTanh);
  CHECK_THROWS(activation_from_string("gelu"));
}

TEST_CASE("lstm cell step follows the gate equations") {
  std::mt19937_64 rng(8);
  LstmParams p(3, 2);
  for (Tensor* t : {&p.w_forget, &p.w_input, &p.w_candidate, &p.w_output,
                    &p.b_forget, &p.b_input, &p.b_candidate, &p.b_output}) {
    *t = oracle::random_tensor(t->shape(), rng);
  }
  const std::vector<double> x = {0.2, -0.4, 0.9};
  LstmState prev{{0.3, -0.1}, {0.5, 0.25}};
  const LstmState next = lstm_cell_step(x, prev, p);

  std::vector<double> z = {prev.hidden[0], prev.hidden[1], x[0], x[1], x[2]};
  auto gate = [&](const Tensor& w, const Tensor& b, std::size_t k) {
    double a = b[k];
    for (std::size_t j = 0; j < 5; ++j) a += w.at(k, j) * z[j];
    return a;
  };
  for (std::size_t k = 0; k < 2; ++k) {
    const double f = oracle::sigmoid(gate(p.w_forget, p.b_forget, k));
    const double i = oracle::sigmoid(gate(p.w_input, p.b_input, k));
    const double c = std::tanh(gate(p.w_candidate, p.b_candidate, k));
    const double o = oracle::sigmoid(gate(p.w_output, p.b_output, k));
    const double cell = f * prev.cell[k] + i * c;
    CHECK(next.cell[k] == doctest::Approx(cell).epsilon(1e-14));
    CHECK(next.hidden[k] == doctest::Approx(o * std::tanh(cell)).epsilon(1e-14));
  }
}

TEST_CASE("zero lstm parameters give the closed-form state") {
  LstmParams p(2, 3);
  const LstmState next =
      lstm_cell_step(std::vector<double>{1.0, 2.0}, LstmState::zeros(3), p);
  for (double c : next.cell) CHECK(c == 0.0);
  for (double h : next.hidden) CHECK(h == 0.0);
}

TEST_CASE("reconstruction error forms") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {1, 0, 4};
  CHECK(reconstruction_error(x, y) == 5.0);
  CHECK(mean_squared_error(x, y) == doctest::Approx(5.0 / 3.0));
  CHECK(reconstruction_error(x, x) == 0.0);
  CHECK_THROWS_AS(reconstruction_error(x, std::vector<double>{1}),
                  anomaly::ShapeError);
}

TEST_CASE("glorot init stays inside its bound and is seed-determined") {
  Tensor a({20, 30});
  Tensor b({20, 30});
  Rng r1 = derive_rng(9, 1);
  Rng r2 = derive_rng(9, 1);
  glorot_uniform(a, 30, 20, r1);
  glorot_uniform(b, 30, 20, r2);
  CHECK(a == b);
  const double bound = std::sqrt(6.0 / 50.0);
  for (double v : a.data()) CHECK(std::abs(v) <= bound);
  Rng r3 = derive_rng(9, 2);
  glorot_uniform(b, 30, 20, r3);
  CHECK_FALSE(a == b);
}
