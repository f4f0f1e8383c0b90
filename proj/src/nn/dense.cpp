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

#include "anomaly/nn/dense.hpp"

#include "anomaly/errors.hpp"

namespace anomaly::nn {

std::vector<double> dense_forward(std::span<const double> input,
                                  const Tensor& weights,
                                  std::span<const double> bias,
                                  Activation act) {
  if (weights.rank() != 2) throw ShapeError("dense weights must be [out, in]");
  const std::size_t out = weights.extent(0);
  const std::size_t in = weights.extent(1);
  if (input.size() != in) {
    throw ShapeError("dense: input length " + std::to_string(input.size()) +
                     " but weights expect " + std::to_string(in));
  }
  if (bias.size() != out) throw ShapeError("dense: bias length mismatch");

  std::vector<double> y(out);
  const double* w = weights.data().data();
  for (std::size_t o = 0; o < out; ++o) {
    double sum = bias[o];
    const double* row = w + o * in;
    for (std::size_t i = 0; i < in; ++i) sum += row[i] * input[i];
    y[o] = apply(act, sum);
  }
  return y;
}

DenseGrads dense_backward(std::span<const double> upstream,
                          std::span<const double> input,
                          std::span<const double> output,
                          const Tensor& weights, Activation act) {
  const std::size_t out = weights.extent(0);
  const std::size_t in = weights.extent(1);
  if (upstream.size() != out || output.size() != out || input.size() != in) {
    throw ShapeError("dense backward: dimension mismatch");
  }
  DenseGrads g{std::vector<double>(in, 0.0), Tensor(weights.shape()),
               std::vector<double>(out)};
  const double* w = weights.data().data();
  double* gw = g.weights.data().data();
  for (std::size_t o = 0; o < out; ++o) {
    const double delta = upstream[o] * derivative_from_output(act, output[o]);
    g.bias[o] = delta;
    if (delta == 0.0) continue;
    const double* row = w + o * in;
    double* grow = gw + o * in;
    for (std::size_t i = 0; i < in; ++i) {
      grow[i] = delta * input[i];
      g.input[i] += delta * row[i];
    }
  }
  return g;
}

DenseLayer::DenseLayer(std::string name, std::size_t in, std::size_t out,
                       Activation act)
    : weight_(name + ".weight", {out, in}),
      bias_(name + ".bias", {out}),
      act_(act) {}

void DenseLayer::init(Rng& rng) {
  glorot_uniform(weight_.value, in_size(), out_size(), rng);
  bias_.value.fill(0.0);
}

std::vector<double> DenseLayer::forward(std::span<const double> input) const {
  return dense_forward(input, weight_.value, bias_.value.values(), act_);
}

std::vector<double> DenseLayer::backward(std::span<const double> upstream,
                                         std::span<const double> input,
                                         std::span<const double> output) {
  const std::size_t out = out_size();
  const std::size_t in = in_size();
  if (upstream.size() != out || output.size() != out || input.size() != in) {
    throw ShapeError("dense backward: dimension mismatch");
  }
  std::vector<double> grad_in(in, 0.0);
  const double* w = weight_.value.data().data();
  double* gw = weight_.grad.data().data();
  for (std::size_t o = 0; o < out; ++o) {
    const double delta = upstream[o] * derivative_from_output(act_, output[o]);
    bias_.grad[o] += delta;
    if (delta == 0.0) continue;
    const double* row = w + o * in;
    double* grow = gw + o * in;
    for (std::size_t i = 0; i < in; ++i) {
      grow[i] += delta * input[i];
      grad_in[i] += delta * row[i];
    }
  }
  return grad_in;
}

}  // namespace anomaly::nn
