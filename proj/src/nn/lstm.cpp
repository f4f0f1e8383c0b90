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

#include "anomaly/nn/lstm.hpp"

#include <cmath>

#include "anomaly/errors.hpp"
#include "anomaly/nn/activation.hpp"

namespace anomaly::nn {
namespace {

// W z + b for one gate.
void gate_preactivation(const Tensor& w, const Tensor& b,
                        std::span<const double> z, std::vector<double>& out) {
  const std::size_t rows = w.extent(0);
  const std::size_t cols = w.extent(1);
  out.resize(rows);
  const double* wd = w.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = b[r];
    const double* row = wd + r * cols;
    for (std::size_t c = 0; c < cols; ++c) sum += row[c] * z[c];
    out[r] = sum;
  }
}

// Accumulates dW += delta z^T, db += delta and dz += W^T delta.
void gate_backward(const Tensor& w, std::span<const double> delta,
                   std::span<const double> z, Tensor& grad_w, Tensor& grad_b,
                   std::vector<double>& grad_z) {
  const std::size_t rows = w.extent(0);
  const std::size_t cols = w.extent(1);
  const double* wd = w.data().data();
  double* gw = grad_w.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double d = delta[r];
    grad_b[r] += d;
    if (d == 0.0) continue;
    const double* row = wd + r * cols;
    double* grow = gw + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      grow[c] += d * z[c];
      grad_z[c] += d * row[c];
    }
  }
}

}  // namespace

LstmParams::LstmParams(std::size_t in, std::size_t hidden)
    : input_size(in),
      hidden_size(hidden),
      w_forget({hidden, hidden + in}),
      w_input({hidden, hidden + in}),
      w_candidate({hidden, hidden + in}),
      w_output({hidden, hidden + in}),
      b_forget({hidden}),
      b_input({hidden}),
      b_candidate({hidden}),
      b_output({hidden}) {}

void LstmParams::validate() const {
  const Shape w{hidden_size, hidden_size + input_size};
  const Shape b{hidden_size};
  if (w_forget.shape() != w || w_input.shape() != w ||
      w_candidate.shape() != w || w_output.shape() != w) {
    throw ShapeError("lstm gate weights must all be " + shape_string(w));
  }
  if (b_forget.shape() != b || b_input.shape() != b ||
      b_candidate.shape() != b || b_output.shape() != b) {
    throw ShapeError("lstm gate biases must all be " + shape_string(b));
  }
}

void LstmParams::fill(double value) {
  for (Tensor* t : {&w_forget, &w_input, &w_candidate, &w_output, &b_forget,
                    &b_input, &b_candidate, &b_output}) {
    t->fill(value);
  }
}

LstmState lstm_cell_step(std::span<const double> x, const LstmState& prev,
                         const LstmParams& params, LstmStepCache* cache) {
  const std::size_t hidden = params.hidden_size;
  if (x.size() != params.input_size) {
    throw ShapeError("lstm step: input length " + std::to_string(x.size()) +
                     ", expected " + std::to_string(params.input_size));
  }
  if (prev.hidden.size() != hidden || prev.cell.size() != hidden) {
    throw ShapeError("lstm step: previous state has the wrong size");
  }

  LstmStepCache local;
  LstmStepCache& c = cache != nullptr ? *cache : local;
  c.concat.assign(prev.hidden.begin(), prev.hidden.end());
  c.concat.insert(c.concat.end(), x.begin(), x.end());

  gate_preactivation(params.w_forget, params.b_forget, c.concat, c.forget);
  gate_preactivation(params.w_input, params.b_input, c.concat, c.input);
  gate_preactivation(params.w_candidate, params.b_candidate, c.concat,
                     c.candidate);
  gate_preactivation(params.w_output, params.b_output, c.concat, c.output);
  c.cell_prev = prev.cell;
  c.cell_tanh.resize(hidden);

  LstmState next{std::vector<double>(hidden), std::vector<double>(hidden)};
  for (std::size_t k = 0; k < hidden; ++k) {
    c.forget[k] = sigmoid(c.forget[k]);
    c.input[k] = sigmoid(c.input[k]);
    c.candidate[k] = std::tanh(c.candidate[k]);
    c.output[k] = sigmoid(c.output[k]);
    next.cell[k] = c.forget[k] * prev.cell[k] + c.input[k] * c.candidate[k];
    c.cell_tanh[k] = std::tanh(next.cell[k]);
    next.hidden[k] = c.output[k] * c.cell_tanh[k];
  }
  return next;
}

LstmStepGrads lstm_cell_backward(std::span<const double> grad_hidden,
                                 std::span<const double> grad_cell,
                                 const LstmStepCache& cache,
                                 const LstmParams& params, LstmParams& grads) {
  const std::size_t hidden = params.hidden_size;
  if (grad_hidden.size() != hidden || grad_cell.size() != hidden) {
    throw ShapeError("lstm backward: gradient length mismatch");
  }
  std::vector<double> d_forget(hidden), d_input(hidden), d_candidate(hidden),
      d_output(hidden);
  LstmStepGrads out;
  out.cell_prev.resize(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    const double o = cache.output[k];
    const double tc = cache.cell_tanh[k];
    const double dc = grad_cell[k] + grad_hidden[k] * o * (1.0 - tc * tc);
    const double f = cache.forget[k];
    const double i = cache.input[k];
    const double g = cache.candidate[k];
    d_output[k] = grad_hidden[k] * tc * o * (1.0 - o);
    d_forget[k] = dc * cache.cell_prev[k] * f * (1.0 - f);
    d_input[k] = dc * g * i * (1.0 - i);
    d_candidate[k] = dc * i * (1.0 - g * g);
    out.cell_prev[k] = dc * f;
  }

  std::vector<double> grad_concat(cache.concat.size(), 0.0);
  gate_backward(params.w_forget, d_forget, cache.concat, grads.w_forget,
                grads.b_forget, grad_concat);
  gate_backward(params.w_input, d_input, cache.concat, grads.w_input,
                grads.b_input, grad_concat);
  gate_backward(params.w_candidate, d_candidate, cache.concat,
                grads.w_candidate, grads.b_candidate, grad_concat);
  gate_backward(params.w_output, d_output, cache.concat, grads.w_output,
                grads.b_output, grad_concat);

  out.hidden_prev.assign(grad_concat.begin(), grad_concat.begin() + hidden);
  out.input.assign(grad_concat.begin() + hidden, grad_concat.end());
  return out;
}

LstmLayer::LstmLayer(std::string name, std::size_t input_size,
                     std::size_t hidden_size)
    : name_(std::move(name)),
      value_(input_size, hidden_size),
      grad_(input_size, hidden_size) {}

void LstmLayer::init(Rng& rng) {
  const std::size_t fan_in = value_.hidden_size + value_.input_size;
  for (Tensor* w : {&value_.w_forget, &value_.w_input, &value_.w_candidate,
                    &value_.w_output}) {
    glorot_uniform(*w, fan_in, value_.hidden_size, rng);
  }
  for (Tensor* b : {&value_.b_forget, &value_.b_input, &value_.b_candidate,
                    &value_.b_output}) {
    b->fill(0.0);
  }
}

std::vector<ParamSlot> LstmLayer::params() {
  return {
      {name_ + ".w_forget", &value_.w_forget, &grad_.w_forget},
      {name_ + ".w_input", &value_.w_input, &grad_.w_input},
      {name_ + ".w_candidate", &value_.w_candidate, &grad_.w_candidate},
      {name_ + ".w_output", &value_.w_output, &grad_.w_output},
      {name_ + ".b_forget", &value_.b_forget, &grad_.b_forget},
      {name_ + ".b_input", &value_.b_input, &grad_.b_input},
      {name_ + ".b_candidate", &value_.b_candidate, &grad_.b_candidate},
      {name_ + ".b_output", &value_.b_output, &grad_.b_output},
  };
}

}  // namespace anomaly::nn
