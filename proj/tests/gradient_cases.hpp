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

// Finite-difference gradient checks shared by the unit tests and the
// acceptance binary. Each case builds a scalar loss, fills the analytic
// gradients, and compares them coordinate by coordinate.
#ifndef ANOMALY_TESTS_GRADIENT_CASES_HPP_
#define ANOMALY_TESTS_GRADIENT_CASES_HPP_

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "anomaly/ingest.hpp"
#include "anomaly/lstm_ae.hpp"
#include "anomaly/mscnn_ae.hpp"
#include "anomaly/nn/conv.hpp"
#include "anomaly/nn/dense.hpp"
#include "anomaly/nn/gradcheck.hpp"
#include "anomaly/nn/lstm.hpp"
#include "anomaly/nn/pool.hpp"
#include "oracles.hpp"

namespace gradcases {

using anomaly::Tensor;
namespace nn = anomaly::nn;

inline constexpr std::size_t kSamples = 150;
inline constexpr double kStep = 1e-6;

struct Case {
  std::string name;
  nn::GradCheckReport report;
  double tolerance;
};

inline Tensor from_vector(const std::vector<double>& v) {
  return Tensor({v.size()}, v);
}

inline nn::GradCheckReport conv(std::size_t k, std::size_t stride,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  nn::ConvSpec spec{k, k, 4, stride, stride, nn::Padding::same(k, k)};
  Tensor x = oracle::random_tensor({3, 6, 5}, rng);
  Tensor w = oracle::random_tensor({4, 3, k, k}, rng);
  Tensor b = oracle::random_tensor({4}, rng);
  const Tensor u =
      oracle::random_tensor(nn::conv2d_forward(x, spec, w, b).shape(), rng);
  nn::ConvGrads g = nn::conv2d_backward(u, x, spec, w);
  const std::vector<nn::ParamSlot> slots = {
      {"x", &x, &g.input}, {"w", &w, &g.weights}, {"b", &b, &g.bias}};
  auto loss = [&] {
    return anomaly::dot(nn::conv2d_forward(x, spec, w, b).values(), u.values());
  };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline nn::GradCheckReport transposed_conv(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  nn::ConvSpec spec{3, 3, 2, 2, 2, {1, 1, 0, 1}};
  Tensor x = oracle::random_tensor({4, 3, 4}, rng);
  Tensor w = oracle::random_tensor({4, 2, 3, 3}, rng);
  Tensor b = oracle::random_tensor({2}, rng);
  const Tensor u = oracle::random_tensor(
      nn::transposed_conv2d_forward(x, spec, w, b).shape(), rng);
  nn::ConvGrads g = nn::transposed_conv2d_backward(u, x, spec, w);
  const std::vector<nn::ParamSlot> slots = {
      {"x", &x, &g.input}, {"w", &w, &g.weights}, {"b", &b, &g.bias}};
  auto loss = [&] {
    return anomaly::dot(nn::transposed_conv2d_forward(x, spec, w, b).values(),
                        u.values());
  };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline nn::GradCheckReport max_pool(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor x = oracle::random_tensor({4, 8, 8}, rng);
  const auto fwd = nn::max_pool2d(x, 2, 2);
  const Tensor u = oracle::random_tensor(fwd.output.shape(), rng);
  Tensor g = nn::max_pool2d_backward(u, fwd.argmax, x.shape());
  const std::vector<nn::ParamSlot> slots = {{"x", &x, &g}};
  auto loss = [&] {
    return anomaly::dot(nn::max_pool2d(x, 2, 2).output.values(), u.values());
  };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline nn::GradCheckReport dense(nn::Activation act, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor x = oracle::random_tensor({12}, rng);
  Tensor w = oracle::random_tensor({10, 12}, rng);
  Tensor b = oracle::random_tensor({10}, rng);
  const Tensor u = oracle::random_tensor({10}, rng);
  const auto y = nn::dense_forward(x.values(), w, b.values(), act);
  nn::DenseGrads g = nn::dense_backward(u.values(), x.values(), y, w, act);
  Tensor gx = from_vector(g.input);
  Tensor gb = from_vector(g.bias);
  const std::vector<nn::ParamSlot> slots = {
      {"x", &x, &gx}, {"w", &w, &g.weights}, {"b", &b, &gb}};
  auto loss = [&] {
    return anomaly::dot(nn::dense_forward(x.values(), w, b.values(), act),
                        u.values());
  };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline nn::GradCheckReport lstm_cell(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t in = 4;
  const std::size_t hid = 5;
  nn::LstmParams p(in, hid);
  std::vector<Tensor*> values = {&p.w_forget, &p.w_input, &p.w_candidate,
                                 &p.w_output, &p.b_forget, &p.b_input,
                                 &p.b_candidate, &p.b_output};
  for (Tensor* t : values) *t = oracle::random_tensor(t->shape(), rng);
  Tensor x = oracle::random_tensor({in}, rng);
  Tensor h0 = oracle::random_tensor({hid}, rng);
  Tensor c0 = oracle::random_tensor({hid}, rng);
  const Tensor u = oracle::random_tensor({hid}, rng);
  const Tensor v = oracle::random_tensor({hid}, rng);

  auto step = [&](nn::LstmStepCache* cache) {
    nn::LstmState prev{c0.data(), h0.data()};
    return nn::lstm_cell_step(x.values(), prev, p, cache);
  };
  nn::LstmStepCache cache;
  step(&cache);
  nn::LstmParams grads(in, hid);
  const nn::LstmStepGrads sg =
      nn::lstm_cell_backward(u.values(), v.values(), cache, p, grads);
  Tensor gx = from_vector(sg.input);
  Tensor gh = from_vector(sg.hidden_prev);
  Tensor gc = from_vector(sg.cell_prev);
  std::vector<Tensor*> grad_tensors = {
      &grads.w_forget, &grads.w_input, &grads.w_candidate, &grads.w_output,
      &grads.b_forget, &grads.b_input, &grads.b_candidate, &grads.b_output};
  std::vector<nn::ParamSlot> slots = {
      {"x", &x, &gx}, {"h_prev", &h0, &gh}, {"c_prev", &c0, &gc}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    slots.push_back({"gate" + std::to_string(i), values[i], grad_tensors[i]});
  }
  auto loss = [&] {
    const nn::LstmState s = step(nullptr);
    return anomaly::dot(s.hidden, u.values()) + anomaly::dot(s.cell, v.values());
  };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline nn::GradCheckReport mscnn_model(std::uint64_t seed) {
  anomaly::mscnn::MscnnConfig cfg;
  cfg.rows = 4;
  cfg.cols = 4;
  cfg.feature_count = 14;
  cfg.filters_per_branch = 3;
  cfg.latent_dim = 5;
  auto model = anomaly::mscnn::MscnnModel::build(cfg, seed);
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> features(cfg.feature_count);
  for (double& f : features) f = u(rng);
  const auto map = anomaly::ingest::to_feature_map(features);
  const auto slots = model.params();
  // Zero-initialised biases put relu exactly at its kink wherever a conv
  // window sees only padding.
  std::uniform_real_distribution<double> b(-0.1, 0.1);
  for (const auto& s : slots) {
    if (s.name.ends_with(".bias")) {
      for (double& v : s.value->data()) v = b(rng);
    }
  }
  nn::zero_grads(slots);
  model.accumulate_gradient(map);
  auto loss = [&] { return model.reconstruction_error(map); };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline nn::GradCheckReport lstm_ae_model(std::uint64_t seed) {
  anomaly::lstm::LstmAeConfig cfg;
  cfg.latent_dim = 4;
  cfg.window = 3;
  cfg.code_dim = 3;
  cfg.hidden_size = 5;
  auto model = anomaly::lstm::LstmAeModel::build(cfg, seed);
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  anomaly::lstm::LatentMatrix latents(6, std::vector<double>(cfg.latent_dim));
  for (auto& row : latents)
    for (double& v : row) v = u(rng);
  const auto seqs = anomaly::lstm::make_sequences(latents, cfg.window, 1);
  const auto& seq = seqs.back();
  const auto slots = model.params();
  nn::zero_grads(slots);
  model.accumulate_gradient(latents, seq);
  auto loss = [&] { return model.window_loss(latents, seq); };
  return nn::check_gradients(slots, loss, kSamples, kStep, rng);
}

inline std::vector<Case> all_cases(std::uint64_t seed) {
  std::vector<Case> cases;
  for (std::size_t k : {1u, 2u, 3u}) {
    cases.push_back({"conv " + std::to_string(k) + "x" + std::to_string(k),
                     conv(k, 1, seed + k), 1e-4});
  }
  cases.push_back({"conv 3x3 stride 2", conv(3, 2, seed + 4), 1e-4});
  cases.push_back({"transposed conv", transposed_conv(seed + 5), 1e-4});
  cases.push_back({"max pool", max_pool(seed + 6), 1e-4});
  cases.push_back({"dense sigmoid", dense(nn::Activation::kSigmoid, seed + 7), 1e-4});
  cases.push_back({"dense tanh", dense(nn::Activation::kTanh, seed + 8), 1e-4});
  cases.push_back({"dense relu", dense(nn::Activation::kRelu, seed + 9), 1e-4});
  cases.push_back({"dense identity", dense(nn::Activation::kIdentity, seed + 10), 1e-4});
  cases.push_back({"lstm cell", lstm_cell(seed + 11), 1e-4});
  cases.push_back({"mscnn-ae", mscnn_model(seed + 12), 1e-3});
  cases.push_back({"lstm-ae", lstm_ae_model(seed + 13), 1e-3});
  return cases;
}

}  // namespace gradcases

#endif  // ANOMALY_TESTS_GRADIENT_CASES_HPP_
