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

#ifndef ANOMALY_NN_DENSE_HPP_
#define ANOMALY_NN_DENSE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anomaly/nn/activation.hpp"
#include "anomaly/nn/param.hpp"
#include "anomaly/tensor.hpp"

namespace anomaly::nn {

// act(W x + b) with W of shape [out, in].
std::vector<double> dense_forward(std::span<const double> input,
                                  const Tensor& weights,
                                  std::span<const double> bias,
                                  Activation act);

struct DenseGrads {
  std::vector<double> input;
  Tensor weights;
  std::vector<double> bias;
};

// `output` is the value dense_forward returned for `input`.
DenseGrads dense_backward(std::span<const double> upstream,
                          std::span<const double> input,
                          std::span<const double> output,
                          const Tensor& weights, Activation act);

// Fully connected layer that owns its parameters. backward() accumulates into
// the parameter gradients and returns the gradient w.r.t. the input.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::string name, std::size_t in, std::size_t out,
             Activation act);

  std::size_t in_size() const { return weight_.value.extent(1); }
  std::size_t out_size() const { return weight_.value.extent(0); }
  Activation activation() const { return act_; }

  void init(Rng& rng);
  std::vector<double> forward(std::span<const double> input) const;
  std::vector<double> backward(std::span<const double> upstream,
                               std::span<const double> input,
                               std::span<const double> output);

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  const Param& weight() const { return weight_; }
  const Param& bias() const { return bias_; }
  std::vector<ParamSlot> params() { return {weight_.slot(), bias_.slot()}; }

 private:
  Param weight_;
  Param bias_;
  Activation act_ = Activation::kIdentity;
};

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_DENSE_HPP_
