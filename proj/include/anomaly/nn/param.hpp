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

#ifndef ANOMALY_NN_PARAM_HPP_
#define ANOMALY_NN_PARAM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "anomaly/tensor.hpp"

namespace anomaly::nn {

using Rng = std::mt19937_64;

// Non-owning handle the optimizer and serializers walk over.
struct ParamSlot {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

// A trainable tensor together with its accumulated gradient.
struct Param {
  Param() = default;
  Param(std::string param_name, Shape shape)
      : name(std::move(param_name)), value(shape), grad(shape) {}

  void zero_grad() { grad.fill(0.0); }
  ParamSlot slot() { return {name, &value, &grad}; }

  std::string name;
  Tensor value;
  Tensor grad;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor& tensor, std::size_t fan_in, std::size_t fan_out,
                    Rng& rng);

// Derives an independent generator for substream `stream` of `seed`.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

void zero_grads(const std::vector<ParamSlot>& params);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_PARAM_HPP_
