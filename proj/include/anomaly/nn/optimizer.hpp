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

#ifndef ANOMALY_NN_OPTIMIZER_HPP_
#define ANOMALY_NN_OPTIMIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "anomaly/nn/param.hpp"

namespace anomaly::nn {

enum class OptimizerKind { kSgd, kAdam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Throws ValidationError. A batch larger than the training set is an error
  // rather than being clamped.
  void validate(std::size_t training_set_size) const;
};

// Applies SGD or Adam updates to a fixed list of parameter slots. The slot
// list must be the same (same order, same shapes) on every call.
class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& config) : config_(config) {}

  // Throws DivergenceError (epoch and batch left at 0) if any gradient is
  // non-finite; parameters are left untouched in that case.
  void step(const std::vector<ParamSlot>& params);

  std::size_t steps_taken() const { return steps_; }

 private:
  TrainConfig config_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
};

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_OPTIMIZER_HPP_
