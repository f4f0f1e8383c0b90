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

#include "anomaly/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "anomaly/errors.hpp"

namespace anomaly::nn {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ValidationError("unknown optimizer '" + std::string(name) +
                        "' (expected sgd or adam)");
}

void TrainConfig::validate(std::size_t training_set_size) const {
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw ValidationError("learning_rate must be finite and >= 0");
  }
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (training_set_size > 0 && batch_size > training_set_size) {
    throw ValidationError("batch_size " + std::to_string(batch_size) +
                          " exceeds training set size " +
                          std::to_string(training_set_size));
  }
  if (optimizer == OptimizerKind::kAdam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ValidationError("adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ValidationError("adam epsilon must be > 0");
  }
}

void Optimizer::step(const std::vector<ParamSlot>& params) {
  for (const ParamSlot& p : params) {
    if (!p.grad->all_finite()) {
      throw DivergenceError("non-finite gradient in " + p.name, 0, 0);
    }
  }
  ++steps_;
  const double lr = config_.learning_rate;

  if (config_.optimizer == OptimizerKind::kSgd) {
    for (const ParamSlot& p : params) {
      auto value = p.value->values();
      auto grad = p.grad->values();
      for (std::size_t k = 0; k < value.size(); ++k) value[k] -= lr * grad[k];
    }
    return;
  }

  if (first_moment_.empty()) {
    for (const ParamSlot& p : params) {
      first_moment_.emplace_back(p.value->size(), 0.0);
      second_moment_.emplace_back(p.value->size(), 0.0);
    }
  }
  if (first_moment_.size() != params.size()) {
    throw ShapeError("optimizer: parameter list changed between steps");
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);
  for (std::size_t s = 0; s < params.size(); ++s) {
    auto value = params[s].value->values();
    auto grad = params[s].grad->values();
    auto& m = first_moment_[s];
    auto& v = second_moment_[s];
    if (m.size() != value.size()) {
      throw ShapeError("optimizer: parameter " + params[s].name +
                       " changed size between steps");
    }
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      value[k] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace anomaly::nn
