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

#include "anomaly/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomaly/errors.hpp"
#include "anomaly/log.hpp"

namespace anomaly::nn {

std::vector<double> train_minibatch(std::size_t sample_count,
                                    const std::vector<ParamSlot>& params,
                                    const SampleStep& accumulate,
                                    const SampleStep& evaluate,
                                    const TrainConfig& config,
                                    const std::string& stage) {
  if (sample_count == 0) {
    throw ValidationError(stage + ": empty training set");
  }
  config.validate(sample_count);

  std::vector<double> history;
  double initial = 0.0;
  for (std::size_t i = 0; i < sample_count; ++i) initial += evaluate(i);
  initial /= static_cast<double>(sample_count);
  if (!std::isfinite(initial)) {
    throw DivergenceError(stage + ": non-finite initial loss", 0, 0);
  }
  history.push_back(initial);

  Optimizer optimizer(config);
  std::vector<std::size_t> order(sample_count);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng = derive_rng(config.seed, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < sample_count;
         start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(start + config.batch_size, sample_count);
      zero_grads(params);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) batch_loss += accumulate(order[k]);
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError(stage + ": non-finite loss at epoch " +
                                  std::to_string(epoch) + ", batch " +
                                  std::to_string(batch_index + 1),
                              epoch, batch_index + 1);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (const ParamSlot& p : params) {
        for (double& g : p.grad->values()) g *= scale;
      }
      try {
        optimizer.step(params);
      } catch (const DivergenceError& e) {
        throw DivergenceError(stage + ": " + e.what() + " at epoch " +
                                  std::to_string(epoch) + ", batch " +
                                  std::to_string(batch_index + 1),
                              epoch, batch_index + 1);
      }
      epoch_loss += batch_loss;
    }
    history.push_back(epoch_loss / static_cast<double>(sample_count));
    log::debug("{} epoch {}/{} loss {:.6g}", stage, epoch, config.epochs,
               history.back());
  }
  return history;
}

}  // namespace anomaly::nn
