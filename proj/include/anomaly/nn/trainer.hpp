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

#ifndef ANOMALY_NN_TRAINER_HPP_
#define ANOMALY_NN_TRAINER_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "anomaly/nn/optimizer.hpp"
#include "anomaly/nn/param.hpp"

namespace anomaly::nn {

// accumulate(i): forward + backward on sample i, adding into the parameter
// grads; returns the sample loss. evaluate(i): forward only.
using SampleStep = std::function<double(std::size_t)>;

// Shuffled minibatch training. history[0] is the mean loss over all samples
// before any update; history[e] for e >= 1 is the mean of the per-sample
// losses seen during epoch e. Batch gradients are averaged over the batch.
// Shuffles draw from derive_rng(config.seed, epoch), so a run is a pure
// function of (config, initial params, data).
//
// Throws DivergenceError naming `stage`, epoch and batch (1-based) when a
// loss or gradient becomes non-finite.
std::vector<double> train_minibatch(std::size_t sample_count,
                                    const std::vector<ParamSlot>& params,
                                    const SampleStep& accumulate,
                                    const SampleStep& evaluate,
                                    const TrainConfig& config,
                                    const std::string& stage);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_TRAINER_HPP_
