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

#ifndef ANOMALY_NN_LOSS_HPP_
#define ANOMALY_NN_LOSS_HPP_

#include <span>
#include <vector>

namespace anomaly::nn {

// Sum of squared differences between an input and its reconstruction.
double reconstruction_error(std::span<const double> x,
                            std::span<const double> reconstruction);

// reconstruction_error / length. Used for reported per-record scores and as
// the training objective so neither depends on the feature count.
double mean_squared_error(std::span<const double> x,
                          std::span<const double> reconstruction);

// d(mean_squared_error)/d(reconstruction), optionally scaled.
std::vector<double> mean_squared_error_gradient(
    std::span<const double> x, std::span<const double> reconstruction,
    double scale = 1.0);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_LOSS_HPP_
