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

#ifndef ANOMALY_NN_ACTIVATION_HPP_
#define ANOMALY_NN_ACTIVATION_HPP_

#include <span>
#include <string>
#include <string_view>

namespace anomaly::nn {

enum class Activation { kIdentity, kSigmoid, kTanh, kRelu };

double sigmoid(double x);
double apply(Activation act, double x);

// Derivative expressed through the activation's output y = act(x). Every
// supported activation admits this form, so backward passes only need the
// cached outputs.
double derivative_from_output(Activation act, double y);

void apply_inplace(Activation act, std::span<double> values);

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view name);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_ACTIVATION_HPP_
