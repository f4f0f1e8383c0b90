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

#ifndef ANOMALY_NN_GRADCHECK_HPP_
#define ANOMALY_NN_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "anomaly/nn/param.hpp"

namespace anomaly::nn {

using ScalarFunction = std::function<double(std::span<const double>)>;

// Central differences (f(p + h e_k) - f(p - h e_k)) / 2h for every k.
std::vector<double> finite_difference_gradient(const ScalarFunction& f,
                                               std::span<const double> params,
                                               double step);

// |a - n| / max(|a|, |n|, floor). The floor keeps coordinates whose true
// gradient is ~0 from reporting huge relative errors out of rounding noise.
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct GradCheckReport {
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
};

// Compares an analytic gradient against central differences at `samples`
// random coordinates drawn across all slots (every coordinate if there are
// fewer). `loss` re-evaluates the objective with the current slot values;
// slot values are restored afterwards. Analytic gradients are read from the
// slots' grad tensors, which the caller must have filled beforehand.
GradCheckReport check_gradients(const std::vector<ParamSlot>& slots,
                                const std::function<double()>& loss,
                                std::size_t samples, double step, Rng& rng);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_GRADCHECK_HPP_
