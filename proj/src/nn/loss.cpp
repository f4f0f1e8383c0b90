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

#include "anomaly/nn/loss.hpp"

#include "anomaly/errors.hpp"

namespace anomaly::nn {

double reconstruction_error(std::span<const double> x,
                            std::span<const double> reconstruction) {
  if (x.size() != reconstruction.size()) {
    throw ShapeError("reconstruction error: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - reconstruction[j];
    sum += diff * diff;
  }
  return sum;
}

double mean_squared_error(std::span<const double> x,
                          std::span<const double> reconstruction) {
  if (x.empty()) throw ShapeError("mean squared error of empty vectors");
  return reconstruction_error(x, reconstruction) /
         static_cast<double>(x.size());
}

std::vector<double> mean_squared_error_gradient(
    std::span<const double> x, std::span<const double> reconstruction,
    double scale) {
  if (x.size() != reconstruction.size() || x.empty()) {
    throw ShapeError("mean squared error gradient: length mismatch");
  }
  const double factor = 2.0 * scale / static_cast<double>(x.size());
  std::vector<double> grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    grad[j] = factor * (reconstruction[j] - x[j]);
  }
  return grad;
}

}  // namespace anomaly::nn
