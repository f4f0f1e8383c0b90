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

#ifndef ANOMALY_NN_POOL_HPP_
#define ANOMALY_NN_POOL_HPP_

#include <cstddef>
#include <vector>

#include "anomaly/tensor.hpp"

namespace anomaly::nn {

struct PoolResult {
  Tensor output;
  // Flat index into the input of the cell that won each output cell. Ties go
  // to the first cell in row-major window order.
  std::vector<std::size_t> argmax;
};

// Square window and stride over each channel of a [C, H, W] tensor; no
// padding, floor division for the output extent.
PoolResult max_pool2d(const Tensor& input, std::size_t window,
                      std::size_t stride);

Tensor max_pool2d_backward(const Tensor& upstream,
                           const std::vector<std::size_t>& argmax,
                           const Shape& input_shape);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_POOL_HPP_
