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

#include "anomaly/nn/pool.hpp"

#include "anomaly/errors.hpp"

namespace anomaly::nn {

PoolResult max_pool2d(const Tensor& input, std::size_t window,
                      std::size_t stride) {
  if (input.rank() != 3) throw ShapeError("max_pool2d expects [C, H, W]");
  if (window == 0 || stride == 0) {
    throw ValidationError("pool window and stride must be >= 1");
  }
  const std::size_t channels = input.extent(0);
  const std::size_t rows = input.extent(1);
  const std::size_t cols = input.extent(2);
  if (window > rows || window > cols) {
    throw ShapeError("pool window " + std::to_string(window) +
                     " larger than input " + shape_string(input.shape()));
  }
  const std::size_t out_rows = (rows - window) / stride + 1;
  const std::size_t out_cols = (cols - window) / stride + 1;

  PoolResult result{Tensor({channels, out_rows, out_cols}), {}};
  result.argmax.resize(result.output.size());
  std::size_t o = 0;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < out_rows; ++i) {
      for (std::size_t j = 0; j < out_cols; ++j, ++o) {
        std::size_t best = (c * rows + i * stride) * cols + j * stride;
        for (std::size_t p = 0; p < window; ++p) {
          for (std::size_t q = 0; q < window; ++q) {
            const std::size_t idx =
                (c * rows + i * stride + p) * cols + j * stride + q;
            if (input[idx] > input[best]) best = idx;
          }
        }
        result.output[o] = input[best];
        result.argmax[o] = best;
      }
    }
  }
  return result;
}

Tensor max_pool2d_backward(const Tensor& upstream,
                           const std::vector<std::size_t>& argmax,
                           const Shape& input_shape) {
  if (upstream.size() != argmax.size()) {
    throw ShapeError("max_pool2d_backward: upstream does not match argmax");
  }
  Tensor grad(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) {
    if (argmax[o] >= grad.size()) {
      throw ShapeError("max_pool2d_backward: argmax outside input");
    }
    grad[argmax[o]] += upstream[o];
  }
  return grad;
}

}  // namespace anomaly::nn
