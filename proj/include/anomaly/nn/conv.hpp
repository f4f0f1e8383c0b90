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

#ifndef ANOMALY_NN_CONV_HPP_
#define ANOMALY_NN_CONV_HPP_

#include <cstddef>

#include "anomaly/tensor.hpp"

namespace anomaly::nn {

// Zero padding per border. Symmetric padding P sets all four to P; even
// kernels under "same" padding need one extra row/column at bottom/right.
struct Padding {
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;

  static Padding symmetric(std::size_t p) { return {p, p, p, p}; }
  // Keeps extents unchanged at stride 1.
  static Padding same(std::size_t kernel_rows, std::size_t kernel_cols);

  friend bool operator==(const Padding&, const Padding&) = default;
};

struct ConvSpec {
  std::size_t kernel_rows = 1;
  std::size_t kernel_cols = 1;
  // Output channels of the forward map (conv: filter count; transposed conv:
  // channels of the upsampled result).
  std::size_t filters = 1;
  std::size_t stride_rows = 1;
  std::size_t stride_cols = 1;
  Padding padding;

  void validate() const;
  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

// (n + pad_lo + pad_hi - kernel) / stride + 1 with floor division. Throws
// ShapeError if the kernel does not fit the padded input.
std::size_t conv_output_extent(std::size_t n, std::size_t kernel,
                               std::size_t stride, std::size_t pad_lo,
                               std::size_t pad_hi);

// (n - 1) * stride + kernel - pad_lo - pad_hi. Throws ShapeError when the
// result is not positive.
std::size_t transposed_output_extent(std::size_t n, std::size_t kernel,
                                     std::size_t stride, std::size_t pad_lo,
                                     std::size_t pad_hi);

// input [C, H, W], weights [F, C, a, b], bias [F] -> [F, Yh, Yw].
Tensor conv2d_forward(const Tensor& input, const ConvSpec& spec,
                      const Tensor& weights, const Tensor& bias);

struct ConvGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

ConvGrads conv2d_backward(const Tensor& upstream, const Tensor& input,
                          const ConvSpec& spec, const Tensor& weights);

// Adjoint of conv2d_forward for the same weight tensor: input [F, Yh, Yw],
// weights [F, C, a, b], bias [C] -> [C, H, W]. spec.filters is C.
Tensor transposed_conv2d_forward(const Tensor& input, const ConvSpec& spec,
                                 const Tensor& weights, const Tensor& bias);

ConvGrads transposed_conv2d_backward(const Tensor& upstream,
                                     const Tensor& input, const ConvSpec& spec,
                                     const Tensor& weights);

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_CONV_HPP_
