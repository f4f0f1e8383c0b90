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

#include "anomaly/nn/conv.hpp"

#include <string>

#include "anomaly/errors.hpp"

namespace anomaly::nn {
namespace {

void check_rank3(const Tensor& t, const char* what) {
  if (t.rank() != 3) {
    throw ShapeError(std::string(what) + " must be [channels, rows, cols], got " +
                     shape_string(t.shape()));
  }
}

// Both directions share one index walk: for every (out-of-conv position
// (i, j), kernel tap (p, q)) the padded input cell is (i*S + p - top,
// j*S + q - left). `visit` is called only for taps landing inside the input.
template <typename Visit>
void for_each_tap(const ConvSpec& spec, std::size_t in_rows,
                  std::size_t in_cols, std::size_t out_rows,
                  std::size_t out_cols, Visit&& visit) {
  for (std::size_t i = 0; i < out_rows; ++i) {
    for (std::size_t p = 0; p < spec.kernel_rows; ++p) {
      const std::size_t r_padded = i * spec.stride_rows + p;
      if (r_padded < spec.padding.top) continue;
      const std::size_t r = r_padded - spec.padding.top;
      if (r >= in_rows) continue;
      for (std::size_t j = 0; j < out_cols; ++j) {
        for (std::size_t q = 0; q < spec.kernel_cols; ++q) {
          const std::size_t s_padded = j * spec.stride_cols + q;
          if (s_padded < spec.padding.left) continue;
          const std::size_t s = s_padded - spec.padding.left;
          if (s >= in_cols) continue;
          visit(i, j, p, q, r, s);
        }
      }
    }
  }
}

}  // namespace

Padding Padding::same(std::size_t kernel_rows, std::size_t kernel_cols) {
  const std::size_t pr = kernel_rows - 1;
  const std::size_t pc = kernel_cols - 1;
  return {pr / 2, pr - pr / 2, pc / 2, pc - pc / 2};
}

void ConvSpec::validate() const {
  if (kernel_rows == 0 || kernel_cols == 0 || filters == 0 ||
      stride_rows == 0 || stride_cols == 0) {
    throw ValidationError(
        "conv spec: kernel extents, filter count and strides must be >= 1");
  }
}

std::size_t conv_output_extent(std::size_t n, std::size_t kernel,
                               std::size_t stride, std::size_t pad_lo,
                               std::size_t pad_hi) {
  const std::size_t padded = n + pad_lo + pad_hi;
  if (padded < kernel) {
    throw ShapeError("kernel extent " + std::to_string(kernel) +
                     " exceeds padded input extent " + std::to_string(padded));
  }
  return (padded - kernel) / stride + 1;
}

std::size_t transposed_output_extent(std::size_t n, std::size_t kernel,
                                     std::size_t stride, std::size_t pad_lo,
                                     std::size_t pad_hi) {
  const std::size_t full = (n - 1) * stride + kernel;
  if (n == 0 || full <= pad_lo + pad_hi) {
    throw ShapeError("transposed conv output extent is not positive");
  }
  return full - pad_lo - pad_hi;
}

Tensor conv2d_forward(const Tensor& input, const ConvSpec& spec,
                      const Tensor& weights, const Tensor& bias) {
  spec.validate();
  check_rank3(input, "conv input");
  const std::size_t channels = input.extent(0);
  const Shape expected_w{spec.filters, channels, spec.kernel_rows,
                         spec.kernel_cols};
  if (weights.shape() != expected_w) {
    throw ShapeError("conv weights " + shape_string(weights.shape()) +
                     ", expected " + shape_string(expected_w));
  }
  if (bias.size() != spec.filters) throw ShapeError("conv bias length");

  const std::size_t rows = input.extent(1);
  const std::size_t cols = input.extent(2);
  const std::size_t out_rows =
      conv_output_extent(rows, spec.kernel_rows, spec.stride_rows,
                         spec.padding.top, spec.padding.bottom);
  const std::size_t out_cols =
      conv_output_extent(cols, spec.kernel_cols, spec.stride_cols,
                         spec.padding.left, spec.padding.right);

  Tensor out({spec.filters, out_rows, out_cols});
  for (std::size_t f = 0; f < spec.filters; ++f) {
    for (std::size_t i = 0; i < out_rows; ++i) {
      for (std::size_t j = 0; j < out_cols; ++j) out.at(f, i, j) = bias[f];
    }
    for (std::size_t c = 0; c < channels; ++c) {
      for_each_tap(spec, rows, cols, out_rows, out_cols,
                   [&](std::size_t i, std::size_t j, std::size_t p,
                       std::size_t q, std::size_t r, std::size_t s) {
                     out.at(f, i, j) += weights.at(f, c, p, q) * input.at(c, r, s);
                   });
    }
  }
  return out;
}

ConvGrads conv2d_backward(const Tensor& upstream, const Tensor& input,
                          const ConvSpec& spec, const Tensor& weights) {
  spec.validate();
  check_rank3(input, "conv input");
  check_rank3(upstream, "conv upstream gradient");
  const std::size_t channels = input.extent(0);
  const std::size_t rows = input.extent(1);
  const std::size_t cols = input.extent(2);
  const std::size_t out_rows =
      conv_output_extent(rows, spec.kernel_rows, spec.stride_rows,
                         spec.padding.top, spec.padding.bottom);
  const std::size_t out_cols =
      conv_output_extent(cols, spec.kernel_cols, spec.stride_cols,
                         spec.padding.left, spec.padding.right);
  if (upstream.shape() != Shape{spec.filters, out_rows, out_cols}) {
    throw ShapeError("conv backward: upstream " +
                     shape_string(upstream.shape()) +
                     " does not match the forward output");
  }
  if (weights.shape() !=
      Shape{spec.filters, channels, spec.kernel_rows, spec.kernel_cols}) {
    throw ShapeError("conv backward: weight shape mismatch");
  }

  ConvGrads g{Tensor(input.shape()), Tensor(weights.shape()),
              Tensor({spec.filters})};
  for (std::size_t f = 0; f < spec.filters; ++f) {
    double bias_sum = 0.0;
    for (std::size_t i = 0; i < out_rows; ++i) {
      for (std::size_t j = 0; j < out_cols; ++j) bias_sum += upstream.at(f, i, j);
    }
    g.bias[f] = bias_sum;
    for (std::size_t c = 0; c < channels; ++c) {
      for_each_tap(spec, rows, cols, out_rows, out_cols,
                   [&](std::size_t i, std::size_t j, std::size_t p,
                       std::size_t q, std::size_t r, std::size_t s) {
                     const double up = upstream.at(f, i, j);
                     g.input.at(c, r, s) += weights.at(f, c, p, q) * up;
                     g.weights.at(f, c, p, q) += input.at(c, r, s) * up;
                   });
    }
  }
  return g;
}

Tensor transposed_conv2d_forward(const Tensor& input, const ConvSpec& spec,
                                 const Tensor& weights, const Tensor& bias) {
  spec.validate();
  check_rank3(input, "transposed conv input");
  const std::size_t in_channels = input.extent(0);
  const Shape expected_w{in_channels, spec.filters, spec.kernel_rows,
                         spec.kernel_cols};
  if (weights.shape() != expected_w) {
    throw ShapeError("transposed conv weights " +
                     shape_string(weights.shape()) + ", expected " +
                     shape_string(expected_w));
  }
  if (bias.size() != spec.filters) throw ShapeError("transposed conv bias length");

  const std::size_t in_rows = input.extent(1);
  const std::size_t in_cols = input.extent(2);
  const std::size_t rows =
      transposed_output_extent(in_rows, spec.kernel_rows, spec.stride_rows,
                               spec.padding.top, spec.padding.bottom);
  const std::size_t cols =
      transposed_output_extent(in_cols, spec.kernel_cols, spec.stride_cols,
                               spec.padding.left, spec.padding.right);

  Tensor out({spec.filters, rows, cols});
  for (std::size_t c = 0; c < spec.filters; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t s = 0; s < cols; ++s) out.at(c, r, s) = bias[c];
    }
  }
  for (std::size_t f = 0; f < in_channels; ++f) {
    for (std::size_t c = 0; c < spec.filters; ++c) {
      for_each_tap(spec, rows, cols, in_rows, in_cols,
                   [&](std::size_t i, std::size_t j, std::size_t p,
                       std::size_t q, std::size_t r, std::size_t s) {
                     out.at(c, r, s) += weights.at(f, c, p, q) * input.at(f, i, j);
                   });
    }
  }
  return out;
}

ConvGrads transposed_conv2d_backward(const Tensor& upstream,
                                     const Tensor& input, const ConvSpec& spec,
                                     const Tensor& weights) {
  spec.validate();
  check_rank3(input, "transposed conv input");
  check_rank3(upstream, "transposed conv upstream gradient");
  const std::size_t in_channels = input.extent(0);
  const std::size_t in_rows = input.extent(1);
  const std::size_t in_cols = input.extent(2);
  const std::size_t rows =
      transposed_output_extent(in_rows, spec.kernel_rows, spec.stride_rows,
                               spec.padding.top, spec.padding.bottom);
  const std::size_t cols =
      transposed_output_extent(in_cols, spec.kernel_cols, spec.stride_cols,
                               spec.padding.left, spec.padding.right);
  if (upstream.shape() != Shape{spec.filters, rows, cols}) {
    throw ShapeError("transposed conv backward: upstream " +
                     shape_string(upstream.shape()) +
                     " does not match the forward output");
  }
  if (weights.shape() !=
      Shape{in_channels, spec.filters, spec.kernel_rows, spec.kernel_cols}) {
    throw ShapeError("transposed conv backward: weight shape mismatch");
  }

  ConvGrads g{Tensor(input.shape()), Tensor(weights.shape()),
              Tensor({spec.filters})};
  for (std::size_t c = 0; c < spec.filters; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t s = 0; s < cols; ++s) sum += upstream.at(c, r, s);
    }
    g.bias[c] = sum;
  }
  for (std::size_t f = 0; f < in_channels; ++f) {
    for (std::size_t c = 0; c < spec.filters; ++c) {
      for_each_tap(spec, rows, cols, in_rows, in_cols,
                   [&](std::size_t i, std::size_t j, std::size_t p,
                       std::size_t q, std::size_t r, std::size_t s) {
                     const double up = upstream.at(c, r, s);
                     g.input.at(f, i, j) += weights.at(f, c, p, q) * up;
                     g.weights.at(f, c, p, q) += input.at(f, i, j) * up;
                   });
    }
  }
  return g;
}

}  // namespace anomaly::nn
