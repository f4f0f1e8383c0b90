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

#ifndef ANOMALY_NN_LSTM_HPP_
#define ANOMALY_NN_LSTM_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anomaly/nn/param.hpp"
#include "anomaly/tensor.hpp"

namespace anomaly::nn {

// Gate weights act on the concatenation [h_{t-1}, x_t]: each matrix is
// [hidden, hidden + input], each bias [hidden].
struct LstmParams {
  LstmParams() = default;
  LstmParams(std::size_t input_size, std::size_t hidden_size);

  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor w_forget, w_input, w_candidate, w_output;
  Tensor b_forget, b_input, b_candidate, b_output;

  void validate() const;
  void fill(double value);
};

struct LstmState {
  std::vector<double> cell;
  std::vector<double> hidden;

  static LstmState zeros(std::size_t hidden_size) {
    return {std::vector<double>(hidden_size, 0.0),
            std::vector<double>(hidden_size, 0.0)};
  }
};

// Everything a backward step needs from its forward step.
struct LstmStepCache {
  std::vector<double> concat;
  std::vector<double> forget, input, candidate, output;
  std::vector<double> cell_prev;
  std::vector<double> cell_tanh;
};

LstmState lstm_cell_step(std::span<const double> x, const LstmState& prev,
                         const LstmParams& params,
                         LstmStepCache* cache = nullptr);

struct LstmStepGrads {
  std::vector<double> input;
  std::vector<double> hidden_prev;
  std::vector<double> cell_prev;
};

// Backpropagates one step. `grad_hidden` and `grad_cell` are the gradients
// arriving at h_t and C_t; parameter gradients are accumulated into `grads`.
LstmStepGrads lstm_cell_backward(std::span<const double> grad_hidden,
                                 std::span<const double> grad_cell,
                                 const LstmStepCache& cache,
                                 const LstmParams& params, LstmParams& grads);

// Owns an LstmParams pair (values and gradients) and exposes them to the
// optimizer.
class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(std::string name, std::size_t input_size, std::size_t hidden_size);

  void init(Rng& rng);
  std::size_t input_size() const { return value_.input_size; }
  std::size_t hidden_size() const { return value_.hidden_size; }

  LstmParams& value() { return value_; }
  const LstmParams& value() const { return value_; }
  LstmParams& grad() { return grad_; }
  std::vector<ParamSlot> params();

 private:
  std::string name_;
  LstmParams value_;
  LstmParams grad_;
};

}  // namespace anomaly::nn

#endif  // ANOMALY_NN_LSTM_HPP_
