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

#ifndef ANOMALY_LSTM_AE_HPP_
#define ANOMALY_LSTM_AE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "anomaly/nn/dense.hpp"
#include "anomaly/nn/lstm.hpp"
#include "anomaly/nn/optimizer.hpp"
#include "json.hpp"

namespace anomaly::lstm {

using LatentMatrix = std::vector<std::vector<double>>;

enum class ErrorMode {
  kWindowMean,  // mean squared error over the whole reconstructed window
  kAnchorOnly,  // error of the window's last element only
};

std::string_view to_string(ErrorMode mode);
ErrorMode error_mode_from_string(std::string_view name);

struct LstmAeConfig {
  std::size_t latent_dim = 0;
  std::size_t window = 8;
  std::size_t code_dim = 16;
  std::size_t hidden_size = 32;
  std::size_t stride = 1;
  ErrorMode error_mode = ErrorMode::kWindowMean;

  void validate() const;
  nlohmann::json to_json() const;
  static LstmAeConfig from_json(const nlohmann::json& doc);
  friend bool operator==(const LstmAeConfig&, const LstmAeConfig&) = default;
};

// One window over dataset order. `rows` are indices into a LatentMatrix, so
// windows share the latents instead of copying them; head windows repeat
// row 0.
struct LatentSequence {
  std::vector<std::size_t> rows;
  std::size_t anchor_index = 0;
};

// Windows anchored at 0, stride, 2*stride, ... < latent count. Each window is
// the `window` rows ending at its anchor, left-padded with row 0.
std::vector<LatentSequence> make_sequences(const LatentMatrix& latents,
                                           std::size_t window,
                                           std::size_t stride);

struct LstmAeTrace;

// Encoder LSTM over the window -> final hidden state -> linear code (r).
// Decoder: tanh(dense(code)) seeds the decoder LSTM's hidden state; each step
// feeds back the previous reconstruction (zeros at the first step) and emits
// sigmoid(dense(h_t)).
class LstmAeModel {
 public:
  static LstmAeModel build(const LstmAeConfig& config, std::uint64_t seed);
  // All parameters zero.
  static LstmAeModel zeros(const LstmAeConfig& config);

  const LstmAeConfig& config() const { return config_; }

  std::vector<double> encode(const LatentMatrix& latents,
                             const LatentSequence& seq) const;
  // W vectors of latent_dim.
  LatentMatrix decode(std::span<const double> code) const;

  // Error attributed to seq.anchor_index under the configured error mode.
  double record_error(const LatentMatrix& latents,
                      const LatentSequence& seq) const;
  // Mean squared error over the whole window (the training objective).
  double window_loss(const LatentMatrix& latents,
                     const LatentSequence& seq) const;
  double accumulate_gradient(const LatentMatrix& latents,
                             const LatentSequence& seq);

  std::vector<nn::ParamSlot> params();
  bool all_finite() const;

  nlohmann::json to_json() const;
  static LstmAeModel from_json(const nlohmann::json& doc);

 private:
  LstmAeModel() = default;
  void check_sequence(const LatentMatrix& latents,
                      const LatentSequence& seq) const;
  LstmAeTrace forward(const LatentMatrix& latents,
                      const LatentSequence& seq) const;

  LstmAeConfig config_;
  nn::LstmLayer encoder_;
  nn::DenseLayer code_;
  nn::DenseLayer seed_;
  nn::LstmLayer decoder_;
  nn::DenseLayer output_;
};

struct TrainResult {
  std::vector<double> loss_history;
};

TrainResult train_lstm_ae(LstmAeModel& model, const LatentMatrix& latents,
                          std::span<const LatentSequence> sequences,
                          const nn::TrainConfig& config);

// One score per latent row. With stride 1 every row anchors its own window;
// with a larger stride a row takes the score of the first window whose anchor
// is at or after it (the last window for trailing rows).
std::vector<double> record_errors(const LstmAeModel& model,
                                  const LatentMatrix& latents,
                                  std::size_t threads = 1);

}  // namespace anomaly::lstm

#endif  // ANOMALY_LSTM_AE_HPP_
