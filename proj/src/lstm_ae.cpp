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

#include "anomaly/lstm_ae.hpp"

#include <algorithm>

#include "anomaly/errors.hpp"
#include "anomaly/nn/serialize.hpp"
#include "anomaly/nn/trainer.hpp"
#include "anomaly/parallel.hpp"

namespace anomaly::lstm {

using nlohmann::json;
using nn::Activation;

namespace {
constexpr std::string_view kArchitecture = "lstm-ae";
}  // namespace

struct LstmAeTrace {
  std::vector<nn::LstmStepCache> encoder_steps;
  std::vector<double> encoder_final_hidden;
  std::vector<double> code;
  std::vector<double> decoder_seed;
  std::vector<nn::LstmStepCache> decoder_steps;
  std::vector<std::vector<double>> decoder_hidden;
  LatentMatrix outputs;
};

std::string_view to_string(ErrorMode mode) {
  return mode == ErrorMode::kWindowMean ? "window_mean" : "anchor_only";
}

ErrorMode error_mode_from_string(std::string_view name) {
  if (name == "window_mean") return ErrorMode::kWindowMean;
  if (name == "anchor_only") return ErrorMode::kAnchorOnly;
  throw ValidationError("unknown error mode '" + std::string(name) +
                        "' (expected window_mean or anchor_only)");
}

// ---------------------------------------------------------------------------
// Config

void LstmAeConfig::validate() const {
  if (latent_dim == 0) throw ValidationError("lstm-ae: latent_dim must be >= 1");
  if (window == 0) throw ValidationError("lstm-ae: window must be >= 1");
  if (stride == 0) throw ValidationError("lstm-ae: stride must be >= 1");
  if (code_dim == 0 || hidden_size == 0) {
    throw ValidationError("lstm-ae: code_dim and hidden_size must be >= 1");
  }
}

json LstmAeConfig::to_json() const {
  return {{"latent_dim", latent_dim}, {"window", window},
          {"code_dim", code_dim},     {"hidden_size", hidden_size},
          {"stride", stride},         {"error_mode", to_string(error_mode)}};
}

LstmAeConfig LstmAeConfig::from_json(const json& doc) {
  LstmAeConfig c;
  c.latent_dim = doc.at("latent_dim").get<std::size_t>();
  c.window = doc.at("window").get<std::size_t>();
  c.code_dim = doc.at("code_dim").get<std::size_t>();
  c.hidden_size = doc.at("hidden_size").get<std::size_t>();
  c.stride = doc.at("stride").get<std::size_t>();
  c.error_mode = error_mode_from_string(doc.at("error_mode").get<std::string>());
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Sequences

std::vector<LatentSequence> make_sequences(const LatentMatrix& latents,
                                           std::size_t window,
                                           std::size_t stride) {
  if (latents.empty()) throw ValidationError("make_sequences: no latents");
  if (window == 0 || stride == 0) {
    throw ValidationError("make_sequences: window and stride must be >= 1");
  }
  const std::size_t dim = latents.front().size();
  for (const auto& v : latents) {
    if (v.size() != dim) throw ShapeError("make_sequences: ragged latents");
  }
  std::vector<LatentSequence> out;
  for (std::size_t anchor = 0; anchor < latents.size(); anchor += stride) {
    LatentSequence seq;
    seq.anchor_index = anchor;
    seq.rows.reserve(window);
    for (std::size_t j = 0; j < window; ++j) {
      const std::size_t back = window - 1 - j;
      seq.rows.push_back(anchor >= back ? anchor - back : 0);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model

LstmAeModel LstmAeModel::zeros(const LstmAeConfig& config) {
  config.validate();
  LstmAeModel m;
  m.config_ = config;
  const std::size_t l = config.latent_dim;
  const std::size_t h = config.hidden_size;
  m.encoder_ = nn::LstmLayer("encoder", l, h);
  m.code_ = nn::DenseLayer("code", h, config.code_dim, Activation::kIdentity);
  m.seed_ = nn::DenseLayer("decoder_seed", config.code_dim, h, Activation::kTanh);
  m.decoder_ = nn::LstmLayer("decoder", l, h);
  m.output_ = nn::DenseLayer("output", h, l, Activation::kSigmoid);
  return m;
}

LstmAeModel LstmAeModel::build(const LstmAeConfig& config, std::uint64_t seed) {
  LstmAeModel m = zeros(config);
  nn::Rng r0 = nn::derive_rng(seed, 0);
  m.encoder_.init(r0);
  nn::Rng r1 = nn::derive_rng(seed, 1);
  m.code_.init(r1);
  nn::Rng r2 = nn::derive_rng(seed, 2);
  m.seed_.init(r2);
  nn::Rng r3 = nn::derive_rng(seed, 3);
  m.decoder_.init(r3);
  nn::Rng r4 = nn::derive_rng(seed, 4);
  m.output_.init(r4);
  return m;
}

void LstmAeModel::check_sequence(const LatentMatrix& latents,
                                 const LatentSequence& seq) const {
  if (seq.rows.size() != config_.window) {
    throw ShapeError("lstm-ae: window of length " +
                     std::to_string(seq.rows.size()) + ", model expects " +
                     std::to_string(config_.window));
  }
  for (std::size_t r : seq.rows) {
    if (r >= latents.size()) throw ShapeError("lstm-ae: window row out of range");
    if (latents[r].size() != config_.latent_dim) {
      throw ShapeError("lstm-ae: latent of length " +
                       std::to_string(latents[r].size()) + ", model expects " +
                       std::to_string(config_.latent_dim));
    }
  }
}

std::vector<double> LstmAeModel::encode(const LatentMatrix& latents,
                                        const LatentSequence& seq) const {
  check_sequence(latents, seq);
  auto state = nn::LstmState::zeros(config_.hidden_size);
  for (std::size_t r : seq.rows) {
    state = nn::lstm_cell_step(latents[r], state, encoder_.value());
  }
  return code_.forward(state.hidden);
}

LatentMatrix LstmAeModel::decode(std::span<const double> code) const {
  if (code.size() != config_.code_dim) {
    throw ShapeError("lstm-ae decode: code length " +
                     std::to_string(code.size()) + ", expected " +
                     std::to_string(config_.code_dim));
  }
  nn::LstmState state{std::vector<double>(config_.hidden_size, 0.0),
                      seed_.forward(code)};
  std::vector<double> input(config_.latent_dim, 0.0);
  LatentMatrix out;
  out.reserve(config_.window);
  for (std::size_t t = 0; t < config_.window; ++t) {
    state = nn::lstm_cell_step(input, state, decoder_.value());
    input = output_.forward(state.hidden);
    out.push_back(input);
  }
  return out;
}

LstmAeTrace LstmAeModel::forward(const LatentMatrix& latents,
                                 const LatentSequence& seq) const {
  check_sequence(latents, seq);
  const std::size_t w = config_.window;
  LstmAeTrace t;
  t.encoder_steps.resize(w);
  auto state = nn::LstmState::zeros(config_.hidden_size);
  for (std::size_t s = 0; s < w; ++s) {
    state = nn::lstm_cell_step(latents[seq.rows[s]], state, encoder_.value(),
                               &t.encoder_steps[s]);
  }
  t.encoder_final_hidden = state.hidden;
  t.code = code_.forward(state.hidden);
  t.decoder_seed = seed_.forward(t.code);

  t.decoder_steps.resize(w);
  state = {std::vector<double>(config_.hidden_size, 0.0), t.decoder_seed};
  std::vector<double> input(config_.latent_dim, 0.0);
  for (std::size_t s = 0; s < w; ++s) {
    state = nn::lstm_cell_step(input, state, decoder_.value(),
                               &t.decoder_steps[s]);
    t.decoder_hidden.push_back(state.hidden);
    input = output_.forward(state.hidden);
    t.outputs.push_back(input);
  }
  return t;
}

double LstmAeModel::window_loss(const LatentMatrix& latents,
                                const LatentSequence& seq) const {
  const LatentMatrix rec = decode(encode(latents, seq));
  double sum = 0.0;
  for (std::size_t s = 0; s < config_.window; ++s) {
    const auto& x = latents[seq.rows[s]];
    for (std::size_t k = 0; k < config_.latent_dim; ++k) {
      const double diff = rec[s][k] - x[k];
      sum += diff * diff;
    }
  }
  return sum / static_cast<double>(config_.window * config_.latent_dim);
}

double LstmAeModel::record_error(const LatentMatrix& latents,
                                 const LatentSequence& seq) const {
  if (config_.error_mode == ErrorMode::kWindowMean) {
    return window_loss(latents, seq);
  }
  const LatentMatrix rec = decode(encode(latents, seq));
  const auto& x = latents[seq.rows.back()];
  double sum = 0.0;
  for (std::size_t k = 0; k < config_.latent_dim; ++k) {
    const double diff = rec.back()[k] - x[k];
    sum += diff * diff;
  }
  return sum / static_cast<double>(config_.latent_dim);
}

double LstmAeModel::accumulate_gradient(const LatentMatrix& latents,
                                        const LatentSequence& seq) {
  const LstmAeTrace t = forward(latents, seq);
  const std::size_t w = config_.window;
  const std::size_t l = config_.latent_dim;
  const std::size_t h = config_.hidden_size;
  const double scale = 2.0 / static_cast<double>(w * l);

  double loss = 0.0;
  // Gradient reaching output s through its use as the next step's input.
  std::vector<double> grad_feedback(l, 0.0);
  std::vector<double> grad_hidden(h, 0.0);
  std::vector<double> grad_cell(h, 0.0);
  for (std::size_t s = w; s-- > 0;) {
    const auto& x = latents[seq.rows[s]];
    std::vector<double> grad_out(l);
    for (std::size_t k = 0; k < l; ++k) {
      const double diff = t.outputs[s][k] - x[k];
      loss += diff * diff;
      grad_out[k] = scale * diff + grad_feedback[k];
    }
    const auto from_output =
        output_.backward(grad_out, t.decoder_hidden[s], t.outputs[s]);
    for (std::size_t k = 0; k < h; ++k) grad_hidden[k] += from_output[k];
    const auto step = nn::lstm_cell_backward(grad_hidden, grad_cell,
                                             t.decoder_steps[s],
                                             decoder_.value(), decoder_.grad());
    grad_hidden = step.hidden_prev;
    grad_cell = step.cell_prev;
    grad_feedback = step.input;  // step 0's input is the constant zero vector
  }
  loss /= static_cast<double>(w * l);

  const auto grad_code = seed_.backward(grad_hidden, t.code, t.decoder_seed);
  grad_hidden = code_.backward(grad_code, t.encoder_final_hidden, t.code);
  std::fill(grad_cell.begin(), grad_cell.end(), 0.0);
  for (std::size_t s = w; s-- > 0;) {
    const auto step = nn::lstm_cell_backward(grad_hidden, grad_cell,
                                             t.encoder_steps[s],
                                             encoder_.value(), encoder_.grad());
    grad_hidden = step.hidden_prev;
    grad_cell = step.cell_prev;
  }
  return loss;
}

std::vector<nn::ParamSlot> LstmAeModel::params() {
  std::vector<nn::ParamSlot> slots = encoder_.params();
  for (auto& s : code_.params()) slots.push_back(s);
  for (auto& s : seed_.params()) slots.push_back(s);
  for (auto& s : decoder_.params()) slots.push_back(s);
  for (auto& s : output_.params()) slots.push_back(s);
  return slots;
}

bool LstmAeModel::all_finite() const {
  auto self = const_cast<LstmAeModel*>(this);
  for (const auto& s : self->params()) {
    if (!s.value->all_finite()) return false;
  }
  return true;
}

json LstmAeModel::to_json() const {
  auto self = const_cast<LstmAeModel*>(this);
  return nn::model_document(kArchitecture, config_.to_json(), self->params());
}

LstmAeModel LstmAeModel::from_json(const json& doc) {
  nn::check_model_tags(doc, kArchitecture);
  LstmAeModel m = zeros(LstmAeConfig::from_json(doc.at("config")));
  nn::load_params(doc, kArchitecture, m.params());
  return m;
}

// ---------------------------------------------------------------------------
// Training and scoring

TrainResult train_lstm_ae(LstmAeModel& model, const LatentMatrix& latents,
                          std::span<const LatentSequence> sequences,
                          const nn::TrainConfig& config) {
  if (sequences.empty()) {
    throw ValidationError("train_lstm_ae: no training sequences");
  }
  TrainResult result;
  result.loss_history = nn::train_minibatch(
      sequences.size(), model.params(),
      [&](std::size_t i) {
        return model.accumulate_gradient(latents, sequences[i]);
      },
      [&](std::size_t i) { return model.window_loss(latents, sequences[i]); },
      config, "lstm-ae");
  return result;
}

std::vector<double> record_errors(const LstmAeModel& model,
                                  const LatentMatrix& latents,
                                  std::size_t threads) {
  const std::size_t stride = model.config().stride;
  const auto sequences = make_sequences(latents, model.config().window, stride);
  std::vector<double> window_errors(sequences.size());
  parallel_for(sequences.size(), threads, [&](std::size_t i) {
    window_errors[i] = model.record_error(latents, sequences[i]);
  });
  std::vector<double> out(latents.size());
  for (std::size_t r = 0; r < latents.size(); ++r) {
    const std::size_t w = std::min((r + stride - 1) / stride, sequences.size() - 1);
    out[r] = window_errors[w];
  }
  return out;
}

}  // namespace anomaly::lstm
