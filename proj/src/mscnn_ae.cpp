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

#include "anomaly/mscnn_ae.hpp"

#include <algorithm>

#include "anomaly/errors.hpp"
#include "anomaly/nn/activation.hpp"
#include "anomaly/nn/serialize.hpp"
#include "anomaly/nn/trainer.hpp"

namespace anomaly::mscnn {

using nlohmann::json;
using nn::Activation;

namespace {

constexpr std::string_view kArchitecture = "mscnn";

// Kernel and padding for the decoder's transposed conv along one axis:
// kernel at least 3, grown if the pooled extent cannot reach `target`.
struct AxisPlan {
  std::size_t kernel;
  std::size_t pad_lo;
  std::size_t pad_hi;
};

AxisPlan plan_upsample(std::size_t pooled, std::size_t stride,
                       std::size_t target) {
  const std::size_t reach = (pooled - 1) * stride;
  const std::size_t kernel = std::max<std::size_t>(3, target > reach ? target - reach : 1);
  const std::size_t total_pad = reach + kernel - target;
  return {kernel, total_pad / 2, total_pad - total_pad / 2};
}

}  // namespace

// ---------------------------------------------------------------------------
// MscnnConfig

void MscnnConfig::validate() const {
  if (rows == 0 || cols == 0) {
    throw ValidationError("mscnn: input extents must be positive");
  }
  if (feature_count == 0 || feature_count > rows * cols) {
    throw ValidationError("mscnn: feature_count must lie in [1, rows*cols]");
  }
  if (filters_per_branch == 0 || latent_dim == 0) {
    throw ValidationError("mscnn: filters_per_branch and latent_dim must be >= 1");
  }
  if (latent_dim >= rows * cols) {
    throw ValidationError("mscnn: latent_dim " + std::to_string(latent_dim) +
                          " must be smaller than the map size " +
                          std::to_string(rows * cols));
  }
  if (pool_window == 0 || pool_stride == 0) {
    throw ValidationError("mscnn: pool window and stride must be >= 1");
  }
  if (pool_window > rows || pool_window > cols) {
    throw ValidationError("mscnn: pool window " + std::to_string(pool_window) +
                          " larger than the " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " input");
  }
}

json MscnnConfig::to_json() const {
  return {{"rows", rows},
          {"cols", cols},
          {"feature_count", feature_count},
          {"filters_per_branch", filters_per_branch},
          {"latent_dim", latent_dim},
          {"pool_window", pool_window},
          {"pool_stride", pool_stride}};
}

MscnnConfig MscnnConfig::from_json(const json& doc) {
  MscnnConfig c;
  c.rows = doc.at("rows").get<std::size_t>();
  c.cols = doc.at("cols").get<std::size_t>();
  c.feature_count = doc.at("feature_count").get<std::size_t>();
  c.filters_per_branch = doc.at("filters_per_branch").get<std::size_t>();
  c.latent_dim = doc.at("latent_dim").get<std::size_t>();
  c.pool_window = doc.at("pool_window").get<std::size_t>();
  c.pool_stride = doc.at("pool_stride").get<std::size_t>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Construction

MscnnModel MscnnModel::build(const MscnnConfig& config, std::uint64_t seed) {
  config.validate();
  MscnnModel m;
  m.config_ = config;
  const std::size_t f = config.filters_per_branch;

  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t kernel = kBranchKernels[k];
    m.branch_specs_[k] = {kernel, kernel, f, 1, 1,
                          nn::Padding::same(kernel, kernel)};
    const std::string name = "branch" + std::to_string(kernel) + "x" +
                             std::to_string(kernel);
    m.branch_weights_[k] = nn::Param(name + ".weight", {f, 1, kernel, kernel});
    m.branch_biases_[k] = nn::Param(name + ".bias", {f});
  }

  const std::size_t merged_channels = 3 * f;
  const std::size_t pr = (config.rows - config.pool_window) / config.pool_stride + 1;
  const std::size_t pc = (config.cols - config.pool_window) / config.pool_stride + 1;
  m.pooled_shape_ = {merged_channels, pr, pc};
  const std::size_t pooled_size = shape_size(m.pooled_shape_);

  m.encoder_ = nn::DenseLayer("encoder", pooled_size, config.latent_dim,
                              Activation::kSigmoid);
  m.decoder_ = nn::DenseLayer("decoder", config.latent_dim, pooled_size,
                              Activation::kRelu);

  const AxisPlan r = plan_upsample(pr, config.pool_stride, config.rows);
  const AxisPlan c = plan_upsample(pc, config.pool_stride, config.cols);
  m.deconv_spec_ = {r.kernel,
                    c.kernel,
                    1,
                    config.pool_stride,
                    config.pool_stride,
                    {r.pad_lo, r.pad_hi, c.pad_lo, c.pad_hi}};
  m.deconv_weight_ =
      nn::Param("deconv.weight", {merged_channels, 1, r.kernel, c.kernel});
  m.deconv_bias_ = nn::Param("deconv.bias", {1});

  for (std::size_t k = 0; k < 3; ++k) {
    nn::Rng rng = nn::derive_rng(seed, k);
    const std::size_t taps = kBranchKernels[k] * kBranchKernels[k];
    nn::glorot_uniform(m.branch_weights_[k].value, taps, f * taps, rng);
  }
  {
    nn::Rng rng = nn::derive_rng(seed, 3);
    m.encoder_.init(rng);
  }
  {
    nn::Rng rng = nn::derive_rng(seed, 4);
    m.decoder_.init(rng);
  }
  {
    nn::Rng rng = nn::derive_rng(seed, 5);
    const std::size_t taps = r.kernel * c.kernel;
    nn::glorot_uniform(m.deconv_weight_.value, merged_channels * taps, taps, rng);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Forward

void MscnnModel::check_map(const ingest::FeatureMap& map) const {
  if (map.grid.rank() != 2 || map.rows() != config_.rows ||
      map.cols() != config_.cols) {
    throw ShapeError("mscnn: map " + shape_string(map.grid.shape()) +
                     " does not match model input " +
                     std::to_string(config_.rows) + "x" +
                     std::to_string(config_.cols));
  }
}

MscnnTrace MscnnModel::forward(const ingest::FeatureMap& map) const {
  check_map(map);
  MscnnTrace t;
  t.input = Tensor({1, config_.rows, config_.cols}, map.grid.data());

  const std::size_t f = config_.filters_per_branch;
  const std::size_t plane = config_.rows * config_.cols;
  t.merged = Tensor({3 * f, config_.rows, config_.cols});
  for (std::size_t k = 0; k < 3; ++k) {
    Tensor out = nn::conv2d_forward(t.input, branch_specs_[k],
                                    branch_weights_[k].value,
                                    branch_biases_[k].value);
    nn::apply_inplace(Activation::kRelu, out.values());
    std::copy(out.data().begin(), out.data().end(),
              t.merged.data().begin() + static_cast<std::ptrdiff_t>(k * f * plane));
    t.branch_outputs[k] = std::move(out);
  }
  t.pooled = nn::max_pool2d(t.merged, config_.pool_window, config_.pool_stride);
  t.latent = encoder_.forward(t.pooled.output.values());
  decode_into(t.latent, t);
  return t;
}

void MscnnModel::decode_into(std::span<const double> latent,
                             MscnnTrace& t) const {
  t.decoded = decoder_.forward(latent);
  const Tensor hidden(pooled_shape_, t.decoded);
  t.reconstruction = nn::transposed_conv2d_forward(
      hidden, deconv_spec_, deconv_weight_.value, deconv_bias_.value);
  nn::apply_inplace(Activation::kSigmoid, t.reconstruction.values());
}

std::vector<double> MscnnModel::encode(const ingest::FeatureMap& map) const {
  check_map(map);
  const Tensor input({1, config_.rows, config_.cols}, map.grid.data());
  const std::size_t f = config_.filters_per_branch;
  const std::size_t plane = config_.rows * config_.cols;
  Tensor merged({3 * f, config_.rows, config_.cols});
  for (std::size_t k = 0; k < 3; ++k) {
    Tensor out = nn::conv2d_forward(input, branch_specs_[k],
                                    branch_weights_[k].value,
                                    branch_biases_[k].value);
    nn::apply_inplace(Activation::kRelu, out.values());
    std::copy(out.data().begin(), out.data().end(),
              merged.data().begin() + static_cast<std::ptrdiff_t>(k * f * plane));
  }
  const auto pooled =
      nn::max_pool2d(merged, config_.pool_window, config_.pool_stride);
  return encoder_.forward(pooled.output.values());
}

Tensor MscnnModel::merged_features(const ingest::FeatureMap& map) const {
  return forward(map).merged;
}

ingest::FeatureMap MscnnModel::decode(std::span<const double> latent) const {
  if (latent.size() != config_.latent_dim) {
    throw ShapeError("mscnn decode: latent length " +
                     std::to_string(latent.size()) + ", expected " +
                     std::to_string(config_.latent_dim));
  }
  MscnnTrace t;
  decode_into(latent, t);
  ingest::FeatureMap map{Tensor({config_.rows, config_.cols},
                                t.reconstruction.data()),
                         config_.rows * config_.cols - config_.feature_count};
  return map;
}

double MscnnModel::reconstruction_error(const ingest::FeatureMap& map) const {
  const MscnnTrace t = forward(map);
  double sum = 0.0;
  for (std::size_t k = 0; k < config_.feature_count; ++k) {
    const double diff = t.reconstruction[k] - map.grid[k];
    sum += diff * diff;
  }
  return sum / static_cast<double>(config_.feature_count);
}

// ---------------------------------------------------------------------------
// Backward

double MscnnModel::accumulate_gradient(const ingest::FeatureMap& map) {
  const MscnnTrace t = forward(map);
  const std::size_t d = config_.feature_count;
  const double inv_d = 1.0 / static_cast<double>(d);

  double loss = 0.0;
  Tensor grad_pre(t.reconstruction.shape());
  for (std::size_t k = 0; k < d; ++k) {
    const double y = t.reconstruction[k];
    const double diff = y - map.grid[k];
    loss += diff * diff;
    grad_pre[k] = 2.0 * diff * inv_d * y * (1.0 - y);
  }
  loss *= inv_d;

  const Tensor hidden(pooled_shape_, t.decoded);
  nn::ConvGrads dg = nn::transposed_conv2d_backward(grad_pre, hidden,
                                                    deconv_spec_,
                                                    deconv_weight_.value);
  for (std::size_t k = 0; k < dg.weights.size(); ++k) {
    deconv_weight_.grad[k] += dg.weights[k];
  }
  deconv_bias_.grad[0] += dg.bias[0];

  const auto grad_latent =
      decoder_.backward(dg.input.values(), t.latent, t.decoded);
  const auto grad_pooled =
      encoder_.backward(grad_latent, t.pooled.output.values(), t.latent);
  const Tensor grad_pooled_t(pooled_shape_, grad_pooled);
  const Tensor grad_merged = nn::max_pool2d_backward(
      grad_pooled_t, t.pooled.argmax, t.merged.shape());

  const std::size_t f = config_.filters_per_branch;
  const std::size_t block = f * config_.rows * config_.cols;
  for (std::size_t k = 0; k < 3; ++k) {
    Tensor upstream({f, config_.rows, config_.cols});
    bool any = false;
    for (std::size_t i = 0; i < block; ++i) {
      const double g = grad_merged[k * block + i];
      if (t.branch_outputs[k][i] > 0.0 && g != 0.0) {
        upstream[i] = g;
        any = true;
      }
    }
    if (!any) continue;
    const nn::ConvGrads cg = nn::conv2d_backward(
        upstream, t.input, branch_specs_[k], branch_weights_[k].value);
    for (std::size_t i = 0; i < cg.weights.size(); ++i) {
      branch_weights_[k].grad[i] += cg.weights[i];
    }
    for (std::size_t i = 0; i < cg.bias.size(); ++i) {
      branch_biases_[k].grad[i] += cg.bias[i];
    }
  }
  return loss;
}

std::vector<nn::ParamSlot> MscnnModel::params() {
  std::vector<nn::ParamSlot> slots;
  for (std::size_t k = 0; k < 3; ++k) {
    slots.push_back(branch_weights_[k].slot());
    slots.push_back(branch_biases_[k].slot());
  }
  for (auto& s : encoder_.params()) slots.push_back(s);
  for (auto& s : decoder_.params()) slots.push_back(s);
  slots.push_back(deconv_weight_.slot());
  slots.push_back(deconv_bias_.slot());
  return slots;
}

bool MscnnModel::all_finite() const {
  auto self = const_cast<MscnnModel*>(this);
  for (const auto& s : self->params()) {
    if (!s.value->all_finite()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Serialization

json MscnnModel::to_json() const {
  auto self = const_cast<MscnnModel*>(this);
  return nn::model_document(kArchitecture, config_.to_json(), self->params());
}

MscnnModel MscnnModel::from_json(const json& doc) {
  nn::check_model_tags(doc, kArchitecture);
  MscnnModel m = build(MscnnConfig::from_json(doc.at("config")), 0);
  nn::load_params(doc, kArchitecture, m.params());
  return m;
}

// ---------------------------------------------------------------------------
// Training

TrainResult train_mscnn(MscnnModel& model,
                        std::span<const ingest::FeatureMap> normal_maps,
                        const nn::TrainConfig& config) {
  if (normal_maps.empty()) {
    throw ValidationError("train_mscnn: no normal training maps");
  }
  TrainResult result;
  result.loss_history = nn::train_minibatch(
      normal_maps.size(), model.params(),
      [&](std::size_t i) { return model.accumulate_gradient(normal_maps[i]); },
      [&](std::size_t i) { return model.reconstruction_error(normal_maps[i]); },
      config, "mscnn-ae");
  return result;
}

}  // namespace anomaly::mscnn
