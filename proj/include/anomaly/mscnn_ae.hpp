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

#ifndef ANOMALY_MSCNN_AE_HPP_
#define ANOMALY_MSCNN_AE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anomaly/ingest.hpp"
#include "anomaly/nn/conv.hpp"
#include "anomaly/nn/dense.hpp"
#include "anomaly/nn/optimizer.hpp"
#include "anomaly/nn/param.hpp"
#include "anomaly/nn/pool.hpp"
#include "json.hpp"

namespace anomaly::mscnn {

inline constexpr std::array<std::size_t, 3> kBranchKernels = {1, 2, 3};

struct MscnnConfig {
  std::size_t rows = 0;
  std::size_t cols = 0;
  // Real features in the map; the trailing rows * cols - feature_count cells
  // are layout padding and are excluded from the loss.
  std::size_t feature_count = 0;
  std::size_t filters_per_branch = 8;
  std::size_t latent_dim = 32;
  std::size_t pool_window = 2;
  std::size_t pool_stride = 2;

  void validate() const;
  nlohmann::json to_json() const;
  static MscnnConfig from_json(const nlohmann::json& doc);
  friend bool operator==(const MscnnConfig&, const MscnnConfig&) = default;
};

// Intermediate activations of one forward pass, kept for backward.
struct MscnnTrace {
  Tensor input;                          // [1, rows, cols]
  std::array<Tensor, 3> branch_outputs;  // relu outputs, [F, rows, cols]
  Tensor merged;                         // [3F, rows, cols]
  nn::PoolResult pooled;                 // [3F, pr, pc]
  std::vector<double> latent;
  std::vector<double> decoded;  // relu outputs, reshaped to the pooled shape
  Tensor reconstruction;        // sigmoid outputs, [1, rows, cols]
};

// Encoder: three same-padded conv branches (1x1, 2x2, 3x3, relu) ->
// channel concat -> max pool -> dense (sigmoid) latent.
// Decoder: dense (relu) back to the pooled shape -> one transposed conv to a
// single channel at the input extents (sigmoid).
class MscnnModel {
 public:
  static MscnnModel build(const MscnnConfig& config, std::uint64_t seed);

  const MscnnConfig& config() const { return config_; }
  const Shape& pooled_shape() const { return pooled_shape_; }
  const nn::ConvSpec& branch_spec(std::size_t k) const { return branch_specs_[k]; }
  const nn::ConvSpec& decoder_spec() const { return deconv_spec_; }

  std::vector<double> encode(const ingest::FeatureMap& map) const;
  ingest::FeatureMap decode(std::span<const double> latent) const;
  // Channel-concatenated branch activations before pooling.
  Tensor merged_features(const ingest::FeatureMap& map) const;

  // Mean squared error over the real (unpadded) cells.
  double reconstruction_error(const ingest::FeatureMap& map) const;

  MscnnTrace forward(const ingest::FeatureMap& map) const;
  // Adds d(loss)/d(params) into the parameter gradients; returns the loss.
  double accumulate_gradient(const ingest::FeatureMap& map);

  std::vector<nn::ParamSlot> params();
  bool all_finite() const;

  nlohmann::json to_json() const;
  static MscnnModel from_json(const nlohmann::json& doc);

 private:
  MscnnModel() = default;
  void check_map(const ingest::FeatureMap& map) const;
  void decode_into(std::span<const double> latent, MscnnTrace& trace) const;

  MscnnConfig config_;
  std::array<nn::ConvSpec, 3> branch_specs_;
  std::array<nn::Param, 3> branch_weights_;
  std::array<nn::Param, 3> branch_biases_;
  Shape pooled_shape_;
  nn::DenseLayer encoder_;
  nn::DenseLayer decoder_;
  nn::ConvSpec deconv_spec_;
  nn::Param deconv_weight_;
  nn::Param deconv_bias_;
};

inline MscnnModel build_mscnn(const MscnnConfig& config, std::uint64_t seed) {
  return MscnnModel::build(config, seed);
}

struct TrainResult {
  std::vector<double> loss_history;
};

// Trains in place on normal-traffic maps. See nn::train_minibatch for the
// history layout.
TrainResult train_mscnn(MscnnModel& model,
                        std::span<const ingest::FeatureMap> normal_maps,
                        const nn::TrainConfig& config);

}  // namespace anomaly::mscnn

#endif  // ANOMALY_MSCNN_AE_HPP_
