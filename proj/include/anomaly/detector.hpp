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

#ifndef ANOMALY_DETECTOR_HPP_
#define ANOMALY_DETECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "anomaly/iforest.hpp"
#include "anomaly/ingest.hpp"
#include "anomaly/lstm_ae.hpp"
#include "anomaly/mscnn_ae.hpp"
#include "anomaly/nn/optimizer.hpp"
#include "anomaly/verdict.hpp"
#include "json.hpp"

namespace anomaly::detector {

// theta = mu + k * sigma over the reconstruction errors of normal training
// records (population standard deviation).
struct Threshold {
  double theta = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double k = 2.0;

  nlohmann::json to_json() const;
  static Threshold from_json(const nlohmann::json& doc);
};

Threshold compute_threshold(std::span<const double> train_errors, double k = 2.0);

struct Stage1Partition {
  std::vector<std::size_t> normal;  // error < theta
  std::vector<std::size_t> attack;  // error >= theta (ties count as attack)
};

Stage1Partition stage1_classify(std::span<const double> errors,
                                const Threshold& threshold);

// What the stage-2 forests see for each record.
enum class FeatureSpace { kErrorAndLatent, kLatentOnly, kErrorOnly };

std::string_view to_string(FeatureSpace space);
FeatureSpace feature_space_from_string(std::string_view name);

iforest::Matrix stage2_features(std::span<const double> errors,
                                const lstm::LatentMatrix& latents,
                                FeatureSpace space);

struct Stage2Options {
  iforest::ForestOptions forest;
  iforest::OutlierRule rule = iforest::OutlierRule::by_contamination(0.05);
  FeatureSpace space = FeatureSpace::kErrorAndLatent;
};

struct Stage2Result {
  std::vector<std::size_t> normal;  // (Y'_p \ O_p) u O_q, ascending
  std::vector<std::size_t> attack;  // (Y'_q \ O_q) u O_p, ascending
  std::vector<std::size_t> normal_partition_outliers;  // O_p, relabeled attack
  std::vector<std::size_t> attack_partition_outliers;  // O_q, relabeled normal
  std::vector<std::optional<double>> scores;           // per record
};

// Forest 1 is fit on the stage-1 attack partition and its outliers become
// normal; forest 2 is fit on the stage-1 normal partition and its outliers
// become attack. Partitions with fewer than 2 rows pass through unchanged.
// `features` holds one row per record, indexed like the partitions.
Stage2Result stage2_correct(const Stage1Partition& stage1,
                            const iforest::Matrix& features,
                            const Stage2Options& options);

struct PipelineConfig {
  std::size_t filters_per_branch = 8;
  std::size_t latent_dim = 32;
  std::size_t pool_window = 2;
  std::size_t pool_stride = 2;
  nn::TrainConfig mscnn_train;

  std::size_t window = 8;
  std::size_t code_dim = 16;
  std::size_t hidden_size = 32;
  std::size_t stride = 1;
  lstm::ErrorMode error_mode = lstm::ErrorMode::kWindowMean;
  nn::TrainConfig lstm_train;

  double threshold_k = 2.0;
  Stage2Options stage2;

  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct TrainedPipeline {
  mscnn::MscnnModel mscnn;
  lstm::LstmAeModel lstm;
  Threshold threshold;
  std::vector<double> mscnn_loss_history;
  std::vector<double> lstm_loss_history;
  std::vector<double> train_errors;
  std::size_t train_normal_count = 0;
};

// MSCNN-AE and LSTM-AE are fit on the normal training records only; the
// threshold comes from the LSTM-AE errors on those same records.
TrainedPipeline train_pipeline(std::span<const ingest::FeatureRecord> train,
                               const PipelineConfig& config);

struct DetectionResult {
  std::vector<DetectionVerdict> verdicts;
  lstm::LatentMatrix latents;
};

DetectionResult detect(const TrainedPipeline& trained,
                       std::span<const ingest::FeatureRecord> test,
                       const PipelineConfig& config);

struct PipelineRun {
  TrainedPipeline trained;
  DetectionResult detection;
  nlohmann::json manifest;
};

// train_pipeline then detect; the manifest records seed, row counts, the
// threshold and per-stage wall-clock seconds.
PipelineRun run_pipeline(std::span<const ingest::FeatureRecord> train,
                         std::span<const ingest::FeatureRecord> test,
                         const PipelineConfig& config);

}  // namespace anomaly::detector

#endif  // ANOMALY_DETECTOR_HPP_
