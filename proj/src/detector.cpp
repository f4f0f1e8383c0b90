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

#include "anomaly/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "anomaly/errors.hpp"
#include "anomaly/log.hpp"
#include "anomaly/parallel.hpp"

namespace anomaly::detector {

using nlohmann::json;

namespace {

// Runs one pipeline stage, tagging any failure with the stage name.
template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(stage + ": " + e.what());
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::vector<ingest::FeatureMap> to_maps(
    std::span<const ingest::FeatureRecord> records) {
  std::vector<ingest::FeatureMap> maps;
  maps.reserve(records.size());
  const std::size_t d = records.empty() ? 0 : records.front().encoded.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].encoded.size() != d || d == 0) {
      throw ShapeError("record " + std::to_string(i + 1) +
                       " has an encoded vector of length " +
                       std::to_string(records[i].encoded.size()) +
                       ", expected " + std::to_string(d));
    }
    maps.push_back(ingest::to_feature_map(records[i].encoded));
  }
  return maps;
}

lstm::LatentMatrix encode_all(const mscnn::MscnnModel& model,
                              std::span<const ingest::FeatureMap> maps,
                              std::size_t threads) {
  lstm::LatentMatrix latents(maps.size());
  parallel_for(maps.size(), threads,
               [&](std::size_t i) { latents[i] = model.encode(maps[i]); });
  return latents;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<std::size_t> sorted_union(std::vector<std::size_t> a,
                                      const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Threshold and stage 1

json Threshold::to_json() const {
  return {{"theta", theta}, {"mu", mu}, {"sigma", sigma}, {"k", k}};
}

Threshold Threshold::from_json(const json& doc) {
  Threshold t;
  t.theta = doc.at("theta").get<double>();
  t.mu = doc.at("mu").get<double>();
  t.sigma = doc.at("sigma").get<double>();
  t.k = doc.at("k").get<double>();
  return t;
}

Threshold compute_threshold(std::span<const double> train_errors, double k) {
  if (train_errors.empty()) {
    throw ValidationError("compute_threshold: no training errors");
  }
  const double n = static_cast<double>(train_errors.size());
  double mean = 0.0;
  for (double e : train_errors) mean += e;
  mean /= n;
  double var = 0.0;
  for (double e : train_errors) var += (e - mean) * (e - mean);
  var /= n;
  const double sigma = std::sqrt(var);
  return {mean + k * sigma, mean, sigma, k};
}

Stage1Partition stage1_classify(std::span<const double> errors,
                                const Threshold& threshold) {
  Stage1Partition p;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    (errors[i] < threshold.theta ? p.normal : p.attack).push_back(i);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Stage 2

std::string_view to_string(FeatureSpace space) {
  switch (space) {
    case FeatureSpace::kErrorAndLatent:
      return "error_and_latent";
    case FeatureSpace::kLatentOnly:
      return "latent_only";
    case FeatureSpace::kErrorOnly:
      return "error_only";
  }
  return "error_and_latent";
}

FeatureSpace feature_space_from_string(std::string_view name) {
  if (name == "error_and_latent") return FeatureSpace::kErrorAndLatent;
  if (name == "latent_only") return FeatureSpace::kLatentOnly;
  if (name == "error_only") return FeatureSpace::kErrorOnly;
  throw ValidationError("unknown stage-2 feature space '" + std::string(name) +
                        "'");
}

iforest::Matrix stage2_features(std::span<const double> errors,
                                const lstm::LatentMatrix& latents,
                                FeatureSpace space) {
  if (space != FeatureSpace::kErrorOnly && latents.size() != errors.size()) {
    throw ShapeError("stage2_features: errors and latents differ in count");
  }
  iforest::Matrix rows(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (space != FeatureSpace::kLatentOnly) rows[i].push_back(errors[i]);
    if (space != FeatureSpace::kErrorOnly) {
      rows[i].insert(rows[i].end(), latents[i].begin(), latents[i].end());
    }
  }
  return rows;
}

Stage2Result stage2_correct(const Stage1Partition& stage1,
                            const iforest::Matrix& features,
                            const Stage2Options& options) {
  options.rule.validate();
  Stage2Result result;
  result.scores.assign(features.size(), std::nullopt);

  // Returns the outliers of `members` as record indices.
  auto search = [&](const std::vector<std::size_t>& members,
                    std::uint64_t seed) {
    std::vector<std::size_t> outliers;
    if (members.size() < 2) return outliers;
    iforest::Matrix rows;
    rows.reserve(members.size());
    for (std::size_t idx : members) rows.push_back(features.at(idx));
    iforest::ForestOptions fo = options.forest;
    fo.seed = seed;
    const auto forest = iforest::fit_forest(rows, fo);
    const auto part =
        iforest::partition_outliers(forest, rows, options.rule, fo.threads);
    for (std::size_t k = 0; k < members.size(); ++k) {
      result.scores[members[k]] = part.scores[k];
    }
    for (std::size_t k : part.outliers) outliers.push_back(members[k]);
    return outliers;
  };

  result.attack_partition_outliers = search(stage1.attack, options.forest.seed);
  result.normal_partition_outliers =
      search(stage1.normal, options.forest.seed + 1);

  std::vector<std::size_t> kept_normal;
  std::set_difference(stage1.normal.begin(), stage1.normal.end(),
                      result.normal_partition_outliers.begin(),
                      result.normal_partition_outliers.end(),
                      std::back_inserter(kept_normal));
  std::vector<std::size_t> kept_attack;
  std::set_difference(stage1.attack.begin(), stage1.attack.end(),
                      result.attack_partition_outliers.begin(),
                      result.attack_partition_outliers.end(),
                      std::back_inserter(kept_attack));
  result.normal = sorted_union(std::move(kept_normal),
                               result.attack_partition_outliers);
  result.attack = sorted_union(std::move(kept_attack),
                               result.normal_partition_outliers);
  return result;
}

// ---------------------------------------------------------------------------
// Pipeline

TrainedPipeline train_pipeline(std::span<const ingest::FeatureRecord> train,
                               const PipelineConfig& config) {
  const auto normal = run_stage("ingest", [&] {
    auto rows = ingest::filter_normal(train);
    if (rows.empty()) {
      throw ValidationError("training data contains no normal records");
    }
    return rows;
  });
  const auto maps = run_stage("ingest", [&] { return to_maps(normal); });
  const std::size_t d = normal.front().encoded.size();
  const auto extents = ingest::feature_map_extents(d);
  log::info("training on {} normal records ({} features, {}x{} map)",
            normal.size(), d, extents.rows, extents.cols);

  mscnn::MscnnConfig mc;
  mc.rows = extents.rows;
  mc.cols = extents.cols;
  mc.feature_count = d;
  mc.filters_per_branch = config.filters_per_branch;
  mc.latent_dim = config.latent_dim;
  mc.pool_window = config.pool_window;
  mc.pool_stride = config.pool_stride;

  auto mscnn_model = run_stage("mscnn-ae", [&] {
    return mscnn::build_mscnn(mc, config.seed);
  });
  const auto mscnn_result = run_stage("mscnn-ae", [&] {
    nn::TrainConfig tc = config.mscnn_train;
    tc.seed = config.seed + 2;
    return mscnn::train_mscnn(mscnn_model, maps, tc);
  });
  const auto latents = run_stage("latent-extraction", [&] {
    return encode_all(mscnn_model, maps, config.threads);
  });

  lstm::LstmAeConfig lc;
  lc.latent_dim = config.latent_dim;
  lc.window = config.window;
  lc.code_dim = config.code_dim;
  lc.hidden_size = config.hidden_size;
  lc.stride = config.stride;
  lc.error_mode = config.error_mode;
  auto lstm_model = run_stage("lstm-ae", [&] {
    return lstm::LstmAeModel::build(lc, config.seed + 1);
  });
  const auto lstm_result = run_stage("lstm-ae", [&] {
    const auto sequences = lstm::make_sequences(latents, lc.window, lc.stride);
    nn::TrainConfig tc = config.lstm_train;
    tc.seed = config.seed + 3;
    return lstm::train_lstm_ae(lstm_model, latents, sequences, tc);
  });

  auto train_errors = run_stage("threshold", [&] {
    return lstm::record_errors(lstm_model, latents, config.threads);
  });
  const auto threshold = run_stage("threshold", [&] {
    return compute_threshold(train_errors, config.threshold_k);
  });
  log::info("threshold theta={:.6g} (mu={:.6g}, sigma={:.6g}, k={})",
            threshold.theta, threshold.mu, threshold.sigma, threshold.k);

  return TrainedPipeline{std::move(mscnn_model),
                         std::move(lstm_model),
                         threshold,
                         mscnn_result.loss_history,
                         lstm_result.loss_history,
                         std::move(train_errors),
                         normal.size()};
}

DetectionResult detect(const TrainedPipeline& trained,
                       std::span<const ingest::FeatureRecord> test,
                       const PipelineConfig& config) {
  DetectionResult result;
  if (test.empty()) return result;
  const auto maps = run_stage("ingest", [&] { return to_maps(test); });
  if (test.front().encoded.size() != trained.mscnn.config().feature_count) {
    throw ValidationError("ingest: test records have " +
                          std::to_string(test.front().encoded.size()) +
                          " features, the model was trained on " +
                          std::to_string(trained.mscnn.config().feature_count));
  }
  result.latents = run_stage("latent-extraction", [&] {
    return encode_all(trained.mscnn, maps, config.threads);
  });
  const auto errors = run_stage("lstm-ae", [&] {
    return lstm::record_errors(trained.lstm, result.latents, config.threads);
  });
  const auto stage1 = stage1_classify(errors, trained.threshold);
  const auto stage2 = run_stage("stage2", [&] {
    Stage2Options opts = config.stage2;
    opts.forest.threads = config.threads;
    opts.forest.seed = config.seed + 4;
    const auto features = stage2_features(errors, result.latents, opts.space);
    return stage2_correct(stage1, features, opts);
  });

  result.verdicts.resize(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    DetectionVerdict& v = result.verdicts[i];
    v.record_index = i;
    v.reconstruction_error = errors[i];
    v.stage1 = errors[i] < trained.threshold.theta ? Label::kNormal
                                                   : Label::kAttack;
    v.stage2 = v.stage1;
    v.iforest_score = stage2.scores[i];
    v.ground_truth = test[i].label;
  }
  for (std::size_t i : stage2.normal_partition_outliers) {
    result.verdicts[i].stage2 = Label::kAttack;
  }
  for (std::size_t i : stage2.attack_partition_outliers) {
    result.verdicts[i].stage2 = Label::kNormal;
  }
  log::info("stage 1: {} normal / {} attack; stage 2 moved {} to attack, {} "
            "to normal",
            stage1.normal.size(), stage1.attack.size(),
            stage2.normal_partition_outliers.size(),
            stage2.attack_partition_outliers.size());
  return result;
}

PipelineRun run_pipeline(std::span<const ingest::FeatureRecord> train,
                         std::span<const ingest::FeatureRecord> test,
                         const PipelineConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  TrainedPipeline trained = train_pipeline(train, config);
  const double train_seconds = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  DetectionResult detection = detect(trained, test, config);
  const double detect_seconds = seconds_since(t1);

  json manifest;
  manifest["seed"] = config.seed;
  manifest["rows"] = {{"train", train.size()},
                      {"train_normal", trained.train_normal_count},
                      {"test", test.size()}};
  manifest["threshold"] = trained.threshold.to_json();
  manifest["timings_seconds"] = {{"train", train_seconds},
                                 {"detect", detect_seconds}};
  return {std::move(trained), std::move(detection), std::move(manifest)};
}

}  // namespace anomaly::detector
