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

#ifndef ANOMALY_CONFIG_HPP_
#define ANOMALY_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "anomaly/detector.hpp"
#include "anomaly/synthetic.hpp"
#include "json.hpp"

namespace anomaly::config {

// Relative paths are resolved against the directory of the config file.
struct DatasetPaths {
  std::filesystem::path schema;
  std::filesystem::path train;
  std::filesystem::path test;
  // 0 keeps every training row; otherwise only the first N rows are used.
  std::size_t max_train_records = 0;
};

// Parameters for the `synth` command, which writes the dataset files above.
struct SyntheticSection {
  synthetic::GeneratorSpec generator;
  std::size_t train_count = 2000;
  std::size_t test_count = 1000;
  double train_anomaly_fraction = 0.0;
  double test_anomaly_fraction = 0.2;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::filesystem::path output_dir;
  DatasetPaths dataset;
  std::optional<SyntheticSection> synthetic;
  detector::PipelineConfig pipeline;  // seed and threads mirrored here

  // Checks every field that does not depend on the data. Throws
  // ValidationError.
  void validate() const;

  // Every semantically meaningful field with defaults filled in. Paths are
  // written as given, output_dir and threads are left out.
  nlohmann::json canonical_json() const;
  // SHA-256 of canonical_json().dump().
  std::string hash() const;
};

// Parses a config document. Unknown keys are rejected and `seed` is
// mandatory unless `seed_override` is set. `base_dir` anchors relative paths.
RunConfig from_json(const nlohmann::json& doc,
                    const std::filesystem::path& base_dir,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

RunConfig load(const std::filesystem::path& path,
               std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace anomaly::config

#endif  // ANOMALY_CONFIG_HPP_
