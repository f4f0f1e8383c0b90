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

#ifndef ANOMALY_SYNTHETIC_HPP_
#define ANOMALY_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "anomaly/ingest.hpp"
#include "json.hpp"

namespace anomaly::synthetic {

// Correlated Gaussian records: x = A z + noise with z ~ N(0, I_k) and a fixed
// mixing matrix A drawn from `seed`. Anomalies draw z from N(shift * 1, I_k),
// which moves the feature mean by A * shift * 1.
struct GeneratorSpec {
  std::size_t feature_count = 16;
  std::size_t factor_count = 4;
  double noise_std = 0.2;
  double shift = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& doc);
};

struct SyntheticSet {
  std::vector<std::vector<double>> rows;
  std::vector<ingest::Label> labels;
};

// `stream` separates draws that share one mixing matrix (train vs test).
// Exactly round(anomaly_fraction * count) rows are anomalies, at positions
// chosen uniformly at random.
SyntheticSet generate(const GeneratorSpec& spec, std::size_t count,
                      double anomaly_fraction, std::uint64_t stream);

// Numeric columns f0..f{d-1} plus a "label" column with normal/attack text.
ingest::DatasetSchema schema(const GeneratorSpec& spec);

// Same rows as raw string records, ready for encoding.
std::vector<ingest::FeatureRecord> to_records(const SyntheticSet& set);

void write_csv(const std::filesystem::path& path, const SyntheticSet& set);

}  // namespace anomaly::synthetic

#endif  // ANOMALY_SYNTHETIC_HPP_
