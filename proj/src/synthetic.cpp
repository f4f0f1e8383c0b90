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

#include "anomaly/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "anomaly/errors.hpp"
#include "anomaly/io.hpp"
#include "anomaly/nn/param.hpp"

namespace anomaly::synthetic {

using nlohmann::json;

void GeneratorSpec::validate() const {
  if (feature_count == 0) throw ValidationError("synthetic: feature_count is 0");
  if (factor_count == 0) throw ValidationError("synthetic: factor_count is 0");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ValidationError("synthetic: noise_std must be finite and >= 0");
  }
  if (!std::isfinite(shift)) throw ValidationError("synthetic: shift not finite");
}

json GeneratorSpec::to_json() const {
  return {{"feature_count", feature_count},
          {"factor_count", factor_count},
          {"noise_std", noise_std},
          {"shift", shift},
          {"seed", seed}};
}

GeneratorSpec GeneratorSpec::from_json(const json& doc) {
  GeneratorSpec s;
  s.feature_count = doc.value("feature_count", s.feature_count);
  s.factor_count = doc.value("factor_count", s.factor_count);
  s.noise_std = doc.value("noise_std", s.noise_std);
  s.shift = doc.value("shift", s.shift);
  s.seed = doc.value("seed", s.seed);
  s.validate();
  return s;
}

SyntheticSet generate(const GeneratorSpec& spec, std::size_t count,
                      double anomaly_fraction, std::uint64_t stream) {
  spec.validate();
  if (!(anomaly_fraction >= 0.0 && anomaly_fraction <= 1.0)) {
    throw ValidationError("synthetic: anomaly_fraction must lie in [0, 1]");
  }
  const std::size_t d = spec.feature_count;
  const std::size_t k = spec.factor_count;
  std::normal_distribution<double> gauss(0.0, 1.0);

  nn::Rng mix_rng = nn::derive_rng(spec.seed, 0);
  std::vector<double> mixing(d * k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (double& a : mixing) a = gauss(mix_rng) * scale;

  gauss.reset();
  nn::Rng rng = nn::derive_rng(spec.seed, 1 + stream);
  const auto anomalies = static_cast<std::size_t>(
      std::llround(anomaly_fraction * static_cast<double>(count)));
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < anomalies; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, count - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  SyntheticSet set;
  set.labels.assign(count, ingest::Label::kNormal);
  for (std::size_t i = 0; i < anomalies; ++i) {
    set.labels[order[i]] = ingest::Label::kAttack;
  }
  set.rows.resize(count);
  std::vector<double> z(k);
  for (std::size_t r = 0; r < count; ++r) {
    const bool attack = set.labels[r] == ingest::Label::kAttack;
    for (double& v : z) v = gauss(rng) + (attack ? spec.shift : 0.0);
    auto& row = set.rows[r];
    row.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      double x = 0.0;
      for (std::size_t j = 0; j < k; ++j) x += mixing[i * k + j] * z[j];
      row[i] = x + spec.noise_std * gauss(rng);
    }
  }
  return set;
}

ingest::DatasetSchema schema(const GeneratorSpec& spec) {
  ingest::DatasetSchema s;
  for (std::size_t i = 0; i < spec.feature_count; ++i) {
    s.column_names.push_back("f" + std::to_string(i));
    s.column_kinds.push_back(ingest::ColumnKind::kNumeric);
  }
  s.column_names.push_back("label");
  s.column_kinds.push_back(ingest::ColumnKind::kLabel);
  s.label_mapping = {{"normal", ingest::Label::kNormal},
                     {"attack", ingest::Label::kAttack}};
  s.has_header = true;
  return s;
}

std::vector<ingest::FeatureRecord> to_records(const SyntheticSet& set) {
  std::vector<ingest::FeatureRecord> records(set.rows.size());
  for (std::size_t r = 0; r < set.rows.size(); ++r) {
    for (double v : set.rows[r]) records[r].raw.push_back(io::format_double(v));
    records[r].raw.emplace_back(ingest::to_string(set.labels[r]));
    records[r].label = set.labels[r];
  }
  return records;
}

void write_csv(const std::filesystem::path& path, const SyntheticSet& set) {
  std::ostringstream out;
  const std::size_t d = set.rows.empty() ? 0 : set.rows.front().size();
  for (std::size_t i = 0; i < d; ++i) out << 'f' << i << ',';
  out << "label\n";
  for (std::size_t r = 0; r < set.rows.size(); ++r) {
    for (double v : set.rows[r]) out << io::format_double(v) << ',';
    out << ingest::to_string(set.labels[r]) << '\n';
  }
  io::write_file_atomic(path, out.str());
}

}  // namespace anomaly::synthetic
