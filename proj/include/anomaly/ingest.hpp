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

#ifndef ANOMALY_INGEST_HPP_
#define ANOMALY_INGEST_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly/tensor.hpp"
#include "json.hpp"

namespace anomaly::ingest {

enum class ColumnKind { kNumeric, kCategorical, kLabel, kIgnore };
enum class Label { kNormal, kAttack };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Label label);
Label label_from_string(std::string_view text);

// Column roster of one dataset. Label text not present in `label_mapping`
// falls back to `default_label` when set, and is an error otherwise.
struct DatasetSchema {
  std::vector<std::string> column_names;
  std::vector<ColumnKind> column_kinds;
  std::map<std::string, Label> label_mapping;
  std::optional<Label> default_label;
  bool has_header = true;

  void validate() const;
  std::size_t width() const { return column_names.size(); }
  // Number of numeric plus categorical columns.
  std::size_t feature_count() const;
  std::optional<std::size_t> label_column() const;
  std::optional<Label> map_label(std::string_view text) const;

  static DatasetSchema from_json(const nlohmann::json& doc);
  static DatasetSchema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct FeatureRecord {
  std::vector<std::string> raw;
  std::vector<double> encoded;
  std::optional<Label> label;
};

// Reads a comma-separated file. Rows are validated against the schema width;
// errors carry the 1-based data row index.
std::vector<FeatureRecord> load_csv(const std::filesystem::path& path,
                                    const DatasetSchema& schema);

// Ordinal codes per categorical column, 1..k in lexicographic order of the
// training values. Code 0 is reserved for values never seen during fit.
class CategoricalEncoder {
 public:
  static constexpr int kUnseenCode = 0;

  int code(std::size_t column, std::string_view value) const;
  const std::map<std::size_t, std::map<std::string, int, std::less<>>>&
  columns() const {
    return codes_;
  }

  nlohmann::json to_json(const DatasetSchema& schema) const;
  static CategoricalEncoder from_json(const nlohmann::json& doc,
                                      const DatasetSchema& schema);

  friend CategoricalEncoder fit_categorical(
      std::span<const FeatureRecord> records, const DatasetSchema& schema);
  friend bool operator==(const CategoricalEncoder&,
                         const CategoricalEncoder&) = default;

 private:
  std::map<std::size_t, std::map<std::string, int, std::less<>>> codes_;
};

CategoricalEncoder fit_categorical(std::span<const FeatureRecord> records,
                                   const DatasetSchema& schema);

// Per-feature bounds fitted on training data only.
struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;

  // (x - min) / (max - min) clipped to [0, 1]; 0 for constant features.
  void transform(std::span<double> features) const;

  nlohmann::json to_json() const;
  static MinMaxScaler from_json(const nlohmann::json& doc);
};

// Numeric view of one record's feature columns (numeric columns parsed,
// categorical columns replaced by their codes), before scaling.
std::vector<double> numeric_features(const FeatureRecord& record,
                                     const DatasetSchema& schema,
                                     const CategoricalEncoder& encoder,
                                     std::size_t row_index = 0);

MinMaxScaler fit_scaler(std::span<const FeatureRecord> records,
                        const DatasetSchema& schema,
                        const CategoricalEncoder& encoder);

// Fills `encoded` on every record.
void encode_and_scale(std::span<FeatureRecord> records,
                      const DatasetSchema& schema,
                      const CategoricalEncoder& encoder,
                      const MinMaxScaler& scaler);

// A feature vector laid out row-major on the nearest-to-square grid
// rows = ceil(sqrt(d)), cols = ceil(d / rows), zero padded at the tail.
struct FeatureMap {
  Tensor grid;  // [rows, cols]
  std::size_t pad_count = 0;

  std::size_t rows() const { return grid.extent(0); }
  std::size_t cols() const { return grid.extent(1); }
  // Row-major values with the padding removed.
  std::vector<double> flatten() const;
};

struct GridExtents {
  std::size_t rows;
  std::size_t cols;
};
GridExtents feature_map_extents(std::size_t feature_count);

FeatureMap to_feature_map(std::span<const double> encoded);

std::vector<FeatureRecord> filter_normal(std::span<const FeatureRecord> records);

// Encoded datasets on disk: header f0..f{d-1},label; label column is
// "normal", "attack" or empty. Values are written with round-trip precision.
void save_encoded_csv(const std::filesystem::path& path,
                      std::span<const FeatureRecord> records);
std::vector<FeatureRecord> load_encoded_csv(const std::filesystem::path& path);

}  // namespace anomaly::ingest

#endif  // ANOMALY_INGEST_HPP_
