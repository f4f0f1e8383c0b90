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

#include "anomaly/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "anomaly/errors.hpp"
#include "anomaly/io.hpp"

namespace anomaly::ingest {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

ColumnKind kind_from_string(std::string_view name) {
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "categorical") return ColumnKind::kCategorical;
  if (name == "label") return ColumnKind::kLabel;
  if (name == "ignore") return ColumnKind::kIgnore;
  throw ValidationError("unknown column kind '" + std::string(name) + "'");
}

bool is_feature(ColumnKind kind) {
  return kind == ColumnKind::kNumeric || kind == ColumnKind::kCategorical;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kLabel:
      return "label";
    case ColumnKind::kIgnore:
      return "ignore";
  }
  return "ignore";
}

std::string_view to_string(Label label) {
  return label == Label::kNormal ? "normal" : "attack";
}

Label label_from_string(std::string_view text) {
  if (text == "normal") return Label::kNormal;
  if (text == "attack") return Label::kAttack;
  throw ValidationError("label must be 'normal' or 'attack', got '" +
                        std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// DatasetSchema

void DatasetSchema::validate() const {
  if (column_names.size() != column_kinds.size()) {
    throw ValidationError("schema: names and kinds differ in length");
  }
  std::set<std::string> seen;
  for (const auto& name : column_names) {
    if (!seen.insert(name).second) {
      throw ValidationError("schema: duplicate column name '" + name + "'");
    }
  }
  const auto labels =
      std::count(column_kinds.begin(), column_kinds.end(), ColumnKind::kLabel);
  if (labels > 1) throw ValidationError("schema: more than one label column");
  if (feature_count() == 0) {
    throw ValidationError("schema: no numeric or categorical columns");
  }
  if (labels == 1 && label_mapping.empty() && !default_label) {
    throw ValidationError("schema: label column without a label mapping");
  }
}

std::size_t DatasetSchema::feature_count() const {
  return static_cast<std::size_t>(
      std::count_if(column_kinds.begin(), column_kinds.end(), is_feature));
}

std::optional<std::size_t> DatasetSchema::label_column() const {
  auto it = std::find(column_kinds.begin(), column_kinds.end(),
                      ColumnKind::kLabel);
  if (it == column_kinds.end()) return std::nullopt;
  return static_cast<std::size_t>(it - column_kinds.begin());
}

std::optional<Label> DatasetSchema::map_label(std::string_view text) const {
  auto it = label_mapping.find(std::string(text));
  if (it != label_mapping.end()) return it->second;
  return default_label;
}

DatasetSchema DatasetSchema::from_json(const json& doc) {
  DatasetSchema schema;
  try {
    schema.has_header = doc.value("header", true);
    for (const auto& col : doc.at("columns")) {
      schema.column_names.push_back(col.at("name").get<std::string>());
      schema.column_kinds.push_back(
          kind_from_string(col.at("kind").get<std::string>()));
    }
    if (doc.contains("label_mapping")) {
      for (const auto& [raw, label] : doc.at("label_mapping").items()) {
        schema.label_mapping[raw] = label_from_string(label.get<std::string>());
      }
    }
    if (doc.contains("default_label") && !doc.at("default_label").is_null()) {
      schema.default_label =
          label_from_string(doc.at("default_label").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schema: ") + e.what());
  }
  schema.validate();
  return schema;
}

DatasetSchema DatasetSchema::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("schema file not found: " + path.string());
  }
  return from_json(io::read_json(path));
}

json DatasetSchema::to_json() const {
  json doc;
  doc["header"] = has_header;
  json cols = json::array();
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    cols.push_back({{"name", column_names[i]},
                    {"kind", to_string(column_kinds[i])}});
  }
  doc["columns"] = std::move(cols);
  json mapping = json::object();
  for (const auto& [raw, label] : label_mapping) mapping[raw] = to_string(label);
  doc["label_mapping"] = std::move(mapping);
  doc["default_label"] =
      default_label ? json(to_string(*default_label)) : json(nullptr);
  return doc;
}

// ---------------------------------------------------------------------------
// CSV loading

std::vector<FeatureRecord> load_csv(const std::filesystem::path& path,
                                    const DatasetSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path.string());

  const auto label_col = schema.label_column();
  std::vector<FeatureRecord> records;
  std::string line;
  bool header_pending = schema.has_header;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = io::split_csv_line(line);
    if (header_pending) {
      header_pending = false;
      if (cells.size() != schema.width()) {
        throw DataError(path.string() + ": header has " +
                        std::to_string(cells.size()) + " columns, schema has " +
                        std::to_string(schema.width()));
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (trim(cells[c]) != schema.column_names[c]) {
          throw DataError(path.string() + ": header column " +
                          std::to_string(c + 1) + " is '" +
                          std::string(trim(cells[c])) + "', schema expects '" +
                          schema.column_names[c] + "'");
        }
      }
      continue;
    }
    ++row;
    if (cells.size() != schema.width()) {
      throw DataError(path.string() + ": row " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(schema.width()),
                      row);
    }
    FeatureRecord rec;
    rec.raw.reserve(cells.size());
    for (auto& cell : cells) rec.raw.emplace_back(trim(cell));
    if (label_col) {
      const std::string& text = rec.raw[*label_col];
      rec.label = schema.map_label(text);
      if (!rec.label) {
        throw DataError(path.string() + ": row " + std::to_string(row) +
                            ": unmappable label '" + text + "'",
                        row);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// CategoricalEncoder

int CategoricalEncoder::code(std::size_t column, std::string_view value) const {
  auto col = codes_.find(column);
  if (col == codes_.end()) return kUnseenCode;
  auto it = col->second.find(value);
  return it == col->second.end() ? kUnseenCode : it->second;
}

CategoricalEncoder fit_categorical(std::span<const FeatureRecord> records,
                                   const DatasetSchema& schema) {
  if (records.empty()) {
    throw ValidationError("fit_categorical: no training records");
  }
  CategoricalEncoder encoder;
  for (std::size_t c = 0; c < schema.width(); ++c) {
    if (schema.column_kinds[c] != ColumnKind::kCategorical) continue;
    std::set<std::string, std::less<>> values;
    for (const auto& rec : records) values.insert(rec.raw.at(c));
    auto& codes = encoder.codes_[c];
    int next = 1;
    for (const auto& v : values) codes.emplace(v, next++);
  }
  return encoder;
}

json CategoricalEncoder::to_json(const DatasetSchema& schema) const {
  json doc = json::object();
  for (const auto& [column, codes] : codes_) {
    json map = json::object();
    for (const auto& [value, code] : codes) map[value] = code;
    doc[schema.column_names.at(column)] = std::move(map);
  }
  return doc;
}

CategoricalEncoder CategoricalEncoder::from_json(const json& doc,
                                                 const DatasetSchema& schema) {
  CategoricalEncoder encoder;
  for (std::size_t c = 0; c < schema.width(); ++c) {
    if (schema.column_kinds[c] != ColumnKind::kCategorical) continue;
    const auto& name = schema.column_names[c];
    if (!doc.contains(name)) {
      throw ValidationError("encoder has no codes for column '" + name + "'");
    }
    auto& codes = encoder.codes_[c];
    for (const auto& [value, code] : doc.at(name).items()) {
      codes.emplace(value, code.get<int>());
    }
  }
  return encoder;
}

// ---------------------------------------------------------------------------
// Scaling

void MinMaxScaler::transform(std::span<double> features) const {
  if (features.size() != min.size()) {
    throw ShapeError("scaler fitted on " + std::to_string(min.size()) +
                     " features, got " + std::to_string(features.size()));
  }
  for (std::size_t k = 0; k < features.size(); ++k) {
    const double range = max[k] - min[k];
    if (!(range > 0.0)) {
      features[k] = 0.0;
      continue;
    }
    features[k] = std::clamp((features[k] - min[k]) / range, 0.0, 1.0);
  }
}

json MinMaxScaler::to_json() const { return {{"min", min}, {"max", max}}; }

MinMaxScaler MinMaxScaler::from_json(const json& doc) {
  MinMaxScaler s;
  s.min = doc.at("min").get<std::vector<double>>();
  s.max = doc.at("max").get<std::vector<double>>();
  if (s.min.size() != s.max.size()) {
    throw ValidationError("scaler: min and max differ in length");
  }
  for (std::size_t k = 0; k < s.min.size(); ++k) {
    if (s.min[k] > s.max[k]) throw ValidationError("scaler: min > max");
  }
  return s;
}

std::vector<double> numeric_features(const FeatureRecord& record,
                                     const DatasetSchema& schema,
                                     const CategoricalEncoder& encoder,
                                     std::size_t row_index) {
  std::vector<double> out;
  out.reserve(schema.feature_count());
  for (std::size_t c = 0; c < schema.width(); ++c) {
    switch (schema.column_kinds[c]) {
      case ColumnKind::kNumeric:
        try {
          out.push_back(io::parse_double(record.raw.at(c)));
        } catch (const ValidationError&) {
          throw DataError("row " + std::to_string(row_index) + ", column '" +
                              schema.column_names[c] + "': non-numeric value '" +
                              record.raw.at(c) + "'",
                          row_index);
        }
        if (!std::isfinite(out.back())) {
          throw DataError("row " + std::to_string(row_index) + ", column '" +
                              schema.column_names[c] + "': non-finite value",
                          row_index);
        }
        break;
      case ColumnKind::kCategorical:
        out.push_back(encoder.code(c, record.raw.at(c)));
        break;
      default:
        break;
    }
  }
  return out;
}

MinMaxScaler fit_scaler(std::span<const FeatureRecord> records,
                        const DatasetSchema& schema,
                        const CategoricalEncoder& encoder) {
  if (records.empty()) throw ValidationError("fit_scaler: no training records");
  MinMaxScaler scaler;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto x = numeric_features(records[r], schema, encoder, r + 1);
    if (r == 0) {
      scaler.min = x;
      scaler.max = x;
      continue;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      scaler.min[k] = std::min(scaler.min[k], x[k]);
      scaler.max[k] = std::max(scaler.max[k], x[k]);
    }
  }
  return scaler;
}

void encode_and_scale(std::span<FeatureRecord> records,
                      const DatasetSchema& schema,
                      const CategoricalEncoder& encoder,
                      const MinMaxScaler& scaler) {
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto x = numeric_features(records[r], schema, encoder, r + 1);
    scaler.transform(x);
    records[r].encoded = std::move(x);
  }
}

// ---------------------------------------------------------------------------
// Feature maps

GridExtents feature_map_extents(std::size_t d) {
  if (d == 0) throw ValidationError("feature map of an empty vector");
  std::size_t rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  while (rows * rows < d) ++rows;
  while (rows > 1 && (rows - 1) * (rows - 1) >= d) --rows;
  const std::size_t cols = (d + rows - 1) / rows;
  return {rows, cols};
}

FeatureMap to_feature_map(std::span<const double> encoded) {
  const auto [rows, cols] = feature_map_extents(encoded.size());
  FeatureMap map{Tensor({rows, cols}), rows * cols - encoded.size()};
  std::copy(encoded.begin(), encoded.end(), map.grid.data().begin());
  return map;
}

std::vector<double> FeatureMap::flatten() const {
  return {grid.data().begin(),
          grid.data().end() - static_cast<std::ptrdiff_t>(pad_count)};
}

std::vector<FeatureRecord> filter_normal(std::span<const FeatureRecord> records) {
  std::vector<FeatureRecord> out;
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (!records[r].label) {
      throw DataError("filter_normal: record " + std::to_string(r + 1) +
                          " has no label",
                      r + 1);
    }
    if (*records[r].label == Label::kNormal) out.push_back(records[r]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Encoded dataset files

void save_encoded_csv(const std::filesystem::path& path,
                      std::span<const FeatureRecord> records) {
  const std::size_t d = records.empty() ? 0 : records.front().encoded.size();
  std::string out;
  for (std::size_t k = 0; k < d; ++k) {
    out += "f" + std::to_string(k) + ",";
  }
  out += "label\n";
  for (const auto& rec : records) {
    if (rec.encoded.size() != d) {
      throw ShapeError("save_encoded_csv: records differ in encoded length");
    }
    for (double v : rec.encoded) {
      out += io::format_double(v);
      out += ',';
    }
    if (rec.label) out += to_string(*rec.label);
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

std::vector<FeatureRecord> load_encoded_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open encoded dataset " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path.string() + ": missing header");
  }
  const std::size_t width = io::split_csv_line(line).size();
  std::vector<FeatureRecord> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto cells = io::split_csv_line(line);
    if (cells.size() != width) {
      throw DataError(path.string() + ": row " + std::to_string(row) +
                          " has the wrong cell count",
                      row);
    }
    FeatureRecord rec;
    rec.encoded.reserve(width - 1);
    for (std::size_t k = 0; k + 1 < width; ++k) {
      rec.encoded.push_back(io::parse_double(cells[k]));
    }
    const auto label = trim(cells.back());
    if (!label.empty()) rec.label = label_from_string(label);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace anomaly::ingest
