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

#include <filesystem>
#include <fstream>

#include "anomaly/errors.hpp"
#include "anomaly/ingest.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace anomaly::ingest;

namespace {

DatasetSchema small_schema() {
  DatasetSchema s;
  s.column_names = {"duration", "protocol", "service", "note", "class"};
  s.column_kinds = {ColumnKind::kNumeric, ColumnKind::kCategorical,
                    ColumnKind::kCategorical, ColumnKind::kIgnore,
                    ColumnKind::kLabel};
  s.label_mapping = {{"normal", Label::kNormal}};
  s.default_label = Label::kAttack;
  return s;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("anomaly_ingest_" + name);
  std::ofstream(p) << content;
  return p;
}

FeatureRecord rec(std::vector<std::string> raw) {
  FeatureRecord r;
  r.raw = std::move(raw);
  return r;
}

}  // namespace

TEST_CASE("load_csv maps labels and skips the header") {
  const auto path = write_temp("ok.csv",
                               "duration,protocol,service,note,class\n"
                               "0,tcp,http,x,normal\n"
                               "5,udp,dns,y,neptune\n"
                               "\n"
                               "10,icmp,http,z,normal\n");
  const auto records = load_csv(path, small_schema());
  REQUIRE(records.size() == 3);
  CHECK(records[0].label == Label::kNormal);
  CHECK(records[1].label == Label::kAttack);
  CHECK(records[2].raw[1] == "icmp");
}

TEST_CASE("header-only file yields no records") {
  const auto path = write_temp("empty.csv", "duration,protocol,service,note,class\n");
  CHECK(load_csv(path, small_schema()).empty());
}

TEST_CASE("short row is reported with its row index") {
  const auto path = write_temp("short.csv",
                               "duration,protocol,service,note,class\n"
                               "0,tcp,http,x,normal\n"
                               "5,udp,dns,neptune\n");
  try {
    load_csv(path, small_schema());
    FAIL("expected DataError");
  } catch (const anomaly::DataError& e) {
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("header mismatch and unmappable labels are errors") {
  const auto bad_header = write_temp("hdr.csv", "duration,proto,service,note,class\n");
  CHECK_THROWS_AS(load_csv(bad_header, small_schema()), anomaly::DataError);

  auto strict = small_schema();
  strict.default_label.reset();
  const auto path = write_temp("lab.csv",
                               "duration,protocol,service,note,class\n"
                               "0,tcp,http,x,smurf\n");
  CHECK_THROWS_AS(load_csv(path, strict), anomaly::DataError);
}

TEST_CASE("schema json round trip and missing file") {
  const auto s = small_schema();
  const auto back = DatasetSchema::from_json(s.to_json());
  CHECK(back.column_names == s.column_names);
  CHECK(back.column_kinds == s.column_kinds);
  CHECK(back.default_label == s.default_label);
  CHECK(back.feature_count() == 3);
  CHECK_THROWS_AS(DatasetSchema::load("/nonexistent/schema.json"),
                  anomaly::ValidationError);
}

TEST_CASE("categorical codes are lexicographic from 1 and unseen is 0") {
  const auto schema = small_schema();
  std::vector<FeatureRecord> train = {rec({"0", "tcp", "http", "", "normal"}),
                                      rec({"1", "udp", "http", "", "normal"}),
                                      rec({"2", "icmp", "http", "", "normal"})};
  const auto enc = fit_categorical(train, schema);
  CHECK(enc.code(1, "icmp") == 1);
  CHECK(enc.code(1, "tcp") == 2);
  CHECK(enc.code(1, "udp") == 3);
  CHECK(enc.code(2, "http") == 1);
  CHECK(enc.code(2, "ftp") == CategoricalEncoder::kUnseenCode);
  CHECK(fit_categorical(train, schema) == enc);
  CHECK(CategoricalEncoder::from_json(enc.to_json(schema), schema) == enc);
}

TEST_CASE("min-max scaling, clipping and constant columns") {
  DatasetSchema schema;
  schema.column_names = {"a", "b"};
  schema.column_kinds = {ColumnKind::kNumeric, ColumnKind::kNumeric};
  std::vector<FeatureRecord> train = {rec({"0", "3"}), rec({"5", "3"}),
                                      rec({"10", "3"})};
  const CategoricalEncoder enc = fit_categorical(train, schema);
  const auto scaler = fit_scaler(train, schema, enc);
  encode_and_scale(train, schema, enc, scaler);
  CHECK(train[0].encoded == std::vector<double>{0.0, 0.0});
  CHECK(train[1].encoded == std::vector<double>{0.5, 0.0});
  CHECK(train[2].encoded == std::vector<double>{1.0, 0.0});

  std::vector<FeatureRecord> test = {rec({"12", "4"}), rec({"-1", "2"})};
  encode_and_scale(test, schema, enc, scaler);
  CHECK(test[0].encoded == std::vector<double>{1.0, 0.0});
  CHECK(test[1].encoded == std::vector<double>{0.0, 0.0});

  // Refit on scaled data is a no-op.
  const auto rescaled = [&] {
    auto copy = train;
    for (auto& r : copy) {
      r.raw = {std::to_string(r.encoded[0]), std::to_string(r.encoded[1])};
    }
    const auto s2 = fit_scaler(copy, schema, enc);
    encode_and_scale(copy, schema, enc, s2);
    return copy;
  }();
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(rescaled[i].encoded[0] == doctest::Approx(train[i].encoded[0]));
  }
}

TEST_CASE("non-numeric numeric cell raises a data error") {
  DatasetSchema schema;
  schema.column_names = {"a"};
  schema.column_kinds = {ColumnKind::kNumeric};
  std::vector<FeatureRecord> train = {rec({"1"}), rec({"oops"})};
  const auto enc = fit_categorical(train, schema);
  CHECK_THROWS_AS(fit_scaler(train, schema, enc), anomaly::DataError);
}

TEST_CASE("feature map layout") {
  CHECK(feature_map_extents(41).rows == 7);
  CHECK(feature_map_extents(41).cols == 6);
  CHECK(feature_map_extents(16).rows == 4);
  CHECK(feature_map_extents(16).cols == 4);
  CHECK(feature_map_extents(1).rows == 1);

  for (std::size_t d : {1u, 2u, 5u, 16u, 41u, 42u, 77u}) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = 0.01 * static_cast<double>(i + 1);
    const auto map = to_feature_map(v);
    CHECK(map.rows() * map.cols() - map.pad_count == d);
    CHECK(map.flatten() == v);
    for (std::size_t k = d; k < map.grid.size(); ++k) CHECK(map.grid[k] == 0.0);
  }
  const auto m41 = to_feature_map(std::vector<double>(41, 0.5));
  CHECK(m41.pad_count == 1);
}

TEST_CASE("filter_normal keeps order and rejects unlabeled rows") {
  std::vector<FeatureRecord> rs(4);
  rs[0].label = Label::kAttack;
  rs[1].label = Label::kNormal;
  rs[1].encoded = {1.0};
  rs[2].label = Label::kAttack;
  rs[3].label = Label::kNormal;
  rs[3].encoded = {2.0};
  const auto normal = filter_normal(rs);
  REQUIRE(normal.size() == 2);
  CHECK(normal[0].encoded[0] == 1.0);
  CHECK(normal[1].encoded[0] == 2.0);

  std::vector<FeatureRecord> attacks(3);
  for (auto& r : attacks) r.label = Label::kAttack;
  CHECK(filter_normal(attacks).empty());

  rs[2].label.reset();
  CHECK_THROWS_AS(filter_normal(rs), anomaly::DataError);
}

TEST_CASE("encoded csv round trip is exact") {
  std::vector<FeatureRecord> rs(2);
  rs[0].encoded = {0.1, 1.0 / 3.0};
  rs[0].label = Label::kNormal;
  rs[1].encoded = {0.0, 1.0};
  const auto path = fs::temp_directory_path() / "anomaly_encoded.csv";
  save_encoded_csv(path, rs);
  const auto back = load_encoded_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].encoded == rs[0].encoded);
  CHECK(back[0].label == Label::kNormal);
  CHECK_FALSE(back[1].label.has_value());
}
