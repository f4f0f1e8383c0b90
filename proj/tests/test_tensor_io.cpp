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
#include <limits>

#include "anomaly/errors.hpp"
#include "anomaly/io.hpp"
#include "anomaly/parallel.hpp"
#include "anomaly/tensor.hpp"
#include "doctest.h"

using anomaly::Tensor;
namespace io = anomaly::io;

TEST_CASE("tensor indexing is row-major") {
  Tensor t({2, 3, 4});
  CHECK(t.size() == 24);
  t.at(1, 2, 3) = 5.0;
  CHECK(t[23] == 5.0);
  t.at(0, 1, 0) = 7.0;
  CHECK(t[4] == 7.0);
  CHECK(anomaly::shape_string(t.shape()) == "[2x3x4]");
}

TEST_CASE("tensor rejects zero extents and bad data length") {
  CHECK_THROWS_AS(Tensor({2, 0}), anomaly::ShapeError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>(3)), anomaly::ShapeError);
}

TEST_CASE("reshape keeps values and checks size") {
  Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  t.reshape({3, 2});
  CHECK(t.at(2, 1) == 6.0);
  CHECK_THROWS_AS(t.reshape({4, 2}), anomaly::ShapeError);
}

TEST_CASE("all_finite spots nan and inf") {
  Tensor t({3});
  CHECK(t.all_finite());
  t[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::parse_double(" 2.5 ") == 2.5);
  CHECK_THROWS(io::parse_double("abc"));
  CHECK_THROWS(io::parse_double("1.5x"));
}

TEST_CASE("split_csv_line handles quotes") {
  const auto cells = io::split_csv_line("a,\"b,c\",,\"d\"\"e\"");
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == "a");
  CHECK(cells[1] == "b,c");
  CHECK(cells[2] == "");
  CHECK(cells[3] == "d\"e");
}

TEST_CASE("sha256 matches the FIPS 180-2 test vector") {
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("atomic write replaces content and leaves no temp file") {
  const auto dir = std::filesystem::temp_directory_path() / "anomaly_io_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "sub" / "file.txt";
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e :
       std::filesystem::directory_iterator(dir / "sub")) {
    ++entries;
  }
  CHECK(entries == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("read_json reports parse errors as validation errors") {
  const auto path = std::filesystem::temp_directory_path() / "anomaly_bad.json";
  io::write_file_atomic(path, "{not json");
  CHECK_THROWS_AS(io::read_json(path), anomaly::ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<int> hits(100, 0);
  anomaly::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(anomaly::parallel_for(10, 3,
                                        [](std::size_t i) {
                                          if (i == 7) throw std::runtime_error("x");
                                        }),
                  std::runtime_error);
}
