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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anomaly/cli.hpp"
#include "anomaly/io.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace anomaly;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("ANOMALY_PIPELINE_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "anomaly_cli";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json small_config() {
  return json::parse(R"({
    "seed": 5,
    "output_dir": "run",
    "dataset": {"schema": "data/schema.json", "train": "data/train.csv",
                "test": "data/test.csv"},
    "synthetic": {"train_count": 240, "test_count": 120,
                  "test_anomaly_fraction": 0.25},
    "mscnn": {"filters_per_branch": 3, "latent_dim": 4},
    "mscnn_train": {"epochs": 2, "batch_size": 16},
    "lstm": {"window": 2, "code_dim": 3, "hidden_size": 6},
    "lstm_train": {"epochs": 2, "batch_size": 16},
    "iforest": {"tree_count": 20, "subsample_size": 64}
  })");
}

fs::path write_config(const fs::path& dir, const json& doc,
                      const std::string& name = "run.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "anomaly-pipeline");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Result step(const std::string& command, const fs::path& config,
            std::vector<std::string> extra = {}) {
  std::vector<std::string> args{command, "--config", config.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return invoke(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void full_run(const fs::path& config, const std::vector<std::string>& extra) {
  for (const char* cmd : {"preprocess", "train", "detect", "evaluate"}) {
    const Result r = step(cmd, config, extra);
    INFO(cmd << ": " << r.err);
    REQUIRE(r.code == cli::kExitOk);
  }
}

}  // namespace

TEST_CASE("full run writes every artifact and is byte-for-byte repeatable") {
  const fs::path dir = scratch("repeat");
  const fs::path cfg = write_config(dir, small_config());
  REQUIRE(step("synth", cfg).code == cli::kExitOk);

  full_run(cfg, {"--out", (dir / "a").string(), "--threads", "1"});
  full_run(cfg, {"--out", (dir / "b").string(), "--threads", "1"});

  for (const char* name : {cli::layout::kVerdicts, cli::layout::kMetrics,
                           cli::layout::kRoc, cli::layout::kScores,
                           cli::layout::kConfusionStage1,
                           cli::layout::kConfusionStage2}) {
    INFO(name);
    REQUIRE(fs::exists(dir / "a" / name));
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  CHECK(slurp(dir / "a/models/mscnn.json") == slurp(dir / "b/models/mscnn.json"));

  const json metrics = io::read_json(dir / "a" / cli::layout::kMetrics);
  CHECK(metrics.at("records") == 120);
  CHECK(metrics.at("auc").is_number());
  CHECK(metrics.at("stage1").contains("confusion"));
  CHECK(metrics.at("stage2").at("averaged").contains("macro"));

  const json manifest = io::read_json(dir / "a" / cli::layout::kManifest);
  CHECK(manifest.at("seed") == 5);
  CHECK(manifest.at("config_hash").get<std::string>().size() == 64);
  CHECK(manifest.contains("timings_seconds"));

  std::ifstream roc(dir / "a" / cli::layout::kRoc);
  std::string header;
  std::string first;
  std::string line;
  std::string last;
  std::getline(roc, header);
  std::getline(roc, first);
  while (std::getline(roc, line)) last = line;
  CHECK(header == "fpr,tpr,threshold");
  CHECK(first.starts_with("0,0,"));
  CHECK(last.starts_with("1,1,"));
}

TEST_CASE("existing outputs need --force") {
  const fs::path dir = scratch("force");
  const fs::path cfg = write_config(dir, small_config());
  REQUIRE(step("synth", cfg).code == cli::kExitOk);
  REQUIRE(step("preprocess", cfg).code == cli::kExitOk);
  const Result again = step("preprocess", cfg);
  CHECK(again.code == cli::kExitValidation);
  CHECK(again.err.find("--force") != std::string::npos);
  CHECK(step("preprocess", cfg, {"--force"}).code == cli::kExitOk);
  CHECK(step("synth", cfg).code == cli::kExitValidation);
}

TEST_CASE("missing inputs are validation errors naming the file") {
  const fs::path dir = scratch("missing");
  const fs::path cfg = write_config(dir, small_config());

  const Result no_schema = step("preprocess", cfg);
  CHECK(no_schema.code == cli::kExitValidation);
  CHECK(no_schema.err.find("schema.json") != std::string::npos);

  REQUIRE(step("synth", cfg).code == cli::kExitOk);
  REQUIRE(step("preprocess", cfg).code == cli::kExitOk);
  const Result no_model = step("detect", cfg);
  CHECK(no_model.code == cli::kExitValidation);
  CHECK(no_model.err.find("mscnn.json") != std::string::npos);

  CHECK(step("preprocess", dir / "nope.json").code == cli::kExitValidation);
  CHECK(invoke({"train"}).code == cli::kExitValidation);
  CHECK(invoke({"bogus", "--config", cfg.string()}).code == cli::kExitValidation);
}

TEST_CASE("artifacts from another config are refused") {
  const fs::path dir = scratch("hash");
  const fs::path cfg = write_config(dir, small_config());
  REQUIRE(step("synth", cfg).code == cli::kExitOk);
  REQUIRE(step("preprocess", cfg).code == cli::kExitOk);

  json changed = small_config();
  changed["threshold"] = {{"k", 3.0}};
  const fs::path other = write_config(dir, changed, "other.json");
  const Result r = step("train", other);
  CHECK(r.code == cli::kExitHashMismatch);

  CHECK(step("train", cfg, {"--seed", "6"}).code == cli::kExitHashMismatch);
  CHECK(step("train", cfg).code == cli::kExitOk);
}

TEST_CASE("bad config values exit with the validation code") {
  const fs::path dir = scratch("invalid");
  json doc = small_config();
  doc["lstm"]["window"] = 0;
  const fs::path cfg = write_config(dir, doc);
  CHECK(step("synth", cfg).code == cli::kExitValidation);
  CHECK(step("preprocess", write_config(dir, small_config(), "ok.json"),
             {"--threads", "0"})
            .code == cli::kExitValidation);
}
