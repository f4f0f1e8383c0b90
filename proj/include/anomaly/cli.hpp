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

#ifndef ANOMALY_CLI_HPP_
#define ANOMALY_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anomaly::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitHashMismatch = 3;

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;  // overrides output_dir from the config
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool force = false;
};

// Output layout under the run directory.
namespace layout {
inline constexpr const char* kPreprocessed = "preprocessed";
inline constexpr const char* kModels = "models";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kVerdicts = "verdicts.csv";
inline constexpr const char* kMetrics = "metrics.json";
inline constexpr const char* kRoc = "roc.csv";
inline constexpr const char* kScores = "scores.csv";
inline constexpr const char* kConfusionStage1 = "confusion_stage1.csv";
inline constexpr const char* kConfusionStage2 = "confusion_stage2.csv";
}  // namespace layout

// Each command validates the whole config before touching the filesystem and
// refuses to overwrite its outputs unless `force` is set. Summaries go to
// `out`.
void cmd_synth(const CommandOptions& options, std::ostream& out);
void cmd_preprocess(const CommandOptions& options, std::ostream& out);
void cmd_train(const CommandOptions& options, std::ostream& out);
void cmd_detect(const CommandOptions& options, std::ostream& out);
void cmd_evaluate(const CommandOptions& options, std::ostream& out);

int exit_code(const std::exception& e);

// Full command line, argv[0] included.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace anomaly::cli

#endif  // ANOMALY_CLI_HPP_
