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

#include "anomaly/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "anomaly/config.hpp"
#include "anomaly/detector.hpp"
#include "anomaly/errors.hpp"
#include "anomaly/ingest.hpp"
#include "anomaly/io.hpp"
#include "anomaly/log.hpp"
#include "anomaly/metrics.hpp"
#include "anomaly/synthetic.hpp"
#include "anomaly/verdict.hpp"

namespace anomaly::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFormat = "anomaly-pipeline-manifest/1";
constexpr const char* kThresholdFormat = "anomaly-pipeline-threshold/1";

struct Context {
  config::RunConfig config;
  fs::path run_dir;
  std::string hash;
};

Context prepare(const CommandOptions& options) {
  if (options.config.empty()) throw ValidationError("--config is required");
  Context ctx{config::load(options.config, options.seed), {}, {}};
  if (options.threads) {
    if (*options.threads == 0) throw ValidationError("--threads must be >= 1");
    ctx.config.threads = *options.threads;
    ctx.config.pipeline.threads = *options.threads;
    ctx.config.pipeline.stage2.forest.threads = *options.threads;
  }
  ctx.run_dir = options.out.empty() ? ctx.config.output_dir : options.out;
  if (ctx.run_dir.empty()) {
    throw ValidationError("no output directory: pass --out or set output_dir");
  }
  ctx.hash = ctx.config.hash();
  return ctx;
}

void guard_outputs(const std::vector<fs::path>& outputs, bool force) {
  if (force) return;
  for (const auto& p : outputs) {
    if (fs::exists(p)) {
      throw ValidationError(p.string() +
                            " already exists; pass --force to overwrite");
    }
  }
}

void require_inputs(const std::vector<fs::path>& inputs,
                    const std::string& hint) {
  for (const auto& p : inputs) {
    if (!fs::exists(p)) {
      throw ValidationError("missing " + p.string() + " (" + hint + ")");
    }
  }
}

void check_hash(const json& doc, const std::string& expected,
                const fs::path& source) {
  const std::string found = doc.value("config_hash", std::string());
  if (found != expected) {
    throw HashMismatchError(source.string() + " was produced under config " +
                            (found.empty() ? "<none>" : found) +
                            ", current config hashes to " + expected);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Merges `update` into the run manifest. A manifest from a different config
// is replaced rather than merged.
void update_manifest(const Context& ctx, const json& update) {
  const fs::path path = ctx.run_dir / layout::kManifest;
  json manifest = json::object();
  if (fs::exists(path)) {
    manifest = io::read_json(path);
    if (manifest.value("config_hash", std::string()) != ctx.hash) {
      manifest = json::object();
    }
  }
  manifest["format"] = kManifestFormat;
  manifest["config_hash"] = ctx.hash;
  manifest["seed"] = ctx.config.seed;
  manifest["threads"] = ctx.config.threads;
  manifest["config"] = ctx.config.canonical_json();
  manifest.merge_patch(update);
  io::write_json_atomic(path, manifest);
}

fs::path preprocessed(const Context& ctx, const char* name) {
  return ctx.run_dir / layout::kPreprocessed / name;
}

fs::path model_path(const Context& ctx, const char* name) {
  return ctx.run_dir / layout::kModels / name;
}

std::string confusion_csv(const metrics::ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "actual,predicted_normal,predicted_attack\n"
      << "normal," << cm.tn << ',' << cm.fp << '\n'
      << "attack," << cm.fn << ',' << cm.tp << '\n';
  return out.str();
}

json stage_metrics(std::span<const DetectionVerdict> verdicts,
                   metrics::Stage stage) {
  const auto cm = metrics::confusion(verdicts, stage);
  const std::vector<metrics::ConfusionMatrix> per_class = {cm.swapped(), cm};
  json j = metrics::to_json(metrics::scalar_metrics(cm));
  j["confusion"] = metrics::to_json(cm);
  j["averaged"] = metrics::to_json(metrics::averaged_metrics(per_class));
  return j;
}

}  // namespace

void cmd_synth(const CommandOptions& options, std::ostream& out) {
  const Context ctx = prepare(options);
  const auto& cfg = ctx.config;
  if (!cfg.synthetic) {
    throw ValidationError("synth needs a \"synthetic\" section in the config");
  }
  guard_outputs({cfg.dataset.train, cfg.dataset.test, cfg.dataset.schema},
                options.force);
  const auto& syn = *cfg.synthetic;
  const auto train = synthetic::generate(syn.generator, syn.train_count,
                                         syn.train_anomaly_fraction, 0);
  const auto test = synthetic::generate(syn.generator, syn.test_count,
                                        syn.test_anomaly_fraction, 1);
  synthetic::write_csv(cfg.dataset.train, train);
  synthetic::write_csv(cfg.dataset.test, test);
  io::write_json_atomic(cfg.dataset.schema,
                        synthetic::schema(syn.generator).to_json());
  out << "synth: wrote " << train.rows.size() << " train and "
      << test.rows.size() << " test rows\n";
}

void cmd_preprocess(const CommandOptions& options, std::ostream& out) {
  const Context ctx = prepare(options);
  const auto& ds = ctx.config.dataset;
  require_inputs({ds.schema, ds.train, ds.test}, "dataset files named in the config");
  const auto schema = ingest::DatasetSchema::load(ds.schema);
  const std::vector<fs::path> outputs = {
      preprocessed(ctx, "train.csv"), preprocessed(ctx, "test.csv"),
      preprocessed(ctx, "encoder.json"), preprocessed(ctx, "scaler.json"),
      preprocessed(ctx, "meta.json")};
  guard_outputs(outputs, options.force);

  const auto t0 = std::chrono::steady_clock::now();
  auto train = ingest::load_csv(ds.train, schema);
  const std::size_t raw_train_rows = train.size();
  if (ds.max_train_records > 0 && train.size() > ds.max_train_records) {
    train.resize(ds.max_train_records);
  }
  auto test = ingest::load_csv(ds.test, schema);
  if (train.empty()) throw ValidationError("training file has no data rows");

  const auto encoder = ingest::fit_categorical(train, schema);
  const auto scaler = ingest::fit_scaler(train, schema, encoder);
  ingest::encode_and_scale(train, schema, encoder, scaler);
  ingest::encode_and_scale(test, schema, encoder, scaler);
  const std::size_t train_normal = static_cast<std::size_t>(std::count_if(
      train.begin(), train.end(),
      [](const auto& r) { return r.label == ingest::Label::kNormal; }));

  ingest::save_encoded_csv(outputs[0], train);
  ingest::save_encoded_csv(outputs[1], test);
  io::write_json_atomic(outputs[2], encoder.to_json(schema));
  io::write_json_atomic(outputs[3], scaler.to_json());
  const json rows = {{"raw_train", raw_train_rows},
                     {"train", train.size()},
                     {"train_normal", train_normal},
                     {"test", test.size()},
                     {"features", schema.feature_count()}};
  io::write_json_atomic(outputs[4], {{"config_hash", ctx.hash}, {"rows", rows}});
  update_manifest(ctx, {{"rows", rows},
                        {"timings_seconds", {{"preprocess", seconds_since(t0)}}}});
  log::info("preprocess: {} train rows ({} normal), {} test rows", train.size(),
            train_normal, test.size());
  out << "preprocess: " << train.size() << " train rows (" << train_normal
      << " normal), " << test.size() << " test rows, "
      << schema.feature_count() << " features\n";
}

void cmd_train(const CommandOptions& options, std::ostream& out) {
  const Context ctx = prepare(options);
  const fs::path train_csv = preprocessed(ctx, "train.csv");
  const fs::path meta = preprocessed(ctx, "meta.json");
  require_inputs({train_csv, meta}, "run `preprocess` first");
  check_hash(io::read_json(meta), ctx.hash, meta);
  const std::vector<fs::path> outputs = {
      model_path(ctx, "mscnn.json"), model_path(ctx, "lstm_ae.json"),
      model_path(ctx, "threshold.json"), model_path(ctx, "training.json")};
  guard_outputs(outputs, options.force);

  const auto t0 = std::chrono::steady_clock::now();
  const auto train = ingest::load_encoded_csv(train_csv);
  const auto trained = detector::train_pipeline(train, ctx.config.pipeline);
  const double seconds = seconds_since(t0);

  json mscnn = trained.mscnn.to_json();
  mscnn["config_hash"] = ctx.hash;
  json lstm = trained.lstm.to_json();
  lstm["config_hash"] = ctx.hash;
  json threshold = trained.threshold.to_json();
  threshold["format"] = kThresholdFormat;
  threshold["config_hash"] = ctx.hash;
  threshold["train_normal_count"] = trained.train_normal_count;
  const json training = {{"config_hash", ctx.hash},
                         {"mscnn_loss_history", trained.mscnn_loss_history},
                         {"lstm_loss_history", trained.lstm_loss_history}};
  io::write_json_atomic(outputs[0], mscnn);
  io::write_json_atomic(outputs[1], lstm);
  io::write_json_atomic(outputs[2], threshold);
  io::write_json_atomic(outputs[3], training);

  json digests;
  for (const auto& p : outputs) {
    digests[p.filename().string()] = io::sha256_file(p);
  }
  update_manifest(ctx, {{"models", digests},
                        {"threshold", trained.threshold.to_json()},
                        {"timings_seconds", {{"train", seconds}}}});
  out << "train: theta=" << io::format_double(trained.threshold.theta)
      << " from " << trained.train_normal_count << " normal records\n";
}

void cmd_detect(const CommandOptions& options, std::ostream& out) {
  const Context ctx = prepare(options);
  const fs::path test_csv = preprocessed(ctx, "test.csv");
  const fs::path mscnn_path = model_path(ctx, "mscnn.json");
  const fs::path lstm_path = model_path(ctx, "lstm_ae.json");
  const fs::path threshold_path = model_path(ctx, "threshold.json");
  require_inputs({test_csv}, "run `preprocess` first");
  require_inputs({mscnn_path, lstm_path, threshold_path},
                 "run `train` first");
  const fs::path verdicts_path = ctx.run_dir / layout::kVerdicts;
  guard_outputs({verdicts_path}, options.force);

  const json mscnn_doc = io::read_json(mscnn_path);
  const json lstm_doc = io::read_json(lstm_path);
  const json threshold_doc = io::read_json(threshold_path);
  check_hash(mscnn_doc, ctx.hash, mscnn_path);
  check_hash(lstm_doc, ctx.hash, lstm_path);
  check_hash(threshold_doc, ctx.hash, threshold_path);
  if (threshold_doc.value("format", std::string()) != kThresholdFormat) {
    throw ValidationError(threshold_path.string() + ": not a threshold file");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const detector::TrainedPipeline trained{
      mscnn::MscnnModel::from_json(mscnn_doc),
      lstm::LstmAeModel::from_json(lstm_doc),
      detector::Threshold::from_json(threshold_doc),
      {},
      {},
      {},
      threshold_doc.value("train_normal_count", std::size_t{0})};
  const auto test = ingest::load_encoded_csv(test_csv);
  const auto result = detector::detect(trained, test, ctx.config.pipeline);
  save_verdicts_csv(verdicts_path, result.verdicts);

  std::size_t s1 = 0;
  std::size_t s2 = 0;
  for (const auto& v : result.verdicts) {
    s1 += v.stage1 == Label::kAttack;
    s2 += v.stage2 == Label::kAttack;
  }
  update_manifest(ctx, {{"detection", {{"records", result.verdicts.size()},
                                       {"stage1_attack", s1},
                                       {"stage2_attack", s2}}},
                        {"timings_seconds", {{"detect", seconds_since(t0)}}}});
  out << "detect: " << result.verdicts.size() << " records, " << s1
      << " attack after stage 1, " << s2 << " after stage 2\n";
}

void cmd_evaluate(const CommandOptions& options, std::ostream& out) {
  const Context ctx = prepare(options);
  const fs::path verdicts_path = ctx.run_dir / layout::kVerdicts;
  require_inputs({verdicts_path}, "run `detect` first");
  const std::vector<fs::path> outputs = {
      ctx.run_dir / layout::kMetrics, ctx.run_dir / layout::kRoc,
      ctx.run_dir / layout::kScores, ctx.run_dir / layout::kConfusionStage1,
      ctx.run_dir / layout::kConfusionStage2};
  guard_outputs(outputs, options.force);

  const auto t0 = std::chrono::steady_clock::now();
  const auto verdicts = load_verdicts_csv(verdicts_path);
  if (verdicts.empty()) throw ValidationError("no verdicts to evaluate");
  const auto cm1 = metrics::confusion(verdicts, metrics::Stage::kStage1);
  const auto cm2 = metrics::confusion(verdicts, metrics::Stage::kStage2);

  std::vector<double> scores;
  auto positive = std::make_unique<bool[]>(verdicts.size());
  std::size_t attacks = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    scores.push_back(verdicts[i].reconstruction_error);
    positive[i] = *verdicts[i].ground_truth == Label::kAttack;
    attacks += positive[i];
  }
  const std::span<const bool> truth(positive.get(), verdicts.size());
  json metrics_doc = {
      {"records", verdicts.size()},
      {"stage1", stage_metrics(verdicts, metrics::Stage::kStage1)},
      {"stage2", stage_metrics(verdicts, metrics::Stage::kStage2)}};

  std::ostringstream roc_csv;
  roc_csv << "fpr,tpr,threshold\n";
  const bool both_classes = attacks > 0 && attacks < verdicts.size();
  if (both_classes) {
    const auto roc = metrics::roc_auc(scores, truth);
    metrics_doc["auc"] = roc.auc;
    for (const auto& p : roc.points) {
      roc_csv << io::format_double(p.fpr) << ',' << io::format_double(p.tpr)
              << ',' << io::format_double(p.threshold) << '\n';
    }
  } else {
    metrics_doc["auc"] = nullptr;
    log::warn("evaluate: only one class present, ROC curve left empty");
  }

  std::ostringstream scores_csv;
  scores_csv << "record_index,epsilon,ground_truth,stage1,stage2\n";
  for (const auto& v : verdicts) {
    scores_csv << v.record_index << ','
               << io::format_double(v.reconstruction_error) << ','
               << ingest::to_string(*v.ground_truth) << ','
               << ingest::to_string(v.stage1) << ','
               << ingest::to_string(v.stage2) << '\n';
  }

  io::write_json_atomic(outputs[0], metrics_doc);
  io::write_file_atomic(outputs[1], roc_csv.str());
  io::write_file_atomic(outputs[2], scores_csv.str());
  io::write_file_atomic(outputs[3], confusion_csv(cm1));
  io::write_file_atomic(outputs[4], confusion_csv(cm2));

  const json summary = {
      {"auc", metrics_doc["auc"]},
      {"stage1", {{"accuracy", metrics_doc["stage1"]["accuracy"]},
                  {"precision", metrics_doc["stage1"]["precision"]},
                  {"recall", metrics_doc["stage1"]["recall"]},
                  {"f1", metrics_doc["stage1"]["f1"]}}},
      {"stage2", {{"accuracy", metrics_doc["stage2"]["accuracy"]},
                  {"precision", metrics_doc["stage2"]["precision"]},
                  {"recall", metrics_doc["stage2"]["recall"]},
                  {"f1", metrics_doc["stage2"]["f1"]}}}};
  update_manifest(ctx, {{"metrics", summary},
                        {"timings_seconds", {{"evaluate", seconds_since(t0)}}}});
  out << "evaluate: stage-1 accuracy "
      << io::format_double(metrics_doc["stage1"]["accuracy"].get<double>())
      << ", stage-2 accuracy "
      << io::format_double(metrics_doc["stage2"]["accuracy"].get<double>());
  if (both_classes) {
    out << ", AUC " << io::format_double(metrics_doc["auc"].get<double>());
  }
  out << '\n';
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const HashMismatchError*>(&e)) return kExitHashMismatch;
  if (dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) ||
      dynamic_cast<const DataError*>(&e)) {
    return kExitValidation;
  }
  return kExitRuntime;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  log::init_from_env();
  CLI::App app{"Two-stage network intrusion detection pipeline"};
  app.require_subcommand(1);
  CommandOptions options;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  using Command = void (*)(const CommandOptions&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"synth", "Write a synthetic dataset described by the config", cmd_synth},
      {"preprocess", "Encode and scale the raw dataset", cmd_preprocess},
      {"train", "Fit MSCNN-AE, LSTM-AE and the error threshold", cmd_train},
      {"detect", "Classify the test records", cmd_detect},
      {"evaluate", "Score verdicts against ground truth", cmd_evaluate}};
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config, "Run config (JSON)")->required();
    sub->add_option("--out", options.out, "Run directory");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", threads, "Worker cap");
    sub->add_flag("--force", options.force, "Overwrite existing outputs");
    subs.emplace_back(sub, fn);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  for (const auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) options.seed = seed;
    if (sub->count("--threads") > 0) options.threads = threads;
    try {
      fn(options, out);
      return kExitOk;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return exit_code(e);
    }
  }
  return kExitValidation;
}

}  // namespace anomaly::cli
