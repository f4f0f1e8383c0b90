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

#include "anomaly/config.hpp"

#include <cmath>
#include <set>
#include <string>
#include <string_view>

#include "anomaly/errors.hpp"
#include "anomaly/io.hpp"

namespace anomaly::config {

using nlohmann::json;

namespace {

// Typed access to one JSON object that rejects keys nobody asked about.
class Section {
 public:
  Section(const json& doc, std::string name) : doc_(doc), name_(std::move(name)) {
    if (!doc_.is_object()) {
      throw ValidationError(name_ + ": expected a JSON object");
    }
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return doc_.contains(key) && !doc_.at(key).is_null();
  }

  template <typename T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) return fallback;
    return read<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw ValidationError(path(key) + " is required");
    return read<T>(key);
  }

  Section child(const std::string& key) {
    known_.insert(key);
    static const json kEmpty = json::object();
    return Section(doc_.contains(key) ? doc_.at(key) : kEmpty, path(key));
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!known_.count(key)) {
        throw ValidationError("unknown config key " + path(key));
      }
    }
  }

 private:
  std::string path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  template <typename T>
  T read(const std::string& key) {
    try {
      if constexpr (std::is_unsigned_v<T>) {
        const json& v = doc_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() &&
                                       !v.is_number_unsigned() &&
                                       v.get<long long>() < 0)) {
          throw ValidationError(path(key) + " must be a non-negative integer");
        }
      }
      return doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(path(key) + " has the wrong type");
    }
  }

  const json& doc_;
  std::string name_;
  std::set<std::string> known_;
};

nn::TrainConfig read_train(Section s) {
  nn::TrainConfig c;
  c.optimizer = nn::optimizer_from_string(
      s.get<std::string>("optimizer", std::string(nn::to_string(c.optimizer))));
  c.learning_rate = s.get("learning_rate", c.learning_rate);
  c.epochs = s.get("epochs", c.epochs);
  c.batch_size = s.get("batch_size", c.batch_size);
  c.beta1 = s.get("beta1", c.beta1);
  c.beta2 = s.get("beta2", c.beta2);
  c.epsilon = s.get("epsilon", c.epsilon);
  s.finish();
  return c;
}

json train_json(const nn::TrainConfig& c) {
  json j = {{"optimizer", nn::to_string(c.optimizer)},
            {"learning_rate", c.learning_rate},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size}};
  if (c.optimizer == nn::OptimizerKind::kAdam) {
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["epsilon"] = c.epsilon;
  }
  return j;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void check_fraction(double value, const std::string& name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(name + " must lie in [0, 1]");
  }
}

}  // namespace

void RunConfig::validate() const {
  const auto& p = pipeline;
  if (p.filters_per_branch == 0) {
    throw ValidationError("mscnn.filters_per_branch must be >= 1");
  }
  if (p.latent_dim == 0) throw ValidationError("mscnn.latent_dim must be >= 1");
  if (p.pool_window == 0 || p.pool_stride == 0) {
    throw ValidationError("mscnn.pool_window and pool_stride must be >= 1");
  }
  lstm::LstmAeConfig lc;
  lc.latent_dim = p.latent_dim;
  lc.window = p.window;
  lc.code_dim = p.code_dim;
  lc.hidden_size = p.hidden_size;
  lc.stride = p.stride;
  lc.validate();
  try {
    p.mscnn_train.validate(0);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("mscnn_train: ") + e.what());
  }
  try {
    p.lstm_train.validate(0);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("lstm_train: ") + e.what());
  }
  if (!std::isfinite(p.threshold_k)) {
    throw ValidationError("threshold.k must be finite");
  }
  if (p.stage2.forest.tree_count == 0) {
    throw ValidationError("iforest.tree_count must be >= 1");
  }
  if (p.stage2.forest.subsample_size < 2) {
    throw ValidationError("iforest.subsample_size must be >= 2");
  }
  p.stage2.rule.validate();
  if (threads == 0) throw ValidationError("threads must be >= 1");
  if (dataset.schema.empty() || dataset.train.empty() || dataset.test.empty()) {
    throw ValidationError("dataset.schema, dataset.train and dataset.test are "
                          "required");
  }
  if (synthetic) {
    synthetic->generator.validate();
    if (synthetic->train_count < 2 || synthetic->test_count < 1) {
      throw ValidationError("synthetic: need >= 2 train and >= 1 test rows");
    }
    check_fraction(synthetic->train_anomaly_fraction,
                   "synthetic.train_anomaly_fraction");
    check_fraction(synthetic->test_anomaly_fraction,
                   "synthetic.test_anomaly_fraction");
  }
}

json RunConfig::canonical_json() const {
  const auto& p = pipeline;
  json doc;
  doc["seed"] = seed;
  doc["dataset"] = {{"schema", dataset.schema.generic_string()},
                    {"train", dataset.train.generic_string()},
                    {"test", dataset.test.generic_string()},
                    {"max_train_records", dataset.max_train_records}};
  if (synthetic) {
    json s = synthetic->generator.to_json();
    s.erase("seed");
    s["train_count"] = synthetic->train_count;
    s["test_count"] = synthetic->test_count;
    s["train_anomaly_fraction"] = synthetic->train_anomaly_fraction;
    s["test_anomaly_fraction"] = synthetic->test_anomaly_fraction;
    doc["synthetic"] = s;
  }
  doc["mscnn"] = {{"filters_per_branch", p.filters_per_branch},
                  {"latent_dim", p.latent_dim},
                  {"pool_window", p.pool_window},
                  {"pool_stride", p.pool_stride}};
  doc["mscnn_train"] = train_json(p.mscnn_train);
  doc["lstm"] = {{"window", p.window},
                 {"code_dim", p.code_dim},
                 {"hidden_size", p.hidden_size},
                 {"stride", p.stride},
                 {"error_mode", lstm::to_string(p.error_mode)}};
  doc["lstm_train"] = train_json(p.lstm_train);
  doc["threshold"] = {{"k", p.threshold_k}};
  json forest = {{"tree_count", p.stage2.forest.tree_count},
                 {"subsample_size", p.stage2.forest.subsample_size},
                 {"feature_space", detector::to_string(p.stage2.space)}};
  if (p.stage2.rule.contamination) {
    forest["contamination"] = *p.stage2.rule.contamination;
  } else {
    forest["score_threshold"] = *p.stage2.rule.score_threshold;
  }
  doc["iforest"] = forest;
  return doc;
}

std::string RunConfig::hash() const {
  return io::sha256_hex(canonical_json().dump());
}

RunConfig from_json(const json& doc, const std::filesystem::path& base_dir,
                    std::optional<std::uint64_t> seed_override) {
  RunConfig c;
  Section root(doc, "");
  if (seed_override) {
    root.has("seed");
    c.seed = *seed_override;
  } else {
    c.seed = root.require<std::uint64_t>("seed");
  }
  c.threads = root.get<std::size_t>("threads", 1);
  if (root.has("output_dir")) {
    c.output_dir = resolve(base_dir, root.require<std::string>("output_dir"));
  }

  Section ds = root.child("dataset");
  c.dataset.schema = resolve(base_dir, ds.require<std::string>("schema"));
  c.dataset.train = resolve(base_dir, ds.require<std::string>("train"));
  c.dataset.test = resolve(base_dir, ds.require<std::string>("test"));
  c.dataset.max_train_records = ds.get<std::size_t>("max_train_records", 0);
  ds.finish();

  if (root.has("synthetic")) {
    Section s = root.child("synthetic");
    SyntheticSection syn;
    auto& g = syn.generator;
    g.feature_count = s.get("feature_count", g.feature_count);
    g.factor_count = s.get("factor_count", g.factor_count);
    g.noise_std = s.get("noise_std", g.noise_std);
    g.shift = s.get("shift", g.shift);
    syn.train_count = s.get("train_count", syn.train_count);
    syn.test_count = s.get("test_count", syn.test_count);
    syn.train_anomaly_fraction =
        s.get("train_anomaly_fraction", syn.train_anomaly_fraction);
    syn.test_anomaly_fraction =
        s.get("test_anomaly_fraction", syn.test_anomaly_fraction);
    s.finish();
    g.seed = c.seed;
    c.synthetic = syn;
  }

  auto& p = c.pipeline;
  Section m = root.child("mscnn");
  p.filters_per_branch = m.get("filters_per_branch", p.filters_per_branch);
  p.latent_dim = m.get("latent_dim", p.latent_dim);
  p.pool_window = m.get("pool_window", p.pool_window);
  p.pool_stride = m.get("pool_stride", p.pool_stride);
  m.finish();
  p.mscnn_train = read_train(root.child("mscnn_train"));

  Section l = root.child("lstm");
  p.window = l.get("window", p.window);
  p.code_dim = l.get("code_dim", p.code_dim);
  p.hidden_size = l.get("hidden_size", p.hidden_size);
  p.stride = l.get("stride", p.stride);
  p.error_mode = lstm::error_mode_from_string(
      l.get<std::string>("error_mode", std::string(lstm::to_string(p.error_mode))));
  l.finish();
  p.lstm_train = read_train(root.child("lstm_train"));

  Section t = root.child("threshold");
  p.threshold_k = t.get("k", p.threshold_k);
  t.finish();

  Section f = root.child("iforest");
  p.stage2.forest.tree_count = f.get("tree_count", p.stage2.forest.tree_count);
  p.stage2.forest.subsample_size =
      f.get("subsample_size", p.stage2.forest.subsample_size);
  const bool has_cont = f.has("contamination");
  const bool has_thr = f.has("score_threshold");
  if (has_cont && has_thr) {
    throw ValidationError(
        "iforest: set contamination or score_threshold, not both");
  }
  if (has_cont) {
    p.stage2.rule =
        iforest::OutlierRule::by_contamination(f.require<double>("contamination"));
  } else if (has_thr) {
    p.stage2.rule =
        iforest::OutlierRule::by_threshold(f.require<double>("score_threshold"));
  }
  p.stage2.space = detector::feature_space_from_string(f.get<std::string>(
      "feature_space", std::string(detector::to_string(p.stage2.space))));
  f.finish();
  root.finish();

  p.seed = c.seed;
  p.threads = c.threads;
  p.stage2.forest.threads = c.threads;
  c.validate();
  return c;
}

RunConfig load(const std::filesystem::path& path,
               std::optional<std::uint64_t> seed_override) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("config file not found: " + path.string());
  }
  return from_json(io::read_json(path), path.parent_path(), seed_override);
}

}  // namespace anomaly::config
