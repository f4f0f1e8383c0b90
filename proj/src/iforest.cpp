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

#include "anomaly/iforest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomaly/errors.hpp"
#include "anomaly/nn/param.hpp"
#include "anomaly/parallel.hpp"

namespace anomaly::iforest {

using nlohmann::json;

namespace {

constexpr double kEulerGamma = 0.5772156649;
constexpr std::size_t kExactHarmonicLimit = 10000;

double harmonic(std::size_t n) {
  if (n <= kExactHarmonicLimit) {
    double sum = 0.0;
    for (std::size_t i = n; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
  }
  return std::log(static_cast<double>(n)) + kEulerGamma;
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& data, std::size_t limit, std::mt19937_64& rng)
      : data_(data), limit_(limit), rng_(rng) {}

  std::size_t build(std::vector<std::size_t>& rows, std::size_t begin,
                    std::size_t end, std::size_t depth) {
    const std::size_t index = nodes_.size();
    nodes_.push_back({});
    nodes_[index].size = end - begin;
    if (end - begin <= 1 || depth >= limit_) return index;

    const std::size_t dims = data_[rows[begin]].size();
    std::vector<std::size_t> candidates;
    std::vector<double> lo(dims), hi(dims);
    for (std::size_t f = 0; f < dims; ++f) {
      lo[f] = hi[f] = data_[rows[begin]][f];
      for (std::size_t k = begin + 1; k < end; ++k) {
        const double v = data_[rows[k]][f];
        lo[f] = std::min(lo[f], v);
        hi[f] = std::max(hi[f], v);
      }
      if (lo[f] < hi[f]) candidates.push_back(f);
    }
    if (candidates.empty()) return index;

    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const std::size_t feature = candidates[pick(rng_)];
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double split = lo[feature];
    while (!(split > lo[feature] && split < hi[feature])) {
      split = lo[feature] + unit(rng_) * (hi[feature] - lo[feature]);
    }

    const auto mid = std::stable_partition(
        rows.begin() + static_cast<std::ptrdiff_t>(begin),
        rows.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return data_[r][feature] < split; });
    const std::size_t middle = static_cast<std::size_t>(mid - rows.begin());

    const std::size_t left = build(rows, begin, middle, depth + 1);
    const std::size_t right = build(rows, middle, end, depth + 1);
    IsolationTree::Node& node = nodes_[index];
    node.leaf = false;
    node.feature = feature;
    node.split = split;
    node.left = left;
    node.right = right;
    return index;
  }

  std::vector<IsolationTree::Node> take() { return std::move(nodes_); }

 private:
  const Matrix& data_;
  std::size_t limit_;
  std::mt19937_64& rng_;
  std::vector<IsolationTree::Node> nodes_;
};

}  // namespace

double c_normalizer(std::size_t n) {
  if (n < 2) {
    throw ValidationError("c_normalizer requires n >= 2, got " +
                          std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  return 2.0 * harmonic(n - 1) - 2.0 * (nd - 1.0) / nd;
}

// ---------------------------------------------------------------------------
// IsolationTree

IsolationTree::IsolationTree(std::vector<Node> nodes, std::size_t dims,
                             std::size_t height_limit)
    : nodes_(std::move(nodes)), dims_(dims), height_limit_(height_limit) {
  if (nodes_.empty()) throw ValidationError("isolation tree without nodes");
  for (const Node& n : nodes_) {
    if (!n.leaf && (n.left >= nodes_.size() || n.right >= nodes_.size() ||
                    n.feature >= dims_)) {
      throw ValidationError("isolation tree node references are out of range");
    }
  }
}

double IsolationTree::path_length(std::span<const double> x) const {
  if (x.size() != dims_) {
    throw ShapeError("path_length: point has " + std::to_string(x.size()) +
                     " features, tree expects " + std::to_string(dims_));
  }
  std::size_t edges = 0;
  std::size_t at = 0;
  while (!nodes_[at].leaf) {
    const Node& n = nodes_[at];
    at = x[n.feature] < n.split ? n.left : n.right;
    ++edges;
  }
  const std::size_t m = nodes_[at].size;
  return static_cast<double>(edges) + (m > 1 ? c_normalizer(m) : 0.0);
}

std::size_t IsolationTree::height() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, depth[i]);
    if (!nodes_[i].leaf) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return best;
}

IsolationTree build_tree(const Matrix& data, std::vector<std::size_t> rows,
                         std::mt19937_64& rng) {
  if (rows.empty()) throw ValidationError("build_tree: no rows");
  const std::size_t dims = data[rows.front()].size();
  const std::size_t limit = ceil_log2(rows.size());
  TreeBuilder builder(data, limit, rng);
  builder.build(rows, 0, rows.size(), 0);
  return IsolationTree(builder.take(), dims, limit);
}

// ---------------------------------------------------------------------------
// IsolationForest

IsolationForest fit_forest(const Matrix& data, const ForestOptions& options) {
  if (data.size() < 2) {
    throw ValidationError("fit_forest needs at least 2 rows, got " +
                          std::to_string(data.size()));
  }
  if (options.tree_count == 0) throw ValidationError("tree_count must be >= 1");
  if (options.subsample_size < 2) {
    throw ValidationError("subsample_size must be >= 2");
  }
  const std::size_t dims = data.front().size();
  if (dims == 0) throw ValidationError("fit_forest: rows have no features");
  for (const auto& row : data) {
    if (row.size() != dims) throw ShapeError("fit_forest: ragged rows");
  }

  IsolationForest forest;
  forest.subsample_ = std::min(options.subsample_size, data.size());
  forest.dims_ = dims;
  forest.seed_ = options.seed;
  forest.trees_.resize(options.tree_count);

  parallel_for(options.tree_count, options.threads, [&](std::size_t t) {
    auto rng = nn::derive_rng(options.seed, t);
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `subsample_` slots form the sample.
    for (std::size_t i = 0; i < forest.subsample_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    all.resize(forest.subsample_);
    forest.trees_[t] = build_tree(data, std::move(all), rng);
  });
  return forest;
}

double IsolationForest::mean_path_length(std::span<const double> x) const {
  if (!fitted()) throw ValidationError("isolation forest is not fitted");
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.path_length(x);
  return sum / static_cast<double>(trees_.size());
}

double IsolationForest::score(std::span<const double> x) const {
  return std::exp2(-mean_path_length(x) / c_normalizer(subsample_));
}

std::vector<double> IsolationForest::score_all(const Matrix& rows,
                                               std::size_t threads) const {
  std::vector<double> out(rows.size());
  parallel_for(rows.size(), threads,
               [&](std::size_t i) { out[i] = score(rows[i]); });
  return out;
}

json IsolationForest::to_json() const {
  json trees = json::array();
  for (const auto& tree : trees_) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
      if (n.leaf) {
        nodes.push_back({{"size", n.size}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"split", n.split},
                         {"left", n.left},
                         {"right", n.right},
                         {"size", n.size}});
      }
    }
    trees.push_back({{"height_limit", tree.height_limit()}, {"nodes", nodes}});
  }
  return {{"format", "anomaly-pipeline-iforest/1"},
          {"subsample_size", subsample_},
          {"tree_count", trees_.size()},
          {"dims", dims_},
          {"seed", seed_},
          {"trees", std::move(trees)}};
}

IsolationForest IsolationForest::from_json(const json& doc) {
  if (doc.value("format", "") != "anomaly-pipeline-iforest/1") {
    throw ValidationError("not an isolation forest document");
  }
  IsolationForest f;
  f.subsample_ = doc.at("subsample_size").get<std::size_t>();
  f.dims_ = doc.at("dims").get<std::size_t>();
  f.seed_ = doc.at("seed").get<std::uint64_t>();
  for (const auto& t : doc.at("trees")) {
    std::vector<IsolationTree::Node> nodes;
    for (const auto& n : t.at("nodes")) {
      IsolationTree::Node node;
      node.size = n.at("size").get<std::size_t>();
      if (n.contains("feature")) {
        node.leaf = false;
        node.feature = n.at("feature").get<std::size_t>();
        node.split = n.at("split").get<double>();
        node.left = n.at("left").get<std::size_t>();
        node.right = n.at("right").get<std::size_t>();
      }
      nodes.push_back(node);
    }
    f.trees_.emplace_back(std::move(nodes), f.dims_,
                          t.at("height_limit").get<std::size_t>());
  }
  if (f.trees_.size() != doc.at("tree_count").get<std::size_t>()) {
    throw ValidationError("isolation forest tree_count does not match trees");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Partitioning

void OutlierRule::validate() const {
  if (contamination.has_value() == score_threshold.has_value()) {
    throw ValidationError(
        "exactly one of contamination and score_threshold must be set");
  }
  if (contamination && !(*contamination > 0.0 && *contamination < 1.0)) {
    throw ValidationError("contamination must lie in (0, 1)");
  }
  if (score_threshold && !std::isfinite(*score_threshold)) {
    throw ValidationError("score_threshold must be finite");
  }
}

Partition partition_outliers(const IsolationForest& forest, const Matrix& rows,
                             const OutlierRule& rule, std::size_t threads) {
  rule.validate();
  Partition p;
  if (rows.empty()) return p;
  if (!forest.fitted()) throw ValidationError("isolation forest is not fitted");
  p.scores = forest.score_all(rows, threads);

  std::vector<bool> is_outlier(rows.size(), false);
  if (rule.score_threshold) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      is_outlier[i] = p.scores[i] > *rule.score_threshold;
    }
  } else {
    const double raw = *rule.contamination * static_cast<double>(rows.size());
    // Guard against 0.05 * 100 landing a hair above 5.
    const auto count = std::min(
        rows.size(), static_cast<std::size_t>(std::ceil(raw - 1e-9)));
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return p.scores[a] > p.scores[b];
                     });
    for (std::size_t k = 0; k < count; ++k) is_outlier[order[k]] = true;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    (is_outlier[i] ? p.outliers : p.inliers).push_back(i);
  }
  return p;
}

}  // namespace anomaly::iforest
