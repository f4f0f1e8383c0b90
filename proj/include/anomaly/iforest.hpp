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

#ifndef ANOMALY_IFOREST_HPP_
#define ANOMALY_IFOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

namespace anomaly::iforest {

using Matrix = std::vector<std::vector<double>>;

// Average path length of an unsuccessful search in a binary search tree of
// n nodes: 2 H(n-1) - 2 (n-1) / n. Exact harmonic sum up to n = 10^4, the
// log approximation above. Throws ValidationError for n < 2.
double c_normalizer(std::size_t n);

// Flattened binary tree. Internal nodes hold (feature, split) and child
// indices; rows with x[feature] < split go left.
class IsolationTree {
 public:
  struct Node {
    std::size_t feature = 0;
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t size = 0;  // samples reaching this node during fit
    bool leaf = true;

    friend bool operator==(const Node&, const Node&) = default;
  };

  IsolationTree() = default;
  explicit IsolationTree(std::vector<Node> nodes, std::size_t dims,
                         std::size_t height_limit);

  // Edges from the root to x's leaf, plus c(m) when that leaf held m > 1
  // samples.
  double path_length(std::span<const double> x) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t dims() const { return dims_; }
  std::size_t height_limit() const { return height_limit_; }
  std::size_t height() const;

  friend bool operator==(const IsolationTree&, const IsolationTree&) = default;

 private:
  std::vector<Node> nodes_;
  std::size_t dims_ = 0;
  std::size_t height_limit_ = 0;
};

// Builds one tree over `rows` of `data` with height limit ceil(log2(n)).
// Each split picks a feature uniformly among those not constant on the
// node's rows and a split value uniformly inside the open (min, max) range.
IsolationTree build_tree(const Matrix& data, std::vector<std::size_t> rows,
                         std::mt19937_64& rng);

struct ForestOptions {
  std::size_t tree_count = 100;
  std::size_t subsample_size = 256;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

class IsolationForest {
 public:
  IsolationForest() = default;

  bool fitted() const { return !trees_.empty(); }
  const std::vector<IsolationTree>& trees() const { return trees_; }
  // Subsample size actually used: min(requested, rows).
  std::size_t subsample_size() const { return subsample_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t dims() const { return dims_; }

  double mean_path_length(std::span<const double> x) const;
  // 2^(-E[h(x)] / c(n)), in (0, 1).
  double score(std::span<const double> x) const;
  std::vector<double> score_all(const Matrix& rows, std::size_t threads = 1) const;

  nlohmann::json to_json() const;
  static IsolationForest from_json(const nlohmann::json& doc);

  friend IsolationForest fit_forest(const Matrix& data,
                                    const ForestOptions& options);
  friend bool operator==(const IsolationForest&,
                         const IsolationForest&) = default;

 private:
  std::vector<IsolationTree> trees_;
  std::size_t subsample_ = 0;
  std::size_t dims_ = 0;
  std::uint64_t seed_ = 0;
};

// Tree t draws its subsample and splits from an RNG seeded by (seed, t), so
// the forest does not depend on options.threads.
IsolationForest fit_forest(const Matrix& data, const ForestOptions& options);

struct Partition {
  std::vector<std::size_t> inliers;
  std::vector<std::size_t> outliers;
  std::vector<double> scores;
};

// Exactly one rule applies: either the top ceil(contamination * n) scores
// (ties to the lower row index) or every row with score > threshold.
struct OutlierRule {
  std::optional<double> contamination;
  std::optional<double> score_threshold;

  static OutlierRule by_contamination(double fraction) {
    return {fraction, std::nullopt};
  }
  static OutlierRule by_threshold(double threshold) {
    return {std::nullopt, threshold};
  }
  void validate() const;
};

Partition partition_outliers(const IsolationForest& forest, const Matrix& rows,
                             const OutlierRule& rule, std::size_t threads = 1);

}  // namespace anomaly::iforest

#endif  // ANOMALY_IFOREST_HPP_
