// Copyright 2026 The Horizon Obstacles Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hobs/features.h"
#include "hobs/geometry.h"
#include "hobs/random.h"

namespace hobs {

struct Sample {
  FeatureVector features{};
  Side label = Side::kBelow;
};

struct ForestParams {
  int n_trees = 20;
  int min_samples_leaf = 10;
  int features_per_split = 4;  // ceil(sqrt(13))
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

// Trees are stored as a preorder node list: an internal node's left child
// immediately follows it, its right child sits at `right`.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  std::int32_t right = -1;
  double threshold = 0.0;
  std::uint32_t count_above = 0;
  std::uint32_t count_below = 0;

  bool is_leaf() const { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  // Validates the preorder structure; throws std::invalid_argument.
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& leaf_for(std::span<const double, kNumFeatures> x) const;
  double p_below(std::span<const double, kNumFeatures> x) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct RandomForestModel {
  ForestParams params;
  std::vector<DecisionTree> trees;
  double entropy_threshold = 0.0;

  friend bool operator==(const RandomForestModel&,
                         const RandomForestModel&) = default;
};

// 2p(1-p) with p the fraction of Above samples. Throws
// std::invalid_argument when both counts are zero.
double gini(std::uint64_t count_above, std::uint64_t count_below);

struct Split {
  int feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Gains closer than this are treated as ties.
inline constexpr double kGainTolerance = 1e-12;

// Best Gini split over the candidate features, with both children holding
// at least min_samples_leaf samples. Ties go to the lowest feature index,
// then the lowest threshold. Empty when no split has positive gain.
std::optional<Split> best_split(std::span<const Sample> samples,
                                std::span<const int> candidate_features,
                                int min_samples_leaf);

// Grows one tree on a bootstrap resample. Throws std::invalid_argument when
// fewer than min_samples_leaf samples are given.
DecisionTree train_tree(std::span<const Sample> samples,
                        const ForestParams& params, RandomStream& stream);

// Tree i draws from a stream seeded by derive_seed(params.seed, i), so the
// result does not depend on `threads` (0 = hardware concurrency).
RandomForestModel train_forest(std::span<const Sample> samples,
                               const ForestParams& params, int threads = 0);

// Unweighted mean over trees of the leaf Below fraction.
double predict_p_below(const RandomForestModel& model,
                       std::span<const double, kNumFeatures> features);

// Base-2 binary entropy; throws std::invalid_argument outside [0, 1].
double binary_entropy(double p);

// Versioned text format ("HOBS" tag).
inline constexpr int kModelFormatVersion = 1;
std::string serialize_model(const RandomForestModel& model);
// Throws FormatError on a malformed or truncated document.
RandomForestModel parse_model(std::string_view text);

}  // namespace hobs
