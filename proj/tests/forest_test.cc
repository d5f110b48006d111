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

#include "hobs/forest.h"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "hobs/errors.h"
#include "oracles.h"

namespace hobs {
namespace {

Sample make(double f0, Side label, double f1 = 0.0) {
  Sample s;
  s.features.fill(0.0);
  s.features[0] = f0;
  s.features[1] = f1;
  s.label = label;
  return s;
}

std::vector<Sample> separable_set() {
  std::vector<Sample> out;
  for (int i = 0; i < 20; ++i) out.push_back(make(0.1, Side::kAbove));
  for (int i = 0; i < 20; ++i) out.push_back(make(0.9, Side::kBelow));
  return out;
}

std::vector<Sample> random_set(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    const bool below = i % 2 == 0;
    for (auto& f : s.features) f = noise(rng);
    s.features[2] += below ? 1.0 : -1.0;
    s.features[7] += below ? 0.5 : -0.5;
    s.label = below ? Side::kBelow : Side::kAbove;
    out.push_back(s);
  }
  return out;
}

void for_each_leaf(const DecisionTree& tree,
                   const std::function<void(const TreeNode&)>& fn) {
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) fn(n);
  }
}

TEST(Gini, Values) {
  EXPECT_EQ(gini(10, 0), 0.0);
  EXPECT_EQ(gini(0, 7), 0.0);
  EXPECT_EQ(gini(5, 5), 0.5);
  EXPECT_DOUBLE_EQ(gini(3, 1), 0.375);
  EXPECT_THROW(gini(0, 0), std::invalid_argument);
}

TEST(BestSplit, PerfectSeparation) {
  const auto samples = separable_set();
  const std::vector<int> features{0, 1};
  const auto split = best_split(samples, features, 10);
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->feature, 0);
  EXPECT_DOUBLE_EQ(split->threshold, 0.5);
  EXPECT_DOUBLE_EQ(split->gain, 0.5);
}

TEST(BestSplit, IdenticalFeatureVectorsGiveNone) {
  std::vector<Sample> samples;
  for (int i = 0; i < 30; ++i) {
    samples.push_back(make(0.3, i % 2 ? Side::kAbove : Side::kBelow));
  }
  const std::vector<int> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  EXPECT_FALSE(best_split(samples, all, 1).has_value());
}

TEST(BestSplit, PureLabelsGiveNone) {
  std::vector<Sample> samples;
  for (int i = 0; i < 30; ++i) samples.push_back(make(i * 0.1, Side::kBelow));
  const std::vector<int> f{0};
  EXPECT_FALSE(best_split(samples, f, 1).has_value());
}

TEST(BestSplit, RespectsMinLeaf) {
  auto samples = separable_set();
  const std::vector<int> f{0};
  EXPECT_FALSE(best_split(samples, f, 21).has_value());
}

TEST(BestSplit, TieGoesToLowestFeature) {
  // Features 0 and 1 separate the labels identically.
  std::vector<Sample> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(make(0.0, Side::kAbove, 0.0));
  for (int i = 0; i < 10; ++i) samples.push_back(make(1.0, Side::kBelow, 1.0));
  const std::vector<int> f{1, 0};
  EXPECT_EQ(best_split(samples, f, 1)->feature, 0);
}

TEST(BestSplit, TieGoesToLowestThreshold) {
  // A/B/A pattern in one feature: splitting either gap gains equally.
  std::vector<Sample> samples;
  for (int i = 0; i < 5; ++i) samples.push_back(make(0.0, Side::kAbove));
  for (int i = 0; i < 10; ++i) samples.push_back(make(1.0, Side::kBelow));
  for (int i = 0; i < 5; ++i) samples.push_back(make(2.0, Side::kAbove));
  const std::vector<int> f{0};
  EXPECT_DOUBLE_EQ(best_split(samples, f, 1)->threshold, 0.5);
}

TEST(BestSplitProperty, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 49);
    std::vector<Sample> samples;
    for (int i = 0; i < n; ++i) {
      Sample s;
      s.features.fill(0.0);
      // Coarse values force duplicates and gain ties.
      s.features[0] = static_cast<double>(rng() % 6);
      s.features[1] = static_cast<double>(rng() % 4) * 0.25;
      s.label = rng() % 2 ? Side::kAbove : Side::kBelow;
      samples.push_back(s);
    }
    const int min_leaf = 1 + static_cast<int>(rng() % 5);
    const std::vector<int> f{0, 1};
    const auto got = best_split(samples, f, min_leaf);
    const auto want = oracle::exhaustive_split(samples, f, min_leaf);
    ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
    if (!got) continue;
    EXPECT_EQ(got->feature, want->feature) << "trial " << trial;
    EXPECT_NEAR(got->threshold, want->threshold, 1e-12) << "trial " << trial;
    EXPECT_NEAR(got->gain, want->gain, 1e-12) << "trial " << trial;
  }
}

TEST(TrainTree, PureRootIsSingleLeaf) {
  std::vector<Sample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(make(i * 0.01, Side::kBelow));
  ForestParams params;
  RandomStream stream(1);
  const DecisionTree tree = train_tree(samples, params, stream);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.nodes()[0].count_above, 0u);
  EXPECT_EQ(tree.nodes()[0].count_below, 20u);
}

TEST(TrainTree, SeparableSetGivesDepthOneTree) {
  const auto samples = separable_set();
  ForestParams params;
  params.features_per_split = kNumFeatures;  // feature 0 always drawn
  params.min_samples_leaf = 5;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomStream stream(seed);
    const DecisionTree tree = train_tree(samples, params, stream);
    const auto& nodes = tree.nodes();
    // The bootstrap may leave one class short of 5; only check the
    // structure when a split was possible.
    if (nodes.size() == 1) continue;
    ASSERT_EQ(nodes.size(), 3u);
    EXPECT_EQ(nodes[0].feature, 0);
    EXPECT_DOUBLE_EQ(nodes[0].threshold, 0.5);
    EXPECT_EQ(nodes[1].count_below, 0u);
    EXPECT_EQ(nodes[2].count_above, 0u);
  }
}

TEST(TrainTree, DeterministicPerStream) {
  const auto samples = random_set(300, 4);
  ForestParams params;
  RandomStream a(77), b(77);
  EXPECT_EQ(train_tree(samples, params, a), train_tree(samples, params, b));
}

TEST(TrainTree, TooFewSamplesThrows) {
  std::vector<Sample> samples(5, make(0.0, Side::kBelow));
  ForestParams params;
  RandomStream stream(0);
  EXPECT_THROW(train_tree(samples, params, stream), std::invalid_argument);
}

TEST(TrainForest, TreeCountAndDeterminism) {
  const auto samples = random_set(400, 5);
  ForestParams params;
  params.seed = 9;
  const auto m1 = train_forest(samples, params, 1);
  const auto m2 = train_forest(samples, params, 4);
  EXPECT_EQ(m1.trees.size(), 20u);
  EXPECT_EQ(serialize_model(m1), serialize_model(m2));
}

TEST(TrainForest, DifferentSeedsDiffer) {
  const auto samples = random_set(400, 6);
  ForestParams a, b;
  a.seed = 1;
  b.seed = 2;
  EXPECT_NE(train_forest(samples, a), train_forest(samples, b));
}

TEST(TrainForest, LeavesHoldAtLeastMinSamples) {
  const auto samples = random_set(1000, 7);
  for (int min_leaf : {1, 3, 10, 25}) {
    ForestParams params;
    params.min_samples_leaf = min_leaf;
    params.n_trees = 5;
    const auto model = train_forest(samples, params);
    for (const auto& tree : model.trees) {
      for_each_leaf(tree, [&](const TreeNode& leaf) {
        ASSERT_GE(leaf.count_above + leaf.count_below,
                  static_cast<std::uint32_t>(min_leaf));
      });
    }
  }
}

TEST(TrainForest, SeparableClustersAreLearnedExactly) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<Sample> samples;
  for (int i = 0; i < 400; ++i) {
    Sample s;
    const bool below = i % 2;
    for (auto& f : s.features) f = (below ? 1.0 : 0.0) + noise(rng);
    s.label = below ? Side::kBelow : Side::kAbove;
    samples.push_back(s);
  }
  const auto model = train_forest(samples, ForestParams{});
  for (const auto& s : samples) {
    const bool predicted_below = predict_p_below(model, s.features) >= 0.5;
    ASSERT_EQ(predicted_below, s.label == Side::kBelow);
  }
}

TEST(Predict, LeafFractionsAndMean) {
  RandomForestModel model;
  model.params.n_trees = 1;
  model.trees.emplace_back(std::vector<TreeNode>{{-1, -1, 0.0, 3, 7}});
  FeatureVector x{};
  EXPECT_DOUBLE_EQ(predict_p_below(model, x), 0.7);

  // Two single-leaf trees at 0.6 and 0.8.
  const DecisionTree a(std::vector<TreeNode>{{-1, -1, 0.0, 2, 3}});
  const DecisionTree b(std::vector<TreeNode>{{-1, -1, 0.0, 1, 4}});
  model.trees = {a, b};
  model.params.n_trees = 2;
  EXPECT_DOUBLE_EQ(predict_p_below(model, x), 0.7);
}

TEST(Predict, InUnitIntervalAndOrderInvariant) {
  const auto samples = random_set(500, 12);
  ForestParams params;
  params.n_trees = 7;
  auto model = train_forest(samples, params);
  auto reversed = model;
  std::reverse(reversed.trees.begin(), reversed.trees.end());
  const auto queries = random_set(200, 13);
  for (const auto& q : queries) {
    const double p = predict_p_below(model, q.features);
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
    ASSERT_NEAR(p, predict_p_below(reversed, q.features), 1e-15);
  }
}

TEST(Entropy, Values) {
  EXPECT_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.9), 0.4689955935892811, 1e-12);
  EXPECT_THROW(binary_entropy(-0.01), std::invalid_argument);
  EXPECT_THROW(binary_entropy(1.01), std::invalid_argument);
  EXPECT_THROW(binary_entropy(NAN), std::invalid_argument);
}

TEST(Entropy, Symmetric) {
  for (int i = 0; i <= 1000; ++i) {
    const double p = i / 1000.0;
    ASSERT_NEAR(binary_entropy(p), binary_entropy(1.0 - p), 1e-12);
  }
}

TEST(ModelText, RoundTripPreservesPredictions) {
  const auto samples = random_set(600, 14);
  ForestParams params;
  params.n_trees = 6;
  params.seed = 123456789012345ULL;
  auto model = train_forest(samples, params);
  model.entropy_threshold = 0.1 + 0.2;  // not exactly representable in short form
  const std::string text = serialize_model(model);
  const auto back = parse_model(text);
  EXPECT_EQ(back, model);
  EXPECT_EQ(serialize_model(back), text);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    FeatureVector x;
    for (auto& f : x) f = d(rng);
    ASSERT_EQ(predict_p_below(model, x), predict_p_below(back, x));
  }
}

TEST(ModelText, RejectsBadDocuments) {
  const auto samples = random_set(200, 15);
  ForestParams params;
  params.n_trees = 2;
  const std::string text = serialize_model(train_forest(samples, params));
  EXPECT_THROW(parse_model(text.substr(0, text.size() / 2)), FormatError);
  EXPECT_THROW(parse_model(text.substr(0, text.size() - 4)), FormatError);
  std::string v2 = text;
  v2.replace(0, 6, "HOBS 2");
  try {
    parse_model(v2);
    FAIL() << "expected a version error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  EXPECT_THROW(parse_model("P6\n1 1\n255\n"), FormatError);
  EXPECT_THROW(parse_model(""), FormatError);
}

TEST(ModelText, LinksPreorderRecords) {
  const std::string text =
      "HOBS 1\nn_trees 1\nmin_samples_leaf 1\nfeatures_per_split 4\n"
      "seed 0\nentropy_threshold 0.25\n"
      "tree 5\nI 0 0.5\nL 1 0\nI 1 2\nL 0 1\nL 1 1\nend\n";
  const auto model = parse_model(text);
  const auto& nodes = model.trees[0].nodes();
  EXPECT_EQ(nodes[0].right, 2);
  EXPECT_EQ(nodes[2].right, 4);
  FeatureVector x{};
  x[0] = 0.7;
  x[1] = 3.0;
  EXPECT_DOUBLE_EQ(predict_p_below(model, x), 0.5);
  // One record too few for the declared structure.
  const std::string broken =
      "HOBS 1\nn_trees 1\nmin_samples_leaf 1\nfeatures_per_split 4\n"
      "seed 0\nentropy_threshold 0.25\ntree 2\nI 0 0.5\nL 1 0\nend\n";
  EXPECT_THROW(parse_model(broken), FormatError);
}

}  // namespace
}  // namespace hobs
