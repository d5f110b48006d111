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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hobs/errors.h"
#include "hobs/textio.h"

namespace hobs {

void ForestParams::validate() const {
  if (n_trees < 1) throw std::invalid_argument("forest: n_trees must be >= 1");
  if (min_samples_leaf < 1) {
    throw std::invalid_argument("forest: min_samples_leaf must be >= 1");
  }
  if (features_per_split < 1 || features_per_split > kNumFeatures) {
    throw std::invalid_argument("forest: features_per_split must be in [1, 13]");
  }
}

namespace {

// Returns one past the last node of the subtree rooted at `index`.
std::size_t subtree_end(const std::vector<TreeNode>& nodes, std::size_t index,
                        int depth) {
  if (index >= nodes.size()) {
    throw std::invalid_argument("tree: child index past the end");
  }
  if (depth > 100000) throw std::invalid_argument("tree: nesting too deep");
  const TreeNode& node = nodes[index];
  if (node.is_leaf()) {
    if (node.count_above + node.count_below == 0) {
      throw std::invalid_argument("tree: empty leaf");
    }
    return index + 1;
  }
  if (node.feature >= kNumFeatures) {
    throw std::invalid_argument("tree: feature index out of range");
  }
  const std::size_t left_end = subtree_end(nodes, index + 1, depth + 1);
  if (node.right < 0 || static_cast<std::size_t>(node.right) != left_end) {
    throw std::invalid_argument("tree: right child is not preorder");
  }
  return subtree_end(nodes, left_end, depth + 1);
}

double weighted_child_impurity(std::uint64_t left_above, std::uint64_t left_below,
                               std::uint64_t right_above,
                               std::uint64_t right_below) {
  const double nl = static_cast<double>(left_above + left_below);
  const double nr = static_cast<double>(right_above + right_below);
  const double n = nl + nr;
  return nl / n * gini(left_above, left_below) +
         nr / n * gini(right_above, right_below);
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  // `lo` must route left (value < threshold).
  return mid > lo ? mid : hi;
}

struct ValueLabel {
  double value;
  std::uint8_t below;
};

// Core of best_split over a subset of sample indices. `features` must be
// sorted ascending.
std::optional<Split> best_split_indices(std::span<const Sample> samples,
                                        std::span<const std::uint32_t> idx,
                                        std::span<const int> features,
                                        int min_samples_leaf,
                                        std::vector<ValueLabel>& scratch) {
  const std::size_t n = idx.size();
  const std::size_t min_leaf = static_cast<std::size_t>(min_samples_leaf);
  if (n < 2 * min_leaf || n < 2) return std::nullopt;
  std::uint64_t total_below = 0;
  for (auto i : idx) total_below += samples[i].label == Side::kBelow;
  const std::uint64_t total_above = n - total_below;
  if (total_below == 0 || total_above == 0) return std::nullopt;
  const double parent = gini(total_above, total_below);

  std::optional<Split> best;
  double best_gain = 0.0;
  scratch.resize(n);
  for (int f : features) {
    for (std::size_t k = 0; k < n; ++k) {
      const Sample& s = samples[idx[k]];
      scratch[k] = {s.features[f], s.label == Side::kBelow};
    }
    std::sort(scratch.begin(), scratch.end(),
              [](const ValueLabel& a, const ValueLabel& b) {
                return a.value < b.value;
              });
    std::uint64_t left_below = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_below += scratch[k].below;
      if (scratch[k].value == scratch[k + 1].value) continue;
      const std::size_t nl = k + 1;
      if (nl < min_leaf) continue;
      if (n - nl < min_leaf) break;
      const std::uint64_t left_above = nl - left_below;
      const double gain =
          parent - weighted_child_impurity(left_above, left_below,
                                           total_above - left_above,
                                           total_below - left_below);
      if (gain > best_gain + kGainTolerance) {
        best_gain = gain;
        best = Split{f, midpoint(scratch[k].value, scratch[k + 1].value), gain};
      }
    }
  }
  return best;
}

class TreeGrower {
 public:
  TreeGrower(std::span<const Sample> samples, const ForestParams& params,
             RandomStream& stream)
      : samples_(samples), params_(params), stream_(stream) {}

  std::vector<TreeNode> grow(std::vector<std::uint32_t> idx) {
    nodes_.clear();
    grow_node(idx);
    return std::move(nodes_);
  }

 private:
  void grow_node(std::span<std::uint32_t> idx) {
    const std::size_t self = nodes_.size();
    nodes_.emplace_back();

    std::optional<Split> split;
    if (idx.size() >= 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
      split = best_split_indices(samples_, idx, draw_features(),
                                 params_.min_samples_leaf, scratch_);
    }
    if (!split) {
      TreeNode& leaf = nodes_[self];
      for (auto i : idx) {
        if (samples_[i].label == Side::kBelow) {
          ++leaf.count_below;
        } else {
          ++leaf.count_above;
        }
      }
      return;
    }
    const int f = split->feature;
    const double t = split->threshold;
    auto mid = std::partition(idx.begin(), idx.end(), [&](std::uint32_t i) {
      return samples_[i].features[f] < t;
    });
    const auto n_left = static_cast<std::size_t>(mid - idx.begin());
    nodes_[self].feature = f;
    nodes_[self].threshold = t;
    grow_node(idx.subspan(0, n_left));
    nodes_[self].right = static_cast<std::int32_t>(nodes_.size());
    grow_node(idx.subspan(n_left));
  }

  // Distinct indices without replacement, returned in ascending order.
  std::span<const int> draw_features() {
    std::iota(pool_.begin(), pool_.end(), 0);
    const int k = params_.features_per_split;
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(stream_.uniform_index(kNumFeatures - i));
      std::swap(pool_[i], pool_[j]);
    }
    std::sort(pool_.begin(), pool_.begin() + k);
    return std::span<const int>(pool_.data(), k);
  }

  std::span<const Sample> samples_;
  const ForestParams& params_;
  RandomStream& stream_;
  std::vector<TreeNode> nodes_;
  std::vector<ValueLabel> scratch_;
  std::array<int, kNumFeatures> pool_{};
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("tree: no nodes");
  if (subtree_end(nodes_, 0, 0) != nodes_.size()) {
    throw std::invalid_argument("tree: trailing nodes after the root subtree");
  }
}

const TreeNode& DecisionTree::leaf_for(
    std::span<const double, kNumFeatures> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = x[n.feature] < n.threshold ? i + 1 : static_cast<std::size_t>(n.right);
  }
  return nodes_[i];
}

double DecisionTree::p_below(std::span<const double, kNumFeatures> x) const {
  const TreeNode& leaf = leaf_for(x);
  return static_cast<double>(leaf.count_below) /
         static_cast<double>(leaf.count_above + leaf.count_below);
}

double gini(std::uint64_t count_above, std::uint64_t count_below) {
  const std::uint64_t n = count_above + count_below;
  if (n == 0) throw std::invalid_argument("gini: empty node");
  const double p = static_cast<double>(count_above) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

std::optional<Split> best_split(std::span<const Sample> samples,
                                std::span<const int> candidate_features,
                                int min_samples_leaf) {
  if (samples.empty()) throw std::invalid_argument("best_split: no samples");
  std::vector<int> features(candidate_features.begin(),
                            candidate_features.end());
  for (int f : features) {
    if (f < 0 || f >= kNumFeatures) {
      throw std::invalid_argument("best_split: feature index out of range");
    }
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  std::vector<std::uint32_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::vector<ValueLabel> scratch;
  return best_split_indices(samples, idx, features, min_samples_leaf, scratch);
}

DecisionTree train_tree(std::span<const Sample> samples,
                        const ForestParams& params, RandomStream& stream) {
  params.validate();
  if (samples.size() < static_cast<std::size_t>(params.min_samples_leaf)) {
    throw std::invalid_argument("train_tree: fewer samples than min_samples_leaf");
  }
  if (samples.size() > UINT32_MAX) {
    throw std::invalid_argument("train_tree: too many samples");
  }
  std::vector<std::uint32_t> boot(samples.size());
  for (auto& i : boot) {
    i = static_cast<std::uint32_t>(stream.uniform_index(samples.size()));
  }
  TreeGrower grower(samples, params, stream);
  return DecisionTree(grower.grow(std::move(boot)));
}

RandomForestModel train_forest(std::span<const Sample> samples,
                               const ForestParams& params, int threads) {
  params.validate();
  if (samples.size() < static_cast<std::size_t>(params.min_samples_leaf)) {
    throw std::invalid_argument(
        "train_forest: fewer samples than min_samples_leaf");
  }
  RandomForestModel model;
  model.params = params;
  model.trees.resize(params.n_trees);

  auto train_one = [&](int i) {
    RandomStream stream(derive_seed(params.seed, static_cast<std::uint64_t>(i)));
    model.trees[i] = train_tree(samples, params, stream);
  };

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, params.n_trees);
  if (workers == 1) {
    for (int i = 0; i < params.n_trees; ++i) train_one(i);
    return model;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < params.n_trees; i = next++) {
        try {
          train_one(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return model;
}

double predict_p_below(const RandomForestModel& model,
                       std::span<const double, kNumFeatures> features) {
  if (model.trees.empty()) {
    throw std::invalid_argument("predict_p_below: model has no trees");
  }
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.p_below(features);
  return sum / static_cast<double>(model.trees.size());
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binary_entropy: p outside [0, 1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return std::clamp(h, 0.0, 1.0);
}

std::string serialize_model(const RandomForestModel& model) {
  std::ostringstream out;
  out << "HOBS " << kModelFormatVersion << '\n'
      << "n_trees " << model.params.n_trees << '\n'
      << "min_samples_leaf " << model.params.min_samples_leaf << '\n'
      << "features_per_split " << model.params.features_per_split << '\n'
      << "seed " << model.params.seed << '\n'
      << "entropy_threshold " << format_double(model.entropy_threshold) << '\n';
  for (const auto& tree : model.trees) {
    out << "tree " << tree.nodes().size() << '\n';
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) {
        out << "L " << node.count_above << ' ' << node.count_below << '\n';
      } else {
        out << "I " << node.feature << ' ' << format_double(node.threshold)
            << '\n';
      }
    }
  }
  out << "end\n";
  return out.str();
}

namespace {

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : lines_(split(text, '\n')) {}

  RandomForestModel parse() {
    const auto header = fields();
    if (header.size() != 2 || header[0] != "HOBS") {
      fail("missing HOBS header");
    }
    const auto version = parse_int(header[1]);
    if (!version) fail("bad version");
    if (*version != kModelFormatVersion) {
      throw FormatError("model: unsupported format version " + header[1] +
                        " (expected " + std::to_string(kModelFormatVersion) +
                        ")");
    }
    RandomForestModel model;
    model.params.n_trees = static_cast<int>(keyed_int("n_trees"));
    model.params.min_samples_leaf = static_cast<int>(keyed_int("min_samples_leaf"));
    model.params.features_per_split =
        static_cast<int>(keyed_int("features_per_split"));
    {
      const auto f = fields();
      unsigned long long seed = 0;
      if (f.size() != 2 || f[0] != "seed" ||
          std::from_chars(f[1].data(), f[1].data() + f[1].size(), seed).ptr !=
              f[1].data() + f[1].size()) {
        fail("expected 'seed <uint64>'");
      }
      model.params.seed = seed;
    }
    {
      const auto f = fields();
      if (f.size() != 2 || f[0] != "entropy_threshold") {
        fail("expected 'entropy_threshold <real>'");
      }
      const auto t = parse_double(f[1]);
      if (!t || !(*t >= 0.0 && *t <= 1.0)) fail("entropy_threshold not in [0, 1]");
      model.entropy_threshold = *t;
    }
    try {
      model.params.validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    for (int t = 0; t < model.params.n_trees; ++t) {
      model.trees.push_back(parse_tree());
    }
    const auto tail = fields();
    if (tail.size() != 1 || tail[0] != "end") fail("expected 'end'");
    while (pos_ < lines_.size()) {
      if (!trim(lines_[pos_]).empty()) fail("trailing content after 'end'");
      ++pos_;
    }
    return model;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("model: line " + std::to_string(pos_) + ": " + what);
  }

  std::vector<std::string> fields() {
    while (pos_ < lines_.size()) {
      const std::string line = trim(lines_[pos_++]);
      if (line.empty()) continue;
      std::vector<std::string> out;
      std::istringstream in(line);
      std::string tok;
      while (in >> tok) out.push_back(tok);
      return out;
    }
    throw FormatError("model: unexpected end of file (truncated?)");
  }

  long long keyed_int(const char* key) {
    const auto f = fields();
    if (f.size() != 2 || f[0] != key) fail(std::string("expected '") + key + "'");
    const auto value = parse_int(f[1]);
    if (!value) fail(std::string("bad integer for ") + key);
    return *value;
  }

  DecisionTree parse_tree() {
    const auto head = fields();
    if (head.size() != 2 || head[0] != "tree") fail("expected 'tree <count>'");
    const auto count = parse_int(head[1]);
    if (!count || *count < 1) fail("bad node count");
    std::vector<TreeNode> nodes;
    nodes.reserve(static_cast<std::size_t>(*count));
    for (long long i = 0; i < *count; ++i) {
      const auto f = fields();
      TreeNode node;
      if (f.size() == 3 && f[0] == "I") {
        const auto feature = parse_int(f[1]);
        const auto threshold = parse_double(f[2]);
        if (!feature || *feature < 0 || *feature >= kNumFeatures || !threshold) {
          fail("bad internal record");
        }
        node.feature = static_cast<std::int32_t>(*feature);
        node.threshold = *threshold;
      } else if (f.size() == 3 && f[0] == "L") {
        const auto above = parse_int(f[1]);
        const auto below = parse_int(f[2]);
        if (!above || !below || *above < 0 || *below < 0 ||
            *above > UINT32_MAX || *below > UINT32_MAX) {
          fail("bad leaf record");
        }
        node.count_above = static_cast<std::uint32_t>(*above);
        node.count_below = static_cast<std::uint32_t>(*below);
      } else {
        fail("expected an 'I' or 'L' record");
      }
      nodes.push_back(node);
    }
    link(nodes);
    try {
      return DecisionTree(std::move(nodes));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  // Fills in right-child indices from the preorder layout.
  void link(std::vector<TreeNode>& nodes) {
    std::vector<std::size_t> pending;  // internal nodes awaiting a right child
    bool root_done = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (root_done) fail("tree has records past its root subtree");
      if (!nodes[i].is_leaf()) {
        pending.push_back(i);
        continue;
      }
      // A finished left subtree hands the next index to its parent as the
      // right child; a finished right subtree closes the parent.
      while (true) {
        if (pending.empty()) {
          root_done = true;
          break;
        }
        TreeNode& parent = nodes[pending.back()];
        if (parent.right < 0) {
          parent.right = static_cast<std::int32_t>(i + 1);
          break;
        }
        pending.pop_back();
      }
    }
    if (!root_done) fail("tree record list is truncated");
  }

  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

RandomForestModel parse_model(std::string_view text) {
  return ModelParser(text).parse();
}

}  // namespace hobs
