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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hobs/forest.h"
#include "hobs/frame.h"
#include "hobs/geometry.h"
#include "hobs/pipeline.h"

namespace hobs {

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

// Points run from a sentinel threshold above every score, (0, 0), down to a
// sentinel below every score, (1, 1). A pixel counts as detected when its
// score is strictly greater than the threshold.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Throws std::invalid_argument when either list is empty.
RocCurve roc_from_scores(std::span<const double> positives,
                         std::span<const double> negatives);

// Per-frame inputs for the below-horizon ROC.
struct EvalFrame {
  const UncertaintyMap* entropy = nullptr;
  const GroundTruthMask* mask = nullptr;
  const HorizonField* field = nullptr;
};

struct BelowHorizonScores {
  std::vector<double> obstacle;  // positives
  std::vector<double> floor;     // negatives
};

// Raw (unfiltered) entropies of below-horizon, non-Ignore pixels.
// Throws std::invalid_argument on a size mismatch.
BelowHorizonScores collect_below_horizon(std::span<const EvalFrame> frames);

// Throws std::invalid_argument when there are no positives or negatives.
RocCurve roc_below_horizon(std::span<const EvalFrame> frames);

// Mann-Whitney pair-ordering statistic with ties counted as one half.
double auc_oracle(std::span<const double> positives,
                  std::span<const double> negatives);

struct OperatingPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Rates produced by thresholding at `threshold`.
OperatingPoint operating_point(const RocCurve& curve, double threshold);

struct ClassificationTally {
  std::size_t correct = 0;
  std::size_t total = 0;

  double ratio() const {
    return total ? static_cast<double>(correct) / static_cast<double>(total)
                 : 0.0;
  }
  ClassificationTally& operator+=(const ClassificationTally& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
};

// Pixels where (p_below >= 0.5) agrees with the horizon side.
ClassificationTally tally_classification(const Grid<double>& p_below,
                                         const HorizonField& field);

// Pixel-weighted accuracy over all pixels of the given frames.
double classification_accuracy(const RandomForestModel& model,
                               std::span<const Frame> frames,
                               const CameraIntrinsics& intrinsics);

// `threshold,fpr,tpr` rows then `# auc=<value>`.
std::string roc_csv(const RocCurve& curve);
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

}  // namespace hobs
