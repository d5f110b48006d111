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

#include "hobs/evaluation.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "hobs/textio.h"

namespace hobs {

RocCurve roc_from_scores(std::span<const double> positives,
                         std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw std::invalid_argument("roc: need at least one positive and negative");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double n_pos = static_cast<double>(positives.size());
  const double n_neg = static_cast<double>(negatives.size());
  RocCurve curve;
  curve.points.push_back({all.front().score + 1.0, 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double s = all[i].score;
    // Only scores strictly above s are detected at threshold s.
    curve.points.push_back({s, fp / n_neg, tp / n_pos});
    for (; i < all.size() && all[i].score == s; ++i) {
      if (all[i].positive) {
        ++tp;
      } else {
        ++fp;
      }
    }
  }
  curve.points.push_back({all.back().score - 1.0, 1.0, 1.0});

  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  curve.auc = area;
  return curve;
}

BelowHorizonScores collect_below_horizon(std::span<const EvalFrame> frames) {
  BelowHorizonScores out;
  for (const auto& f : frames) {
    if (!f.entropy || !f.mask || !f.field) {
      throw std::invalid_argument("roc: incomplete evaluation frame");
    }
    if (!f.entropy->same_shape(*f.mask) ||
        !f.entropy->same_shape(f.field->width(), f.field->height())) {
      throw std::invalid_argument("roc: map, mask and horizon sizes differ");
    }
    const auto& labels = f.field->labels();
    for (int v = 0; v < f.entropy->height(); ++v) {
      for (int u = 0; u < f.entropy->width(); ++u) {
        if (labels(u, v) != Side::kBelow) continue;
        switch ((*f.mask)(u, v)) {
          case MaskClass::kObstacle:
            out.obstacle.push_back((*f.entropy)(u, v));
            break;
          case MaskClass::kFloor:
            out.floor.push_back((*f.entropy)(u, v));
            break;
          case MaskClass::kIgnore:
            break;
        }
      }
    }
  }
  return out;
}

RocCurve roc_below_horizon(std::span<const EvalFrame> frames) {
  const BelowHorizonScores scores = collect_below_horizon(frames);
  if (scores.obstacle.empty()) {
    throw std::invalid_argument("roc: no obstacle pixels below the horizon");
  }
  if (scores.floor.empty()) {
    throw std::invalid_argument("roc: no floor pixels below the horizon");
  }
  return roc_from_scores(scores.obstacle, scores.floor);
}

double auc_oracle(std::span<const double> positives,
                  std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw std::invalid_argument("auc_oracle: empty score list");
  }
  double wins = 0.0;
  for (double p : positives) {
    for (double n : negatives) {
      if (p > n) {
        wins += 1.0;
      } else if (p == n) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(positives.size()) *
                 static_cast<double>(negatives.size()));
}

OperatingPoint operating_point(const RocCurve& curve, double threshold) {
  // Thresholds decrease along the curve. Detection at `threshold` equals
  // detection at the largest curve threshold not above it.
  for (const auto& p : curve.points) {
    if (p.threshold <= threshold) return {p.fpr, p.tpr};
  }
  return {1.0, 1.0};
}

ClassificationTally tally_classification(const Grid<double>& p_below,
                                         const HorizonField& field) {
  if (!p_below.same_shape(field.width(), field.height())) {
    throw std::invalid_argument("accuracy: prediction and horizon sizes differ");
  }
  ClassificationTally t;
  const auto& labels = field.labels();
  for (std::size_t i = 0; i < p_below.size(); ++i) {
    const bool predicted_below = p_below.data()[i] >= 0.5;
    const bool below = labels.data()[i] == Side::kBelow;
    t.correct += predicted_below == below;
    ++t.total;
  }
  return t;
}

double classification_accuracy(const RandomForestModel& model,
                               std::span<const Frame> frames,
                               const CameraIntrinsics& intrinsics) {
  if (frames.empty()) {
    throw std::invalid_argument("accuracy: need at least one frame");
  }
  ClassificationTally total;
  for (const auto& f : frames) {
    const HorizonField field(intrinsics, f.attitude);
    total += tally_classification(predict_image(model, f.image).p_below, field);
  }
  return total.ratio();
}

std::string roc_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
        << format_double(p.tpr) << '\n';
  }
  out << "# auc=" << format_double(curve.auc) << '\n';
  return out.str();
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  write_file_atomic(path, roc_csv(curve));
}

}  // namespace hobs
