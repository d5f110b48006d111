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

#include <array>
#include <cstdint>
#include <span>

#include "hobs/image.h"

namespace hobs {

inline constexpr int kNumFeatures = 13;

// Channel layout of a feature vector.
enum FeatureChannel : int {
  kHue = 0,
  kSaturation = 1,
  kValue = 2,
  kLbp = 3,
  kLawsFirst = 4,  // L3L3, L3E3, L3S3, E3L3, E3E3, E3S3, S3L3, S3E3, S3S3
};

using FeatureVector = std::array<double, kNumFeatures>;

struct Hsv {
  double h = 0.0;  // [0, 1), fraction of a full turn
  double s = 0.0;
  double v = 0.0;
};

Hsv rgb_to_hsv(double r, double g, double b);

// Rec.601 luma.
double luma(const Rgb& c);
GrayImage to_gray(const RgbImage& image);

// LBP sampling: 24 points on a circle of radius 3.
inline constexpr int kLbpPoints = 24;
inline constexpr double kLbpRadius = 3.0;
inline constexpr int kLbpNonUniform = kLbpPoints + 1;

// Rotation-invariant uniform mapping of a 24-bit circular pattern: the
// number of set bits when the pattern has at most two 0/1 transitions,
// otherwise 25.
int riu2_code(std::uint32_t pattern);

// Bit k is set when sample k (angle 2*pi*k/24) is >= the center value.
std::uint32_t lbp_pattern(const GrayImage& gray, int u, int v);
int lbp_code(const GrayImage& gray, int u, int v);

// Raw 3x3 cross-correlation with the nine Laws kernels built from
// L3 = (1, 2, 1), E3 = (-1, 0, 1), S3 = (-1, 2, -1); kernel "AB" weights rows
// by A and columns by B.
std::array<double, 9> laws_responses(const GrayImage& gray, int u, int v);

// Symmetric reflection of an index into [0, n): ... c b a | a b c | c b a ...
int reflect_index(int i, int n);

class FeatureImage {
 public:
  FeatureImage() = default;
  FeatureImage(int width, int height)
      : width_(width),
        height_(height),
        values_(static_cast<std::size_t>(width) * height * kNumFeatures) {}

  int width() const { return width_; }
  int height() const { return height_; }

  std::span<const double, kNumFeatures> at(int u, int v) const {
    return std::span<const double, kNumFeatures>(
        values_.data() + offset(u, v), kNumFeatures);
  }
  std::span<double, kNumFeatures> at(int u, int v) {
    return std::span<double, kNumFeatures>(values_.data() + offset(u, v),
                                           kNumFeatures);
  }
  FeatureVector vector(int u, int v) const {
    FeatureVector out;
    const auto s = at(u, v);
    std::copy(s.begin(), s.end(), out.begin());
    return out;
  }

  const std::vector<double>& raw() const { return values_; }

  friend bool operator==(const FeatureImage&, const FeatureImage&) = default;

 private:
  std::size_t offset(int u, int v) const {
    return (static_cast<std::size_t>(v) * width_ + u) * kNumFeatures;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Throws std::invalid_argument for an empty image.
FeatureImage extract_features(const RgbImage& image);

}  // namespace hobs
