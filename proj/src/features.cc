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

#include "hobs/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hobs {

namespace {

constexpr std::uint32_t kPatternMask = (1u << kLbpPoints) - 1;

constexpr std::array<double, 3> kL3{1.0, 2.0, 1.0};
constexpr std::array<double, 3> kE3{-1.0, 0.0, 1.0};
constexpr std::array<double, 3> kS3{-1.0, 2.0, -1.0};

using Kernel = std::array<std::array<double, 3>, 3>;

constexpr Kernel outer(const std::array<double, 3>& rows,
                       const std::array<double, 3>& cols) {
  Kernel k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k[i][j] = rows[i] * cols[j];
  }
  return k;
}

constexpr std::array<Kernel, 9> kLawsKernels{
    outer(kL3, kL3), outer(kL3, kE3), outer(kL3, kS3),
    outer(kE3, kL3), outer(kE3, kE3), outer(kE3, kS3),
    outer(kS3, kL3), outer(kS3, kE3), outer(kS3, kS3)};

struct SampleOffset {
  double du;
  double dv;
};

// Sample positions relative to the center; offsets within 1e-9 of an
// integer are snapped so that axis-aligned samples hit pixel centers.
std::array<SampleOffset, kLbpPoints> make_offsets() {
  std::array<SampleOffset, kLbpPoints> out{};
  auto snap = [](double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? r : x;
  };
  for (int k = 0; k < kLbpPoints; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / kLbpPoints;
    out[k] = {snap(kLbpRadius * std::cos(angle)),
              snap(-kLbpRadius * std::sin(angle))};
  }
  return out;
}

const std::array<SampleOffset, kLbpPoints>& offsets() {
  static const auto table = make_offsets();
  return table;
}

double pixel(const GrayImage& gray, int u, int v) {
  return gray(reflect_index(u, gray.width()), reflect_index(v, gray.height()));
}

// Lerp form so that equal corners give back exactly that value.
double bilinear(const GrayImage& gray, double u, double v) {
  const double u0 = std::floor(u);
  const double v0 = std::floor(v);
  const double fu = u - u0;
  const double fv = v - v0;
  const int iu = static_cast<int>(u0);
  const int iv = static_cast<int>(v0);
  const double a = pixel(gray, iu, iv);
  const double b = pixel(gray, iu + 1, iv);
  const double c = pixel(gray, iu, iv + 1);
  const double d = pixel(gray, iu + 1, iv + 1);
  const double top = a + fu * (b - a);
  const double bottom = c + fu * (d - c);
  return top + fv * (bottom - top);
}

}  // namespace

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  if (delta <= 0.0 || mx <= 0.0) return out;
  out.s = delta / mx;
  double h;
  if (mx == r) {
    h = (g - b) / delta;
    if (h < 0.0) h += 6.0;
  } else if (mx == g) {
    h = 2.0 + (b - r) / delta;
  } else {
    h = 4.0 + (r - g) / delta;
  }
  h /= 6.0;
  if (h >= 1.0) h -= 1.0;
  out.h = h;
  return out;
}

double luma(const Rgb& c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

GrayImage to_gray(const RgbImage& image) {
  GrayImage out(image.width(), image.height());
  std::transform(image.data().begin(), image.data().end(), out.data().begin(),
                 luma);
  return out;
}

int riu2_code(std::uint32_t pattern) {
  pattern &= kPatternMask;
  const std::uint32_t rotated =
      ((pattern >> 1) | (pattern << (kLbpPoints - 1))) & kPatternMask;
  const int transitions = std::popcount(pattern ^ rotated);
  return transitions <= 2 ? std::popcount(pattern) : kLbpNonUniform;
}

std::uint32_t lbp_pattern(const GrayImage& gray, int u, int v) {
  const double center = gray.at(u, v);
  std::uint32_t pattern = 0;
  const auto& offs = offsets();
  for (int k = 0; k < kLbpPoints; ++k) {
    const double s = bilinear(gray, u + offs[k].du, v + offs[k].dv);
    if (s >= center) pattern |= 1u << k;
  }
  return pattern;
}

int lbp_code(const GrayImage& gray, int u, int v) {
  return riu2_code(lbp_pattern(gray, u, v));
}

std::array<double, 9> laws_responses(const GrayImage& gray, int u, int v) {
  gray.at(u, v);  // bounds check
  double patch[3][3];
  for (int dv = -1; dv <= 1; ++dv) {
    for (int du = -1; du <= 1; ++du) {
      patch[dv + 1][du + 1] = pixel(gray, u + du, v + dv);
    }
  }
  std::array<double, 9> out{};
  for (int k = 0; k < 9; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) acc += kLawsKernels[k][i][j] * patch[i][j];
    }
    out[k] = acc;
  }
  return out;
}

FeatureImage extract_features(const RgbImage& image) {
  if (image.empty()) {
    throw std::invalid_argument("extract_features: empty image");
  }
  const GrayImage gray = to_gray(image);
  FeatureImage out(image.width(), image.height());
  for (int v = 0; v < image.height(); ++v) {
    for (int u = 0; u < image.width(); ++u) {
      auto f = out.at(u, v);
      const Rgb& c = image(u, v);
      const Hsv hsv = rgb_to_hsv(c.r, c.g, c.b);
      f[kHue] = hsv.h;
      f[kSaturation] = hsv.s;
      f[kValue] = hsv.v;
      f[kLbp] = static_cast<double>(lbp_code(gray, u, v)) / kLbpNonUniform;
      const auto laws = laws_responses(gray, u, v);
      std::copy(laws.begin(), laws.end(), f.begin() + kLawsFirst);
    }
  }
  return out;
}

}  // namespace hobs
