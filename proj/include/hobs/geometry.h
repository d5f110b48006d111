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
#include <filesystem>
#include <optional>
#include <vector>

#include "hobs/image.h"

namespace hobs {

// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws std::invalid_argument when fx, fy <= 0 or the principal point
  // lies outside the image.
  void validate() const;
};

// Camera attitude relative to the horizontal plane. Positive pitch tilts the
// optical axis up; roll turns about the optical axis. Yaw does not affect
// the horizon and is not represented.
class Attitude {
 public:
  Attitude() = default;
  // Throws std::invalid_argument unless roll in [-pi, pi] and
  // pitch in (-pi/2, pi/2).
  Attitude(double roll, double pitch);

  double roll() const { return roll_; }
  double pitch() const { return pitch_; }

 private:
  double roll_ = 0.0;
  double pitch_ = 0.0;
};

enum class Side : std::uint8_t { kAbove = 0, kBelow = 1 };

using Vec3 = std::array<double, 3>;

// World up-vector expressed in the camera frame (x right, y down, z along
// the optical axis): R_roll * R_pitch * (0, -1, 0).
Vec3 up_in_camera(const Attitude& attitude);

// Camera-frame ray through pixel (u, v), not normalized.
Vec3 pixel_ray(const CameraIntrinsics& intrinsics, double u, double v);

// Elevation (rad) of the viewing ray through the continuous image point
// (u, v): asin(d . up / |d|).
double elevation_at(const CameraIntrinsics& intrinsics,
                    const Attitude& attitude, double u, double v);

// Per-pixel elevation of the viewing ray above the horizontal plane, and the
// derived above/below label (elevation exactly 0 counts as below).
class HorizonField {
 public:
  HorizonField() = default;
  HorizonField(const CameraIntrinsics& intrinsics, const Attitude& attitude);

  int width() const { return elevation_.width(); }
  int height() const { return elevation_.height(); }

  double elevation(int u, int v) const { return elevation_.at(u, v); }
  Side side(int u, int v) const { return labels_.at(u, v); }

  const Grid<double>& elevations() const { return elevation_; }
  const Grid<Side>& labels() const { return labels_; }

 private:
  Grid<double> elevation_;
  Grid<Side> labels_;
};

HorizonField horizon_field(const CameraIntrinsics& intrinsics,
                           const Attitude& attitude);

// Throws std::out_of_range outside the image.
Side pixel_side(const HorizonField& field, int u, int v);

Side side_of_elevation(double elevation);

inline constexpr double kDefaultHorizonEpsilon = 1e-6;

// Distance along the ground to where a ray of the given elevation meets a
// flat floor camera_height below the camera. Empty when the ray does not
// descend by more than epsilon. Throws std::invalid_argument for
// camera_height <= 0.
std::optional<double> ground_distance(
    double elevation, double camera_height,
    double epsilon = kDefaultHorizonEpsilon);

using ObstacleMap = Grid<std::uint8_t>;

// For each column: distance to the bottom-most below-horizon obstacle pixel,
// or empty when the column is free. Throws std::invalid_argument on a
// dimension mismatch.
std::vector<std::optional<double>> column_distances(
    const ObstacleMap& obstacles, const HorizonField& field,
    double camera_height, double epsilon = kDefaultHorizonEpsilon);

// Reads a `key = value` file with keys fx, fy, cx, cy, width, height.
// Blank lines and lines starting with '#' are skipped.
CameraIntrinsics read_camera_config(const std::filesystem::path& path);
void write_camera_config(const std::filesystem::path& path,
                         const CameraIntrinsics& intrinsics);

}  // namespace hobs
