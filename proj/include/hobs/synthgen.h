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
#include <filesystem>
#include <vector>

#include "hobs/datasetio.h"
#include "hobs/frame.h"
#include "hobs/geometry.h"

namespace hobs {

// Upright rectangle standing on the ground, facing the camera. x is the
// lateral offset of its center and z the forward distance of its plane, both
// in meters in the level camera frame.
struct ObstacleSpec {
  double x = 0.0;
  double z = 5.0;
  double width = 1.0;
  double height = 2.0;
  Rgb color{0.6, 0.4, 0.2};
  double texture_amplitude = 0.05;
};

struct SceneSpec {
  Rgb ground_color{0.12, 0.16, 0.42};
  double ground_texture = 0.06;
  Rgb sky_horizon{0.78, 0.82, 0.88};
  Rgb sky_zenith{0.40, 0.58, 0.90};
  std::vector<ObstacleSpec> obstacles;
  double camera_height = 1.0;
  Attitude attitude;
  std::uint64_t seed = 0;
  double attitude_jitter = 0.0;  // std dev (rad) added to the recorded attitude
  // Ground brightness falls off linearly by up to this fraction from the
  // left to the right image border; emulates shading. 0 disables it.
  double shading = 0.0;

  // Throws std::invalid_argument on non-positive heights or sizes.
  void validate() const;
};

struct RenderedScene {
  RgbImage image;
  GroundTruthMask mask;   // Floor, Obstacle, or Ignore (sky)
  Attitude recorded_attitude;
  double camera_height = 0.0;
};

RenderedScene render_scene(const SceneSpec& spec,
                           const CameraIntrinsics& intrinsics);

// Converts a level-camera world direction (x right, y down, z forward) from a
// camera-frame ray under the given attitude.
Vec3 camera_to_world(const Attitude& attitude, const Vec3& ray);

struct Material {
  Rgb color;
  double texture_amplitude = 0.05;
};

std::vector<Material> default_palette();
CameraIntrinsics default_intrinsics();

// Ranges for per-frame randomization in generate_dataset.
struct VariationParams {
  bool enabled = true;
  int min_obstacles = 1;
  int max_obstacles = 3;
  double min_distance = 4.0;
  double max_distance = 12.0;
  double min_width = 0.3;
  double max_width = 0.8;
  // Obstacle height as a multiple of the camera height; > 1 makes every
  // obstacle cross the horizon.
  double min_height_ratio = 1.6;
  double max_height_ratio = 3.0;
  double max_abs_roll = 0.06;
  double max_abs_pitch = 0.06;
  std::vector<Material> palette = default_palette();
};

// Per-frame scene specs; deterministic in (base, seed, variation).
std::vector<SceneSpec> make_scene_specs(int n_frames, const SceneSpec& base,
                                        std::uint64_t seed,
                                        const VariationParams& variation,
                                        const CameraIntrinsics& intrinsics);

// Renders n_frames scenes into an in-memory dataset (frame ids frame_0000,
// ...). Throws std::invalid_argument for n_frames < 2.
Dataset synthesize_dataset(int n_frames, const SceneSpec& base,
                           std::uint64_t seed,
                           const CameraIntrinsics& intrinsics,
                           const VariationParams& variation = {});

// synthesize_dataset followed by write_dataset.
void generate_dataset(const std::filesystem::path& dir, int n_frames,
                      const SceneSpec& base, std::uint64_t seed,
                      const CameraIntrinsics& intrinsics,
                      const VariationParams& variation = {});

}  // namespace hobs
