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

#include "hobs/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "hobs/random.h"

namespace hobs {

namespace {

constexpr std::uint64_t kTextureStream = 0;
constexpr std::uint64_t kJitterStream = 1;

// Elevation span over which the sky blends from horizon to zenith color.
constexpr double kSkyGradientSpan = 0.5;

Rgb mix(const Rgb& a, const Rgb& b, double t) {
  return {a.r + t * (b.r - a.r), a.g + t * (b.g - a.g), a.b + t * (b.b - a.b)};
}

Rgb offset_clamped(const Rgb& c, double delta, double gain = 1.0) {
  auto f = [&](double x) { return std::clamp(x * gain + delta, 0.0, 1.0); };
  return {f(c.r), f(c.g), f(c.b)};
}

double gaussian(RandomStream& stream) {
  // Box-Muller; 1 - u keeps the log argument away from zero.
  const double u1 = 1.0 - stream.uniform01();
  const double u2 = stream.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool hits(const ObstacleSpec& o, double camera_height, const Vec3& w) {
  if (w[2] <= 0.0) return false;
  const double t = o.z / w[2];
  const double x = t * w[0];
  const double y = t * w[1];  // below the camera is positive
  return std::abs(x - o.x) <= o.width / 2.0 && y <= camera_height &&
         y >= camera_height - o.height;
}

}  // namespace

void SceneSpec::validate() const {
  if (!(camera_height > 0.0)) {
    throw std::invalid_argument("scene: camera height must be > 0");
  }
  if (!(attitude_jitter >= 0.0)) {
    throw std::invalid_argument("scene: attitude jitter must be >= 0");
  }
  for (const auto& o : obstacles) {
    if (!(o.height > 0.0) || !(o.width > 0.0) || !(o.z > 0.0)) {
      throw std::invalid_argument(
          "scene: obstacles need positive height, width and distance");
    }
  }
}

Vec3 camera_to_world(const Attitude& attitude, const Vec3& c) {
  // Inverse of up_in_camera's rotation: undo roll, then pitch.
  const double cr = std::cos(attitude.roll());
  const double sr = std::sin(attitude.roll());
  const Vec3 unrolled{c[0] * cr + c[1] * sr, -c[0] * sr + c[1] * cr, c[2]};
  const double cp = std::cos(attitude.pitch());
  const double sp = std::sin(attitude.pitch());
  return {unrolled[0], unrolled[1] * cp - unrolled[2] * sp,
          unrolled[1] * sp + unrolled[2] * cp};
}

RenderedScene render_scene(const SceneSpec& spec,
                           const CameraIntrinsics& intrinsics) {
  spec.validate();
  intrinsics.validate();
  const HorizonField field(intrinsics, spec.attitude);

  // Far to near, so nearer obstacles paint over farther ones.
  std::vector<const ObstacleSpec*> order;
  for (const auto& o : spec.obstacles) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(),
                   [](const ObstacleSpec* a, const ObstacleSpec* b) {
                     return a->z > b->z;
                   });

  RenderedScene out;
  out.image = RgbImage(intrinsics.width, intrinsics.height);
  out.mask = GroundTruthMask(intrinsics.width, intrinsics.height);
  out.camera_height = spec.camera_height;

  RandomStream texture(derive_seed(spec.seed, kTextureStream));
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      const double noise = 2.0 * texture.uniform01() - 1.0;
      const double e = field.elevations()(u, v);
      Rgb color;
      MaskClass cls;
      if (e < 0.0) {
        const double gain =
            1.0 - spec.shading * u / std::max(1, intrinsics.width - 1);
        color = offset_clamped(spec.ground_color, noise * spec.ground_texture, gain);
        cls = MaskClass::kFloor;
      } else {
        color = mix(spec.sky_horizon, spec.sky_zenith,
                    std::min(1.0, e / kSkyGradientSpan));
        cls = MaskClass::kIgnore;
      }
      if (!order.empty()) {
        const Vec3 w = camera_to_world(spec.attitude, pixel_ray(intrinsics, u, v));
        for (const ObstacleSpec* o : order) {
          if (hits(*o, spec.camera_height, w)) {
            color = offset_clamped(o->color, noise * o->texture_amplitude);
            cls = MaskClass::kObstacle;
          }
        }
      }
      out.image(u, v) = color;
      out.mask(u, v) = cls;
    }
  }

  out.recorded_attitude = spec.attitude;
  if (spec.attitude_jitter > 0.0) {
    RandomStream jitter(derive_seed(spec.seed, kJitterStream));
    constexpr double pi = std::numbers::pi;
    const double roll = std::clamp(
        spec.attitude.roll() + spec.attitude_jitter * gaussian(jitter), -pi, pi);
    const double limit = std::nextafter(pi / 2, 0.0);
    const double pitch = std::clamp(
        spec.attitude.pitch() + spec.attitude_jitter * gaussian(jitter), -limit,
        limit);
    out.recorded_attitude = Attitude(roll, pitch);
  }
  return out;
}

std::vector<Material> default_palette() {
  return {
      {{0.62, 0.42, 0.22}, 0.08},  // wood
      {{0.30, 0.55, 0.25}, 0.10},  // foliage
      {{0.80, 0.74, 0.45}, 0.05},  // beige wall
      {{0.66, 0.20, 0.20}, 0.06},  // red panel
      {{0.30, 0.30, 0.32}, 0.04},  // dark curtain
  };
}

CameraIntrinsics default_intrinsics() {
  return {260.0, 260.0, 159.5, 119.5, 320, 240};
}

std::vector<SceneSpec> make_scene_specs(int n_frames, const SceneSpec& base,
                                        std::uint64_t seed,
                                        const VariationParams& var,
                                        const CameraIntrinsics& intrinsics) {
  if (n_frames < 2) {
    throw std::invalid_argument("synthgen: need at least 2 frames");
  }
  base.validate();
  std::vector<SceneSpec> specs;
  specs.reserve(n_frames);
  for (int i = 0; i < n_frames; ++i) {
    SceneSpec spec = base;
    if (!var.enabled) {
      specs.push_back(spec);
      continue;
    }
    if (var.palette.empty()) {
      throw std::invalid_argument("synthgen: empty material palette");
    }
    RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    spec.seed = rng.next();
    spec.attitude = Attitude(rng.uniform(-var.max_abs_roll, var.max_abs_roll),
                             rng.uniform(-var.max_abs_pitch, var.max_abs_pitch));
    const int count =
        var.min_obstacles +
        static_cast<int>(rng.uniform_index(
            static_cast<std::uint64_t>(var.max_obstacles - var.min_obstacles + 1)));
    // Keep centers inside the horizontal field of view.
    const double half_fov = std::atan((intrinsics.width / 2.0) / intrinsics.fx);
    spec.obstacles.clear();
    for (int k = 0; k < count; ++k) {
      ObstacleSpec o;
      o.z = rng.uniform(var.min_distance, var.max_distance);
      const double half_span = 0.8 * o.z * std::tan(half_fov);
      o.x = rng.uniform(-half_span, half_span);
      o.width = rng.uniform(var.min_width, var.max_width);
      o.height = base.camera_height *
                 rng.uniform(var.min_height_ratio, var.max_height_ratio);
      const Material& m = var.palette[rng.uniform_index(var.palette.size())];
      o.color = m.color;
      o.texture_amplitude = m.texture_amplitude;
      spec.obstacles.push_back(o);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

Dataset synthesize_dataset(int n_frames, const SceneSpec& base,
                           std::uint64_t seed,
                           const CameraIntrinsics& intrinsics,
                           const VariationParams& variation) {
  const auto specs = make_scene_specs(n_frames, base, seed, variation, intrinsics);
  Dataset ds;
  ds.intrinsics = intrinsics;
  for (int i = 0; i < n_frames; ++i) {
    RenderedScene r = render_scene(specs[i], intrinsics);
    char id[32];
    std::snprintf(id, sizeof(id), "frame_%04d", i);
    Frame f;
    f.frame_id = id;
    // Stored images are 8-bit; quantize now so in-memory and on-disk
    // datasets agree exactly.
    for (auto& c : r.image.data()) {
      auto q = [](double x) { return std::round(x * 255.0) / 255.0; };
      c = {q(c.r), q(c.g), q(c.b)};
    }
    f.image = std::move(r.image);
    f.attitude = r.recorded_attitude;
    f.camera_height = r.camera_height;
    f.gt_mask = std::move(r.mask);
    ds.frames.push_back(std::move(f));
  }
  return ds;
}

void generate_dataset(const std::filesystem::path& dir, int n_frames,
                      const SceneSpec& base, std::uint64_t seed,
                      const CameraIntrinsics& intrinsics,
                      const VariationParams& variation) {
  write_dataset(dir, synthesize_dataset(n_frames, base, seed, intrinsics, variation));
}

}  // namespace hobs
