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

#include "hobs/geometry.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hobs/errors.h"
#include "hobs/textio.h"

namespace hobs {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("intrinsics: image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw std::invalid_argument(
        "intrinsics: principal point outside the image");
  }
}

Attitude::Attitude(double roll, double pitch) : roll_(roll), pitch_(pitch) {
  constexpr double pi = std::numbers::pi;
  if (!(roll >= -pi && roll <= pi)) {
    throw std::invalid_argument("attitude: roll must lie in [-pi, pi]");
  }
  if (!(pitch > -pi / 2 && pitch < pi / 2)) {
    throw std::invalid_argument("attitude: pitch must lie in (-pi/2, pi/2)");
  }
}

Vec3 up_in_camera(const Attitude& attitude) {
  // R_pitch * (0, -1, 0): tilting the axis up gives world-up a positive
  // component along z.
  const double cp = std::cos(attitude.pitch());
  const double sp = std::sin(attitude.pitch());
  const Vec3 pitched{0.0, -cp, sp};
  // R_roll about the optical axis.
  const double cr = std::cos(attitude.roll());
  const double sr = std::sin(attitude.roll());
  return {cr * pitched[0] - sr * pitched[1], sr * pitched[0] + cr * pitched[1],
          pitched[2]};
}

Vec3 pixel_ray(const CameraIntrinsics& intrinsics, double u, double v) {
  return {(u - intrinsics.cx) / intrinsics.fx,
          (v - intrinsics.cy) / intrinsics.fy, 1.0};
}

Side side_of_elevation(double elevation) {
  return elevation > 0.0 ? Side::kAbove : Side::kBelow;
}

namespace {

double elevation_of(const CameraIntrinsics& intrinsics, const Vec3& up,
                    double u, double v) {
  const Vec3 d = pixel_ray(intrinsics, u, v);
  const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  const double dot = d[0] * up[0] + d[1] * up[1] + d[2] * up[2];
  return std::asin(std::clamp(dot / norm, -1.0, 1.0));
}

}  // namespace

double elevation_at(const CameraIntrinsics& intrinsics,
                    const Attitude& attitude, double u, double v) {
  return elevation_of(intrinsics, up_in_camera(attitude), u, v);
}

HorizonField::HorizonField(const CameraIntrinsics& intrinsics,
                           const Attitude& attitude)
    : elevation_(intrinsics.width, intrinsics.height),
      labels_(intrinsics.width, intrinsics.height) {
  intrinsics.validate();
  const Vec3 up = up_in_camera(attitude);
  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      const double e = elevation_of(intrinsics, up, u, v);
      elevation_(u, v) = e;
      labels_(u, v) = side_of_elevation(e);
    }
  }
}

HorizonField horizon_field(const CameraIntrinsics& intrinsics,
                           const Attitude& attitude) {
  return HorizonField(intrinsics, attitude);
}

Side pixel_side(const HorizonField& field, int u, int v) {
  return field.side(u, v);
}

std::optional<double> ground_distance(double elevation, double camera_height,
                                      double epsilon) {
  if (!(camera_height > 0.0)) {
    throw std::invalid_argument("ground_distance: camera height must be > 0");
  }
  if (elevation >= -epsilon) return std::nullopt;
  return camera_height / std::tan(-elevation);
}

std::vector<std::optional<double>> column_distances(
    const ObstacleMap& obstacles, const HorizonField& field,
    double camera_height, double epsilon) {
  if (!obstacles.same_shape(field.width(), field.height())) {
    throw std::invalid_argument(
        "column_distances: obstacle map and horizon field differ in size");
  }
  std::vector<std::optional<double>> out(obstacles.width());
  for (int u = 0; u < obstacles.width(); ++u) {
    for (int v = obstacles.height() - 1; v >= 0; --v) {
      if (obstacles(u, v) && field.labels()(u, v) == Side::kBelow) {
        out[u] =
            ground_distance(field.elevations()(u, v), camera_height, epsilon);
        break;
      }
    }
  }
  return out;
}

CameraIntrinsics read_camera_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open camera config " + path.string());
  std::map<std::string, double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto parsed = parse_double(value);
    if (!parsed) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": bad number '" + value + "'");
    }
    values[key] = *parsed;
  }
  auto get = [&](const char* key) {
    auto it = values.find(key);
    if (it == values.end()) {
      throw FormatError(path.string() + ": missing key '" + key + "'");
    }
    return it->second;
  };
  CameraIntrinsics k;
  k.fx = get("fx");
  k.fy = get("fy");
  k.cx = get("cx");
  k.cy = get("cy");
  const double w = get("width");
  const double h = get("height");
  if (w != std::floor(w) || h != std::floor(h)) {
    throw FormatError(path.string() + ": width/height must be integers");
  }
  k.width = static_cast<int>(w);
  k.height = static_cast<int>(h);
  try {
    k.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return k;
}

void write_camera_config(const std::filesystem::path& path,
                         const CameraIntrinsics& k) {
  std::ostringstream out;
  out << "fx = " << format_double(k.fx) << '\n'
      << "fy = " << format_double(k.fy) << '\n'
      << "cx = " << format_double(k.cx) << '\n'
      << "cy = " << format_double(k.cy) << '\n'
      << "width = " << k.width << '\n'
      << "height = " << k.height << '\n';
  write_file_atomic(path, out.str());
}

}  // namespace hobs
