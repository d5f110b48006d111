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
#include <optional>
#include <string>

#include "hobs/geometry.h"
#include "hobs/image.h"

namespace hobs {

enum class MaskClass : std::uint8_t { kFloor = 0, kObstacle = 1, kIgnore = 2 };

using GroundTruthMask = Grid<MaskClass>;

// One recorded image with the attitude it was taken at.
struct Frame {
  std::string frame_id;
  RgbImage image;
  Attitude attitude;
  std::optional<double> camera_height;
  std::optional<GroundTruthMask> gt_mask;
};

}  // namespace hobs
