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
#include <span>
#include <vector>

#include "hobs/forest.h"
#include "hobs/frame.h"
#include "hobs/geometry.h"

namespace hobs {

struct PipelineConfig {
  ForestParams forest;
  int samples_per_frame = 1000;
  double train_fraction = 0.9;
  double threshold_percentile = 25.0;
  std::uint64_t split_seed = 1;
  int threads = 0;  // 0 = hardware concurrency; never changes results

  void validate() const;
};

using UncertaintyMap = Grid<double>;

// Features of `frame` at up to n pixels drawn without replacement, labeled
// with their horizon side. n >= pixel count takes every pixel in raster
// order. Throws DataError when the image size disagrees with the intrinsics.
std::vector<Sample> self_label(const Frame& frame,
                               const CameraIntrinsics& intrinsics, int n,
                               RandomStream& stream);

// Seed of the pixel-sampling stream for frame `frame_index`; disjoint from
// the per-tree streams.
std::uint64_t sampling_seed(std::uint64_t forest_seed, std::size_t frame_index);

struct DatasetSplit {
  std::vector<std::size_t> train;  // indices into the frame list
  std::vector<std::size_t> test;
};

// Frame-level shuffle by `seed`; the first min(ceil(fraction * N), N - 1)
// frames train. Throws std::invalid_argument for fewer than two frames.
DatasetSplit split_dataset(std::size_t n_frames, double train_fraction,
                           std::uint64_t seed);

// Nearest-rank percentile: the ceil(q/100 * n)-th smallest value.
double nearest_rank_percentile(std::vector<double> values, double q);

RandomForestModel train_pipeline(std::span<const Frame> frames,
                                 const CameraIntrinsics& intrinsics,
                                 const PipelineConfig& config);

// Trains on exactly the given frames (no split); used by train_pipeline.
RandomForestModel train_on_frames(std::span<const Frame> frames,
                                  std::span<const std::size_t> which,
                                  const CameraIntrinsics& intrinsics,
                                  const PipelineConfig& config);

struct PixelPredictions {
  Grid<double> p_below;
  UncertaintyMap entropy;
};

PixelPredictions predict_image(const RandomForestModel& model,
                               const RgbImage& image, int threads = 1);

UncertaintyMap uncertainty_map(const RandomForestModel& model,
                               const RgbImage& image, int threads = 1);

// 1 where p_below >= 0.5.
Grid<std::uint8_t> classification_map(const Grid<double>& p_below);

// Obstacle where entropy > threshold. Throws std::invalid_argument unless
// threshold is in [0, 1].
ObstacleMap threshold_map(const UncertaintyMap& map, double threshold);

// Single pass: an obstacle pixel survives when at least one of its eight
// neighbors is an obstacle in the input.
ObstacleMap spatial_filter(const ObstacleMap& map);

}  // namespace hobs
