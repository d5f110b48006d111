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

#include "hobs/pipeline.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "hobs/errors.h"

namespace hobs {

namespace {

// Stream tags keep the sampling streams disjoint from the tree streams.
constexpr std::uint64_t kSamplingTag = 0x73616d706c696e67ULL;

void check_frame_size(const Frame& frame, const CameraIntrinsics& intrinsics) {
  if (!frame.image.same_shape(intrinsics.width, intrinsics.height)) {
    throw DataError("frame " + frame.frame_id + ": image is " +
                    std::to_string(frame.image.width()) + "x" +
                    std::to_string(frame.image.height()) +
                    " but the camera is " + std::to_string(intrinsics.width) +
                    "x" + std::to_string(intrinsics.height));
  }
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

}  // namespace

void PipelineConfig::validate() const {
  forest.validate();
  if (samples_per_frame < 1) {
    throw std::invalid_argument("pipeline: samples_per_frame must be >= 1");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("pipeline: train_fraction must be in (0, 1)");
  }
  if (!(threshold_percentile > 0.0 && threshold_percentile <= 100.0)) {
    throw std::invalid_argument(
        "pipeline: threshold_percentile must be in (0, 100]");
  }
}

std::vector<Sample> self_label(const Frame& frame,
                               const CameraIntrinsics& intrinsics, int n,
                               RandomStream& stream) {
  check_frame_size(frame, intrinsics);
  if (n < 1) throw std::invalid_argument("self_label: n must be >= 1");
  const HorizonField field(intrinsics, frame.attitude);
  const FeatureImage features = extract_features(frame.image);

  const std::size_t total = frame.image.size();
  std::vector<std::uint32_t> pixels(total);
  std::iota(pixels.begin(), pixels.end(), 0u);
  std::size_t take = total;
  if (static_cast<std::size_t>(n) < total) {
    take = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + stream.uniform_index(total - i);
      std::swap(pixels[i], pixels[j]);
    }
  }

  std::vector<Sample> out;
  out.reserve(take);
  const int width = frame.image.width();
  for (std::size_t i = 0; i < take; ++i) {
    const int u = static_cast<int>(pixels[i] % width);
    const int v = static_cast<int>(pixels[i] / width);
    out.push_back({features.vector(u, v), field.labels()(u, v)});
  }
  return out;
}

std::uint64_t sampling_seed(std::uint64_t forest_seed, std::size_t frame_index) {
  return derive_seed(forest_seed ^ kSamplingTag,
                     static_cast<std::uint64_t>(frame_index));
}

DatasetSplit split_dataset(std::size_t n_frames, double train_fraction,
                           std::uint64_t seed) {
  if (n_frames < 2) {
    throw std::invalid_argument("split_dataset: need at least 2 frames");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(n_frames);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream stream(seed);
  for (std::size_t i = n_frames - 1; i > 0; --i) {
    const std::size_t j = stream.uniform_index(i + 1);
    std::swap(order[i], order[j]);
  }
  // The small slack absorbs representation error such as 0.9 * 10.
  const auto wanted = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(n_frames) - 1e-9));
  const std::size_t n_train = std::clamp<std::size_t>(wanted, 1, n_frames - 1);
  DatasetSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  return split;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("percentile: no values");
  }
  if (!(q > 0.0 && q <= 100.0)) {
    throw std::invalid_argument("percentile: q must be in (0, 100]");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

RandomForestModel train_on_frames(std::span<const Frame> frames,
                                  std::span<const std::size_t> which,
                                  const CameraIntrinsics& intrinsics,
                                  const PipelineConfig& config) {
  config.validate();
  intrinsics.validate();
  std::vector<Sample> pooled;
  for (std::size_t k = 0; k < which.size(); ++k) {
    const std::size_t i = which[k];
    RandomStream stream(sampling_seed(config.forest.seed, i));
    auto samples =
        self_label(frames[i], intrinsics, config.samples_per_frame, stream);
    pooled.insert(pooled.end(), samples.begin(), samples.end());
  }
  RandomForestModel model = train_forest(pooled, config.forest, config.threads);

  std::vector<double> entropies;
  entropies.reserve(pooled.size());
  for (const auto& s : pooled) {
    entropies.push_back(binary_entropy(predict_p_below(model, s.features)));
  }
  model.entropy_threshold =
      nearest_rank_percentile(std::move(entropies), config.threshold_percentile);
  return model;
}

RandomForestModel train_pipeline(std::span<const Frame> frames,
                                 const CameraIntrinsics& intrinsics,
                                 const PipelineConfig& config) {
  config.validate();
  const DatasetSplit split =
      split_dataset(frames.size(), config.train_fraction, config.split_seed);
  return train_on_frames(frames, split.train, intrinsics, config);
}

PixelPredictions predict_image(const RandomForestModel& model,
                               const RgbImage& image, int threads) {
  const FeatureImage features = extract_features(image);
  PixelPredictions out{Grid<double>(image.width(), image.height()),
                       UncertaintyMap(image.width(), image.height())};
  auto rows = [&](int begin, int end) {
    for (int v = begin; v < end; ++v) {
      for (int u = 0; u < image.width(); ++u) {
        const double p = predict_p_below(model, features.at(u, v));
        out.p_below(u, v) = p;
        out.entropy(u, v) = binary_entropy(p);
      }
    }
  };
  const int workers = std::min(resolve_threads(threads), image.height());
  if (workers <= 1) {
    rows(0, image.height());
    return out;
  }
  std::vector<std::thread> pool;
  const int chunk = (image.height() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(image.height(), begin + chunk);
    if (begin < end) pool.emplace_back(rows, begin, end);
  }
  for (auto& t : pool) t.join();
  return out;
}

UncertaintyMap uncertainty_map(const RandomForestModel& model,
                               const RgbImage& image, int threads) {
  return predict_image(model, image, threads).entropy;
}

Grid<std::uint8_t> classification_map(const Grid<double>& p_below) {
  Grid<std::uint8_t> out(p_below.width(), p_below.height());
  std::transform(p_below.data().begin(), p_below.data().end(),
                 out.data().begin(),
                 [](double p) { return static_cast<std::uint8_t>(p >= 0.5); });
  return out;
}

ObstacleMap threshold_map(const UncertaintyMap& map, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold_map: threshold must be in [0, 1]");
  }
  ObstacleMap out(map.width(), map.height());
  std::transform(map.data().begin(), map.data().end(), out.data().begin(),
                 [threshold](double e) {
                   return static_cast<std::uint8_t>(e > threshold);
                 });
  return out;
}

ObstacleMap spatial_filter(const ObstacleMap& map) {
  ObstacleMap out(map.width(), map.height());
  for (int v = 0; v < map.height(); ++v) {
    for (int u = 0; u < map.width(); ++u) {
      if (!map(u, v)) continue;
      bool neighbor = false;
      for (int dv = -1; dv <= 1 && !neighbor; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          if ((du || dv) && map.contains(u + du, v + dv) &&
              map(u + du, v + dv)) {
            neighbor = true;
            break;
          }
        }
      }
      out(u, v) = neighbor;
    }
  }
  return out;
}

}  // namespace hobs
