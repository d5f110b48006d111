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

// Command-line front end: synth, train, predict, evaluate, distances.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "hobs/datasetio.h"
#include "hobs/errors.h"
#include "hobs/evaluation.h"
#include "hobs/geometry.h"
#include "hobs/pipeline.h"
#include "hobs/synthgen.h"
#include "hobs/textio.h"

namespace {

using namespace hobs;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 0;
  int threads = 0;

  // synth
  std::string out_dir;
  int frames = 60;
  double jitter = 0.0;

  // shared
  std::string data_dir;
  std::string model_path;
  std::string image_path;
  std::string camera_path;
  double roll = 0.0;
  double pitch = 0.0;
  std::uint64_t split_seed = 1;
  double train_fraction = 0.9;

  // train
  int trees = 20;
  int min_leaf = 10;
  int samples_per_frame = 1000;
  double percentile = 25.0;

  // predict / distances
  std::string out_prefix;
  std::string out_path;
  double threshold = -1.0;
  double height = 0.0;

  // evaluate
  std::string roc_path;
  double op_threshold = std::numeric_limits<double>::quiet_NaN();
};

void print_kv(const std::string& key, double value) {
  std::cout << key << '=' << format_double(value) << '\n';
}

void print_kv(const std::string& key, std::size_t value) {
  std::cout << key << '=' << value << '\n';
}

Attitude attitude_from(const Options& o) {
  try {
    return Attitude(o.roll, o.pitch);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int run_synth(const Options& o) {
  SceneSpec base;
  base.attitude_jitter = o.jitter;
  generate_dataset(o.out_dir, o.frames, base, o.seed, default_intrinsics());
  print_kv("frames", static_cast<std::size_t>(o.frames));
  std::cout << "out=" << o.out_dir << '\n';
  return 0;
}

PipelineConfig config_from(const Options& o) {
  PipelineConfig config;
  config.forest.n_trees = o.trees;
  config.forest.min_samples_leaf = o.min_leaf;
  config.forest.seed = o.seed;
  config.samples_per_frame = o.samples_per_frame;
  config.train_fraction = o.train_fraction;
  config.threshold_percentile = o.percentile;
  config.split_seed = o.split_seed;
  config.threads = o.threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

int run_train(const Options& o) {
  const PipelineConfig config = config_from(o);
  const Dataset ds = load_dataset(o.data_dir);
  if (ds.frames.size() < 2) throw DataError("dataset needs at least 2 frames");
  const DatasetSplit split =
      split_dataset(ds.frames.size(), config.train_fraction, config.split_seed);
  const RandomForestModel model =
      train_on_frames(ds.frames, split.train, ds.intrinsics, config);
  save_model(model, o.model_path);

  ClassificationTally tally;
  for (std::size_t i : split.test) {
    const Frame& f = ds.frames[i];
    const HorizonField field(ds.intrinsics, f.attitude);
    tally += tally_classification(
        predict_image(model, f.image, config.threads).p_below, field);
  }
  print_kv("train_frames", split.train.size());
  print_kv("test_frames", split.test.size());
  print_kv("threshold", model.entropy_threshold);
  print_kv("test_accuracy", tally.ratio());
  return 0;
}

double effective_threshold(const Options& o, const RandomForestModel& model) {
  if (o.threshold < 0.0) return model.entropy_threshold;
  if (o.threshold > 1.0) throw UsageError("--threshold must be in [0, 1]");
  return o.threshold;
}

int run_predict(const Options& o) {
  const Attitude attitude = attitude_from(o);
  const RandomForestModel model = load_model(o.model_path);
  const RgbImage image = read_ppm(o.image_path);
  const double threshold = effective_threshold(o, model);
  const PixelPredictions pred = predict_image(model, image, o.threads);
  const ObstacleMap obstacles =
      spatial_filter(threshold_map(pred.entropy, threshold));

  write_pbm(o.out_prefix + ".class.pbm", classification_map(pred.p_below));
  write_pgm(o.out_prefix + ".uncert.pgm", quantize_unit(pred.entropy));
  write_pbm(o.out_prefix + ".obst.pbm", obstacles);

  print_kv("threshold", threshold);
  std::size_t n_obstacle = 0;
  for (auto b : obstacles.data()) n_obstacle += b;
  print_kv("obstacle_pixels", n_obstacle);
  if (!o.camera_path.empty()) {
    const CameraIntrinsics k = read_camera_config(o.camera_path);
    if (!image.same_shape(k.width, k.height)) {
      throw DataError("image size differs from " + o.camera_path);
    }
    const HorizonField field(k, attitude);
    print_kv("horizon_accuracy", tally_classification(pred.p_below, field).ratio());
  }
  return 0;
}

int run_evaluate(const Options& o) {
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
    throw UsageError("--train-fraction must be in (0, 1)");
  }
  const RandomForestModel model = load_model(o.model_path);
  const Dataset ds = load_dataset(o.data_dir);
  if (ds.frames.size() < 2) throw DataError("dataset needs at least 2 frames");
  const DatasetSplit split =
      split_dataset(ds.frames.size(), o.train_fraction, o.split_seed);

  std::vector<UncertaintyMap> maps;
  std::vector<HorizonField> fields;
  ClassificationTally tally;
  for (std::size_t i : split.test) {
    const Frame& f = ds.frames[i];
    if (!f.gt_mask) {
      throw DataError("frame " + f.frame_id +
                      " has no ground-truth mask; evaluation needs masks");
    }
    fields.emplace_back(ds.intrinsics, f.attitude);
    PixelPredictions pred = predict_image(model, f.image, o.threads);
    tally += tally_classification(pred.p_below, fields.back());
    maps.push_back(std::move(pred.entropy));
  }
  std::vector<EvalFrame> eval;
  for (std::size_t k = 0; k < split.test.size(); ++k) {
    eval.push_back({&maps[k], &*ds.frames[split.test[k]].gt_mask, &fields[k]});
  }
  RocCurve curve;
  try {
    curve = roc_below_horizon(eval);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  write_roc_csv(o.roc_path, curve);
  print_kv("test_frames", split.test.size());
  print_kv("auc", curve.auc);
  print_kv("accuracy", tally.ratio());
  if (!std::isnan(o.op_threshold)) {
    const OperatingPoint op = operating_point(curve, o.op_threshold);
    print_kv("op_threshold", o.op_threshold);
    print_kv("fpr", op.fpr);
    print_kv("tpr", op.tpr);
  }
  return 0;
}

int run_distances(const Options& o) {
  const Attitude attitude = attitude_from(o);
  const RandomForestModel model = load_model(o.model_path);
  const CameraIntrinsics k = read_camera_config(o.camera_path);
  const RgbImage image = read_ppm(o.image_path);
  if (!image.same_shape(k.width, k.height)) {
    throw DataError("image size differs from " + o.camera_path);
  }
  const double threshold = effective_threshold(o, model);
  const ObstacleMap obstacles = spatial_filter(
      threshold_map(uncertainty_map(model, image, o.threads), threshold));
  const auto distances =
      column_distances(obstacles, HorizonField(k, attitude), o.height);
  std::string csv = "column,distance_m\n";
  std::size_t blocked = 0;
  for (std::size_t u = 0; u < distances.size(); ++u) {
    csv += std::to_string(u) + ',' +
           (distances[u] ? format_double(*distances[u]) : "inf") + '\n';
    blocked += distances[u].has_value();
  }
  write_file_atomic(o.out_path, csv);
  print_kv("blocked_columns", blocked);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Self-supervised horizon-line obstacle detection"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Seed for all randomness");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "Render a synthetic dataset");
  synth->add_option("--out", o.out_dir, "Output directory")->required();
  synth->add_option("--frames", o.frames, "Number of frames (>= 2)")
      ->check(CLI::Range(2, 1000000));
  synth->add_option("--jitter", o.jitter, "Attitude jitter std dev (rad)")
      ->check(CLI::NonNegativeNumber);

  auto* train = app.add_subcommand("train", "Train a model on a dataset");
  train->add_option("--data", o.data_dir, "Dataset directory")->required();
  train->add_option("--model", o.model_path, "Model output file")->required();
  train->add_option("--trees", o.trees)->check(CLI::Range(1, 100000));
  train->add_option("--min-leaf", o.min_leaf)->check(CLI::Range(1, 1000000));
  train->add_option("--samples-per-frame", o.samples_per_frame)
      ->check(CLI::Range(1, std::numeric_limits<int>::max()));
  train->add_option("--train-fraction", o.train_fraction);
  train->add_option("--percentile", o.percentile);
  train->add_option("--split-seed", o.split_seed);

  auto* predict = app.add_subcommand("predict", "Classify one image");
  predict->add_option("--model", o.model_path)->required();
  predict->add_option("--image", o.image_path, "Input PPM image")->required();
  predict->add_option("--roll", o.roll, "Roll (rad)")->required();
  predict->add_option("--pitch", o.pitch, "Pitch (rad)")->required();
  predict->add_option("--out-prefix", o.out_prefix)->required();
  predict->add_option("--threshold", o.threshold,
                      "Entropy threshold (default: model's calibrated value)")
      ->check(CLI::Range(0.0, 1.0));
  predict->add_option("--camera", o.camera_path,
                      "camera.cfg; enables the horizon accuracy report")
      ->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "ROC on the test split");
  evaluate->add_option("--model", o.model_path)->required();
  evaluate->add_option("--data", o.data_dir)->required();
  evaluate->add_option("--roc", o.roc_path, "ROC CSV output")->required();
  evaluate->add_option("--op-threshold", o.op_threshold);
  evaluate->add_option("--split-seed", o.split_seed);
  evaluate->add_option("--train-fraction", o.train_fraction);

  auto* distances = app.add_subcommand("distances", "Per-column obstacle distances");
  distances->add_option("--model", o.model_path)->required();
  distances->add_option("--image", o.image_path)->required();
  distances->add_option("--camera", o.camera_path, "camera.cfg")->required();
  distances->add_option("--roll", o.roll)->required();
  distances->add_option("--pitch", o.pitch)->required();
  distances->add_option("--height", o.height, "Camera height (m)")
      ->required()
      ->check(CLI::PositiveNumber);
  distances->add_option("--out", o.out_path, "CSV output")->required();
  distances->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) return run_synth(o);
    if (*train) return run_train(o);
    if (*predict) return run_predict(o);
    if (*evaluate) return run_evaluate(o);
    if (*distances) return run_distances(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
