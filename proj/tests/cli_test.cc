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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hobs/datasetio.h"
#include "hobs/synthgen.h"
#include "hobs/textio.h"

namespace hobs {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "hobs_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const std::string cmd = std::string(HOBS_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out)};
}

std::string p(const std::string& name) { return (work_dir() / name).string(); }

// Shared small dataset and model, built once.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ASSERT_EQ(run("synth --out " + p("data") + " --frames 10 --seed 7").code, 0);
    const Result r = run("train --data " + p("data") + " --model " + p("model.txt") +
                         " --trees 5 --samples-per-frame 400 --seed 3");
    ASSERT_EQ(r.code, 0) << r.out;
  }
};

TEST_F(CliTest, SynthRequiresTwoFrames) {
  EXPECT_EQ(run("synth --out " + p("one") + " --frames 1").code, 1);
}

TEST_F(CliTest, SynthIsRepeatable) {
  ASSERT_EQ(run("synth --out " + p("again") + " --frames 10 --seed 7").code, 0);
  for (const auto& e : fs::recursive_directory_iterator(p("data"))) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), p("data"));
    EXPECT_EQ(read_file(e.path()), read_file(fs::path(p("again")) / rel)) << rel;
  }
}

TEST_F(CliTest, TrainPrintsThresholdAndAccuracy) {
  const Result r = run("train --data " + p("data") + " --model " + p("single.txt") +
                       " --trees 1 --samples-per-frame 300");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("threshold="), std::string::npos);
  EXPECT_NE(r.out.find("test_accuracy="), std::string::npos);
  EXPECT_EQ(load_model(p("single.txt")).trees.size(), 1u);
}

TEST_F(CliTest, TrainWithoutDataIsUsageError) {
  EXPECT_EQ(run("train --model " + p("x.txt")).code, 1);
}

TEST_F(CliTest, TrainOnMissingDirectoryIsDataError) {
  EXPECT_EQ(run("train --data " + p("nowhere") + " --model " + p("x.txt")).code, 2);
}

TEST_F(CliTest, PredictWritesThreeMaps) {
  const std::string image = p("data/images/frame_0000.ppm");
  const Result r = run("predict --model " + p("model.txt") + " --image " + image +
                       " --roll 0 --pitch 0 --out-prefix " + p("pred") +
                       " --camera " + p("data/camera.cfg"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("horizon_accuracy="), std::string::npos);
  const auto cls = read_pbm(p("pred.class.pbm"));
  const auto unc = read_pgm(p("pred.uncert.pgm"));
  const auto obs = read_pbm(p("pred.obst.pbm"));
  for (int w : {cls.width(), unc.width(), obs.width()}) EXPECT_EQ(w, 320);
  for (int h : {cls.height(), unc.height(), obs.height()}) EXPECT_EQ(h, 240);
}

TEST_F(CliTest, PredictThresholdOneGivesEmptyObstacleMap) {
  const Result r = run("predict --model " + p("model.txt") + " --image " +
                       p("data/images/frame_0001.ppm") +
                       " --roll 0 --pitch 0 --threshold 1.0 --out-prefix " + p("p1"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto obstacles = read_pbm(p("p1.obst.pbm"));
  for (auto b : obstacles.data()) ASSERT_EQ(b, 0);
}

TEST_F(CliTest, PredictWithCorruptModelFails) {
  std::ofstream(p("bad.txt")) << "HOBS 1\nn_trees 3\n";
  const Result r = run("predict --model " + p("bad.txt") + " --image " +
                       p("data/images/frame_0000.ppm") +
                       " --roll 0 --pitch 0 --out-prefix " + p("p2"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.txt"), std::string::npos);
}

TEST_F(CliTest, EvaluateWritesMonotoneRoc) {
  const Result r = run("evaluate --model " + p("model.txt") + " --data " + p("data") +
                       " --roc " + p("roc.csv") + " --op-threshold 0.64");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("fpr="), std::string::npos);
  EXPECT_NE(r.out.find("tpr="), std::string::npos);
  std::istringstream csv(read_file(p("roc.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "threshold,fpr,tpr");
  double last_fpr = 0, last_tpr = 0, auc = -1;
  while (std::getline(csv, line)) {
    if (line.rfind("# auc=", 0) == 0) {
      auc = *parse_double(line.substr(6));
      continue;
    }
    const auto cols = split(line, ',');
    ASSERT_EQ(cols.size(), 3u);
    const double fpr = *parse_double(cols[1]);
    const double tpr = *parse_double(cols[2]);
    EXPECT_GE(fpr, last_fpr);
    EXPECT_GE(tpr, last_tpr);
    last_fpr = fpr;
    last_tpr = tpr;
  }
  EXPECT_GE(auc, 0.0);
  EXPECT_LE(auc, 1.0);
}

TEST_F(CliTest, EvaluateWithoutMasksFails) {
  fs::copy(p("data"), p("nomask"), fs::copy_options::recursive);
  std::string index = read_file(p("nomask/frames.csv"));
  std::string stripped;
  std::istringstream in(index);
  std::string line;
  while (std::getline(in, line)) {
    auto cols = split(line, ',');
    if (cols[0] != "frame_id") cols[5].clear();
    stripped += cols[0] + ',' + cols[1] + ',' + cols[2] + ',' + cols[3] + ',' +
                cols[4] + ',' + cols[5] + '\n';
  }
  write_file_atomic(p("nomask/frames.csv"), stripped);
  const Result r = run("evaluate --model " + p("model.txt") + " --data " +
                       p("nomask") + " --roc " + p("roc2.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("mask"), std::string::npos);
}

TEST_F(CliTest, DistancesRejectZeroHeight) {
  EXPECT_EQ(run("distances --model " + p("model.txt") + " --image " +
                p("data/images/frame_0000.ppm") + " --camera " +
                p("data/camera.cfg") + " --roll 0 --pitch 0 --height 0 --out " +
                p("d.csv"))
                .code,
            1);
}

TEST_F(CliTest, DistancesWritesOneRowPerColumn) {
  const Result r = run("distances --model " + p("model.txt") + " --image " +
                       p("data/images/frame_0000.ppm") + " --camera " +
                       p("data/camera.cfg") + " --roll 0 --pitch 0 --height 1 --out " +
                       p("d.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream csv(read_file(p("d.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "column,distance_m");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto cols = split(line, ',');
    ASSERT_EQ(cols.size(), 2u);
    EXPECT_EQ(*parse_int(cols[0]), rows);
    ++rows;
  }
  EXPECT_EQ(rows, 320);
}

TEST_F(CliTest, DistancesAreInfiniteWithoutObstacles) {
  SceneSpec empty;
  write_ppm(p("empty.ppm"), render_scene(empty, default_intrinsics()).image);
  const Result r = run("distances --model " + p("model.txt") + " --image " +
                       p("empty.ppm") + " --camera " + p("data/camera.cfg") +
                       " --roll 0 --pitch 0 --height 1 --threshold 1.0 --out " +
                       p("e.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream csv(read_file(p("e.csv")));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) EXPECT_EQ(split(line, ',')[1], "inf");
}

}  // namespace
}  // namespace hobs
