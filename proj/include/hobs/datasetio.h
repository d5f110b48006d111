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
#include <string>
#include <vector>

#include "hobs/forest.h"
#include "hobs/frame.h"
#include "hobs/geometry.h"

namespace hobs {

// Binary portable anymap codecs (P6 color, P5 gray, P4 bitmap), 8 bits.
// Color channels are quantized as round(c * 255) on write and k / maxval on
// read. Readers throw FormatError on malformed headers or short payloads.
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_ppm(const std::filesystem::path& path);

std::string encode_ppm(const RgbImage& image);
RgbImage decode_ppm(std::string_view bytes);

void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& image);
Grid<std::uint8_t> read_pgm(const std::filesystem::path& path);
std::string encode_pgm(const Grid<std::uint8_t>& image);
Grid<std::uint8_t> decode_pgm(std::string_view bytes);

// Nonzero cells are written as 1 bits.
void write_pbm(const std::filesystem::path& path, const Grid<std::uint8_t>& bits);
Grid<std::uint8_t> read_pbm(const std::filesystem::path& path);
std::string encode_pbm(const Grid<std::uint8_t>& bits);
Grid<std::uint8_t> decode_pbm(std::string_view bytes);

// Mask graymaps: 0 = Floor, 255 = Obstacle, 128 = Ignore.
Grid<std::uint8_t> encode_mask(const GroundTruthMask& mask);
// Throws FormatError on any other gray level.
GroundTruthMask decode_mask(const Grid<std::uint8_t>& gray);

// entropy * 255, rounded.
Grid<std::uint8_t> quantize_unit(const Grid<double>& values);

struct Dataset {
  CameraIntrinsics intrinsics;
  std::vector<Frame> frames;  // sorted by frame_id
};

// Reads camera.cfg and frames.csv (frame_id, image_path, roll_rad,
// pitch_rad, height_m, mask_path; the last two may be empty). Paths are
// relative to `dir`. Throws DataError naming the offending row, frame or
// file.
Dataset load_dataset(const std::filesystem::path& dir);

// Writes images/<id>.ppm and masks/<id>.pgm plus the two index files.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

void save_model(const RandomForestModel& model, const std::filesystem::path& path);
// Throws FormatError (bad content) or DataError (unreadable file).
RandomForestModel load_model(const std::filesystem::path& path);

}  // namespace hobs
