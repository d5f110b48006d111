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

#include "hobs/datasetio.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hobs/errors.h"
#include "hobs/textio.h"

namespace hobs {

namespace {

struct PnmHeader {
  char kind = 0;  // '4', '5' or '6'
  int width = 0;
  int height = 0;
  int maxval = 1;
  std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(std::string_view bytes, char expected) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != expected) {
    throw FormatError(std::string("not a binary P") + expected + " file");
  }
  std::size_t pos = 2;
  auto next_number = [&]() -> long long {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (start == pos || pos - start > 9) throw FormatError("malformed header");
    return std::stoll(std::string(bytes.substr(start, pos - start)));
  };
  PnmHeader h;
  h.kind = expected;
  h.width = static_cast<int>(next_number());
  h.height = static_cast<int>(next_number());
  if (h.width <= 0 || h.height <= 0) throw FormatError("bad image size");
  if (expected != '4') {
    h.maxval = static_cast<int>(next_number());
    if (h.maxval < 1 || h.maxval > 255) {
      throw FormatError("only 8-bit maxval (1..255) is supported");
    }
  }
  // Exactly one whitespace byte separates header and payload.
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("malformed header");
  }
  h.data_offset = pos + 1;
  return h;
}

std::string header(char kind, int width, int height, bool with_maxval) {
  std::string out = "P";
  out += kind;
  out += '\n' + std::to_string(width) + ' ' + std::to_string(height) + '\n';
  if (with_maxval) out += "255\n";
  return out;
}

std::uint8_t quantize(double x) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
}

void require_payload(std::string_view bytes, const PnmHeader& h,
                     std::size_t needed) {
  if (bytes.size() - h.data_offset < needed) {
    throw FormatError("truncated pixel data");
  }
}

template <typename Decode>
auto read_with(const std::filesystem::path& path, Decode decode) {
  const std::string bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string encode_ppm(const RgbImage& image) {
  std::string out = header('6', image.width(), image.height(), true);
  out.reserve(out.size() + image.size() * 3);
  for (const Rgb& c : image.data()) {
    out.push_back(static_cast<char>(quantize(c.r)));
    out.push_back(static_cast<char>(quantize(c.g)));
    out.push_back(static_cast<char>(quantize(c.b)));
  }
  return out;
}

RgbImage decode_ppm(std::string_view bytes) {
  const PnmHeader h = parse_pnm_header(bytes, '6');
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  require_payload(bytes, h, n * 3);
  RgbImage out(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
  const double scale = h.maxval;
  for (std::size_t i = 0; i < n; ++i) {
    out.data()[i] = {p[3 * i] / scale, p[3 * i + 1] / scale, p[3 * i + 2] / scale};
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  write_file_atomic(path, encode_ppm(image));
}

RgbImage read_ppm(const std::filesystem::path& path) {
  return read_with(path, decode_ppm);
}

std::string encode_pgm(const Grid<std::uint8_t>& image) {
  std::string out = header('5', image.width(), image.height(), true);
  out.append(image.data().begin(), image.data().end());
  return out;
}

Grid<std::uint8_t> decode_pgm(std::string_view bytes) {
  const PnmHeader h = parse_pnm_header(bytes, '5');
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  require_payload(bytes, h, n);
  Grid<std::uint8_t> out(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
  std::copy(p, p + n, out.data().begin());
  return out;
}

void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& image) {
  write_file_atomic(path, encode_pgm(image));
}

Grid<std::uint8_t> read_pgm(const std::filesystem::path& path) {
  return read_with(path, decode_pgm);
}

std::string encode_pbm(const Grid<std::uint8_t>& bits) {
  std::string out = header('4', bits.width(), bits.height(), false);
  const int row_bytes = (bits.width() + 7) / 8;
  for (int v = 0; v < bits.height(); ++v) {
    for (int b = 0; b < row_bytes; ++b) {
      unsigned char byte = 0;
      for (int k = 0; k < 8; ++k) {
        const int u = b * 8 + k;
        if (u < bits.width() && bits(u, v)) byte |= 0x80u >> k;
      }
      out.push_back(static_cast<char>(byte));
    }
  }
  return out;
}

Grid<std::uint8_t> decode_pbm(std::string_view bytes) {
  const PnmHeader h = parse_pnm_header(bytes, '4');
  const std::size_t row_bytes = (static_cast<std::size_t>(h.width) + 7) / 8;
  require_payload(bytes, h, row_bytes * h.height);
  Grid<std::uint8_t> out(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
  for (int v = 0; v < h.height; ++v) {
    for (int u = 0; u < h.width; ++u) {
      out(u, v) = (p[v * row_bytes + u / 8] >> (7 - u % 8)) & 1u;
    }
  }
  return out;
}

void write_pbm(const std::filesystem::path& path, const Grid<std::uint8_t>& bits) {
  write_file_atomic(path, encode_pbm(bits));
}

Grid<std::uint8_t> read_pbm(const std::filesystem::path& path) {
  return read_with(path, decode_pbm);
}

Grid<std::uint8_t> encode_mask(const GroundTruthMask& mask) {
  Grid<std::uint8_t> out(mask.width(), mask.height());
  std::transform(mask.data().begin(), mask.data().end(), out.data().begin(),
                 [](MaskClass c) -> std::uint8_t {
                   switch (c) {
                     case MaskClass::kFloor:
                       return 0;
                     case MaskClass::kObstacle:
                       return 255;
                     case MaskClass::kIgnore:
                       return 128;
                   }
                   return 128;
                 });
  return out;
}

GroundTruthMask decode_mask(const Grid<std::uint8_t>& gray) {
  GroundTruthMask out(gray.width(), gray.height());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    switch (gray.data()[i]) {
      case 0:
        out.data()[i] = MaskClass::kFloor;
        break;
      case 255:
        out.data()[i] = MaskClass::kObstacle;
        break;
      case 128:
        out.data()[i] = MaskClass::kIgnore;
        break;
      default:
        throw FormatError("mask gray level " + std::to_string(gray.data()[i]) +
                          " is not 0, 128 or 255");
    }
  }
  return out;
}

Grid<std::uint8_t> quantize_unit(const Grid<double>& values) {
  Grid<std::uint8_t> out(values.width(), values.height());
  std::transform(values.data().begin(), values.data().end(), out.data().begin(),
                 quantize);
  return out;
}

namespace {

constexpr const char* kFramesHeader =
    "frame_id,image_path,roll_rad,pitch_rad,height_m,mask_path";

Frame load_frame_row(const std::filesystem::path& dir,
                     const std::vector<std::string>& cols, int row,
                     const CameraIntrinsics& intrinsics) {
  const std::string where = "frames.csv row " + std::to_string(row);
  if (cols.size() != 6) {
    throw DataError(where + ": expected 6 columns, got " +
                    std::to_string(cols.size()));
  }
  Frame f;
  f.frame_id = trim(cols[0]);
  if (f.frame_id.empty()) throw DataError(where + ": empty frame_id");
  const auto roll = parse_double(trim(cols[2]));
  const auto pitch = parse_double(trim(cols[3]));
  if (!roll || !pitch) throw DataError(where + ": bad roll/pitch");
  try {
    f.attitude = Attitude(*roll, *pitch);
  } catch (const std::invalid_argument& e) {
    throw DataError(where + ": " + e.what());
  }
  const std::string height = trim(cols[4]);
  if (!height.empty()) {
    const auto h = parse_double(height);
    if (!h || !(*h > 0.0)) throw DataError(where + ": bad height_m");
    f.camera_height = *h;
  }
  const std::filesystem::path image_path = dir / trim(cols[1]);
  if (!std::filesystem::exists(image_path)) {
    throw DataError(where + ": missing image " + image_path.string());
  }
  f.image = read_ppm(image_path);
  if (!f.image.same_shape(intrinsics.width, intrinsics.height)) {
    throw DataError("frame " + f.frame_id + ": image size differs from camera.cfg");
  }
  const std::string mask = trim(cols[5]);
  if (!mask.empty()) {
    const std::filesystem::path mask_path = dir / mask;
    if (!std::filesystem::exists(mask_path)) {
      throw DataError(where + ": missing mask " + mask_path.string());
    }
    GroundTruthMask m = decode_mask(read_pgm(mask_path));
    if (!m.same_shape(f.image)) {
      throw DataError("frame " + f.frame_id + ": mask is " +
                      std::to_string(m.width()) + "x" + std::to_string(m.height()) +
                      ", image is " + std::to_string(f.image.width()) + "x" +
                      std::to_string(f.image.height()));
    }
    f.gt_mask = std::move(m);
  }
  return f;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto cfg = dir / "camera.cfg";
  if (!std::filesystem::exists(cfg)) {
    throw DataError("dataset " + dir.string() + ": missing camera.cfg");
  }
  Dataset ds;
  ds.intrinsics = read_camera_config(cfg);
  const auto csv = dir / "frames.csv";
  if (!std::filesystem::exists(csv)) {
    throw DataError("dataset " + dir.string() + ": missing frames.csv");
  }
  std::istringstream in(read_file(csv));
  std::string line;
  int row = 0;
  bool seen_header = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++row;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!seen_header) {
      if (text != kFramesHeader) {
        throw DataError("frames.csv row " + std::to_string(row) +
                        ": expected header '" + kFramesHeader + "'");
      }
      seen_header = true;
      continue;
    }
    Frame f = load_frame_row(dir, split(text, ','), row, ds.intrinsics);
    if (!ids.insert(f.frame_id).second) {
      throw DataError("frames.csv row " + std::to_string(row) +
                      ": duplicate frame_id " + f.frame_id);
    }
    ds.frames.push_back(std::move(f));
  }
  if (!seen_header) throw DataError("frames.csv: missing header");
  std::sort(ds.frames.begin(), ds.frames.end(),
            [](const Frame& a, const Frame& b) { return a.frame_id < b.frame_id; });
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir / "images");
  bool any_mask = false;
  for (const auto& f : dataset.frames) any_mask |= f.gt_mask.has_value();
  if (any_mask) std::filesystem::create_directories(dir / "masks");
  write_camera_config(dir / "camera.cfg", dataset.intrinsics);

  std::ostringstream csv;
  csv << kFramesHeader << '\n';
  for (const auto& f : dataset.frames) {
    if (f.frame_id.find_first_of(",/\\\n") != std::string::npos) {
      throw std::invalid_argument("frame id '" + f.frame_id +
                                  "' is not usable as a file name");
    }
    const std::string image_rel = "images/" + f.frame_id + ".ppm";
    write_ppm(dir / image_rel, f.image);
    std::string mask_rel;
    if (f.gt_mask) {
      mask_rel = "masks/" + f.frame_id + ".pgm";
      write_pgm(dir / mask_rel, encode_mask(*f.gt_mask));
    }
    csv << f.frame_id << ',' << image_rel << ','
        << format_double(f.attitude.roll()) << ','
        << format_double(f.attitude.pitch()) << ','
        << (f.camera_height ? format_double(*f.camera_height) : "") << ','
        << mask_rel << '\n';
  }
  write_file_atomic(dir / "frames.csv", csv.str());
}

void save_model(const RandomForestModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

RandomForestModel load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_model(text);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hobs
