// morphable/image.cc

// Copyright 2026  The avfront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "avfront/image.h"

namespace avfront {

Camera Camera::Centered(int width, int height, double cx, double cy,
                        double pixel_size) {
  Camera cam;
  cam.pixel_size = pixel_size;
  cam.x0 = cx - 0.5 * (width - 1) * pixel_size;
  cam.y0 = cy + 0.5 * (height - 1) * pixel_size;
  return cam;
}

Image::Image(int width, int height, double fill)
    : width_(width), height_(height),
      pixels_(static_cast<size_t>(width) * height, fill) {
  Require(width > 0 && height > 0, ErrorCode::kInvalidArgument,
          "image dimensions must be positive");
}

double Image::Sample(double col, double row, double outside) const {
  if (!std::isfinite(col) || !std::isfinite(row) || !Contains(col, row))
    return outside;
  return SampleClamped(col, row);
}

double Image::SampleClamped(double col, double row) const {
  col = std::clamp(col, 0.0, static_cast<double>(width_ - 1));
  row = std::clamp(row, 0.0, static_cast<double>(height_ - 1));
  int c0 = std::min(static_cast<int>(std::floor(col)), width_ - 1);
  int r0 = std::min(static_cast<int>(std::floor(row)), height_ - 1);
  int c1 = std::min(c0 + 1, width_ - 1), r1 = std::min(r0 + 1, height_ - 1);
  double fc = col - c0, fr = row - r0;
  double top = (1.0 - fc) * at(c0, r0) + fc * at(c1, r0);
  double bot = (1.0 - fc) * at(c0, r1) + fc * at(c1, r1);
  return (1.0 - fr) * top + fr * bot;
}

void Image::Validate() const {
  for (double p : pixels_)
    Require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::kInvalidArgument,
            "image intensity outside [0, 1]");
}

void WritePgm(const std::string &path, const Image &img) {
  std::ofstream os(path, std::ios::binary);
  Require(os.good(), ErrorCode::kIoError, "cannot open " + path + " for writing");
  os << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> buf(img.pixels().size());
  for (size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<unsigned char>(
        std::lround(std::clamp(img.pixels()[i], 0.0, 1.0) * 255.0));
  os.write(reinterpret_cast<const char *>(buf.data()), buf.size());
  Require(os.good(), ErrorCode::kIoError, "write failed: " + path);
}

namespace {

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string HeaderToken(std::istream &is) {
  std::string tok;
  char c;
  while (is.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

}  // namespace

Image ReadPgm(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  Require(is.good(), ErrorCode::kIoError, "cannot open " + path);
  Require(HeaderToken(is) == "P5", ErrorCode::kBadFile, path + ": not a P5 PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(HeaderToken(is));
    h = std::stoi(HeaderToken(is));
    maxval = std::stoi(HeaderToken(is));
  } catch (const std::exception &) {
    Fail(ErrorCode::kBadFile, path + ": malformed PGM header");
  }
  Require(w > 0 && h > 0 && maxval > 0 && maxval < 256, ErrorCode::kBadFile,
          path + ": only 8-bit PGM is supported");
  std::vector<unsigned char> buf(static_cast<size_t>(w) * h);
  is.read(reinterpret_cast<char *>(buf.data()), buf.size());
  Require(static_cast<size_t>(is.gcount()) == buf.size(), ErrorCode::kBadFile,
          path + ": truncated pixel data");
  Image img(w, h);
  for (size_t i = 0; i < buf.size(); ++i) img.pixels()[i] = buf[i] / double(maxval);
  return img;
}

}  // namespace avfront
