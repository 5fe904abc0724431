// avfront/image.h

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

#ifndef AVFRONT_IMAGE_H_
#define AVFRONT_IMAGE_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avfront/common.h"

namespace avfront {

/// Scaled-orthographic camera looking down -z.  Pixel centres sit on integer
/// coordinates; pixel (0, 0) images model point (x0, y0) and image rows grow
/// downward while model y grows upward.
struct Camera {
  double x0 = 0.0;
  double y0 = 0.0;
  double pixel_size = 1.0;  // model units per pixel

  Eigen::Vector2d Project(const Eigen::Vector3d &p) const {
    return {(p.x() - x0) / pixel_size, (y0 - p.y()) / pixel_size};
  }
  Eigen::Vector2d Unproject(double col, double row) const {
    return {x0 + col * pixel_size, y0 - row * pixel_size};
  }
  /// Camera whose width x height grid is centred on (cx, cy).
  static Camera Centered(int width, int height, double cx, double cy,
                         double pixel_size);
};

/// Grayscale image, row-major, intensities in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double &at(int col, int row) { return pixels_[static_cast<size_t>(row) * width_ + col]; }
  double at(int col, int row) const {
    return pixels_[static_cast<size_t>(row) * width_ + col];
  }
  const std::vector<double> &pixels() const { return pixels_; }
  std::vector<double> &pixels() { return pixels_; }
  bool Contains(double col, double row) const {
    return col >= 0.0 && row >= 0.0 && col <= width_ - 1 && row <= height_ - 1;
  }

  /// Bilinear sample; points outside the pixel-centre hull return `outside`.
  double Sample(double col, double row, double outside = 0.0) const;
  /// Bilinear sample with edge clamping.
  double SampleClamped(double col, double row) const;

  void Validate() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

// 8-bit binary PGM (P5).  Reading maps [0, maxval] onto [0, 1].
void WritePgm(const std::string &path, const Image &img);
Image ReadPgm(const std::string &path);

}  // namespace avfront

#endif  // AVFRONT_IMAGE_H_
