// morphable/lip.cc

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

#include "avfront/morphable.h"

namespace avfront {

namespace {

constexpr double kCropMargin = 1.4;
constexpr int kBaseLipFeatures = 8;

void StandardizeInPlace(std::vector<double> *v, double *mean, double *stddev) {
  double m = 0.0;
  for (double x : *v) m += x;
  m /= v->size();
  double var = 0.0;
  for (double x : *v) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / v->size());
  for (double &x : *v) x -= m;
  // A constant crop keeps its zero-mean values; dividing would blow up noise.
  if (sd > 1e-12)
    for (double &x : *v) x /= sd;
  *mean = m;
  *stddev = sd;
}

}  // namespace

Image LipCrop::ToImage() const {
  Image img(kLipCropSize, kLipCropSize, 0.5);
  const auto [lo, hi] = std::minmax_element(pixels.begin(), pixels.end());
  if (*hi - *lo <= 0.0) return img;
  for (size_t i = 0; i < pixels.size(); ++i)
    img.pixels()[i] = (pixels[i] - *lo) / (*hi - *lo);
  return img;
}

LipCrop CropLipRegion(const Image &image, std::span<const Eigen::Vector2d> lip_landmarks) {
  Require(lip_landmarks.size() >= 4, ErrorCode::kInvalidArgument,
          "lip crop needs at least 4 landmarks");
  Eigen::Vector2d lo(1e300, 1e300), hi(-1e300, -1e300), centroid(0, 0);
  for (const auto &p : lip_landmarks) {
    Require(p.allFinite() && image.Contains(p.x(), p.y()),
            ErrorCode::kLandmarksOutOfFrame, "lip landmark lies outside the image");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
    centroid += p;
  }
  centroid /= static_cast<double>(lip_landmarks.size());
  const double side = kCropMargin * std::max(hi.x() - lo.x(), hi.y() - lo.y());
  Require(side > 0.0, ErrorCode::kDegenerateLandmarks, "lip landmarks coincide");

  LipCrop crop;
  crop.pixels.resize(kLipCropSize * kLipCropSize);
  const double step = side / kLipCropSize;
  const double c0 = centroid.x() - 0.5 * side, r0 = centroid.y() - 0.5 * side;
  for (int r = 0; r < kLipCropSize; ++r)
    for (int c = 0; c < kLipCropSize; ++c)
      crop.pixels[r * kLipCropSize + c] =
          image.SampleClamped(c0 + (c + 0.5) * step, r0 + (r + 0.5) * step);
  StandardizeInPlace(&crop.pixels, &crop.mean, &crop.stddev);
  return crop;
}

MouthShape MouthFromLandmarks(const LandmarkSet &landmarks, const MouthLayout &layout) {
  MouthShape m;
  for (int j : layout.outer) m.outer.emplace_back(landmarks[j].x(), landmarks[j].y());
  for (int j : layout.inner) m.inner.emplace_back(landmarks[j].x(), landmarks[j].y());
  return m;
}

LipGeometry MeasureLip(const MouthShape &mouth) {
  Require(mouth.outer.size() >= 3, ErrorCode::kDegenerateLandmarks,
          "outer lip contour needs at least 3 points");
  Eigen::Vector2d lo(1e300, 1e300), hi(-1e300, -1e300);
  for (const auto &p : mouth.outer) {
    Require(p.allFinite(), ErrorCode::kDegenerateLandmarks, "non-finite lip landmark");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  LipGeometry g;
  g.width = hi.x() - lo.x();
  g.height = hi.y() - lo.y();
  Require(g.width > 0.0, ErrorCode::kDegenerateLandmarks, "mouth has zero width");
  const auto &ring = mouth.inner.size() >= 3 ? mouth.inner : mouth.outer;
  double twice = 0.0;
  for (size_t i = 0; i < ring.size(); ++i) {
    const auto &a = ring[i], &b = ring[(i + 1) % ring.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  g.area = 0.5 * std::abs(twice);
  g.aspect = g.height / g.width;
  return g;
}

Eigen::MatrixXd LipFeatures(std::span<const MouthShape> frames, int M) {
  Require(M >= 4, ErrorCode::kInvalidArgument, "lip features need M >= 4");
  const int T = static_cast<int>(frames.size());
  Require(T >= 1, ErrorCode::kInvalidArgument, "lip features need at least one frame");

  Eigen::MatrixXd base(T, kBaseLipFeatures);
  for (int t = 0; t < T; ++t) {
    const LipGeometry g = MeasureLip(frames[t]);
    base.row(t).head<4>() << g.width, g.height, g.area, g.aspect;
    if (t == 0)
      base.row(t).tail<4>().setZero();
    else
      base.row(t).tail<4>() = base.row(t).head<4>() - base.row(t - 1).head<4>();
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, M);
  const int used = std::min(M, kBaseLipFeatures);
  for (int k = 0; k < used; ++k) {
    Eigen::VectorXd col = base.col(k);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / T);
    if (sd > 1e-12)
      col /= sd;
    else
      col.setZero();
    out.col(k) = col;
  }
  return out;
}

}  // namespace avfront
