// morphable/raster.cc

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
#include <limits>

#include "avfront/morphable.h"

namespace avfront {

namespace {

constexpr double kInsideSlack = 1e-9;

// Fills `depth` (NaN = empty) and, when `attr` is non-empty, the interpolated
// per-vertex attribute of the winning triangle.
void Rasterize(const Eigen::Matrix3Xd &vertices, std::span<const Triangle> triangles,
               const DepthGrid &grid, std::span<const double> attr,
               std::vector<double> *depth, std::vector<double> *attr_out) {
  Require(vertices.cols() > 0 && !triangles.empty(), ErrorCode::kEmptyMesh,
          "cannot render an empty mesh");
  Require(grid.width > 0 && grid.height > 0 && grid.camera.pixel_size > 0.0,
          ErrorCode::kInvalidArgument, "render grid must be non-empty");
  RequireFinite(vertices, "render vertices");
  const size_t npix = static_cast<size_t>(grid.width) * grid.height;
  depth->assign(npix, std::numeric_limits<double>::quiet_NaN());
  if (attr_out) attr_out->assign(npix, 0.0);

  std::vector<Eigen::Vector2d> px(vertices.cols());
  for (int v = 0; v < vertices.cols(); ++v) px[v] = grid.camera.Project(vertices.col(v));

  for (const Triangle &tri : triangles) {
    for (int v : tri)
      Require(v >= 0 && v < vertices.cols(), ErrorCode::kInvalidArgument,
              "triangle references a missing vertex");
    const Eigen::Vector2d &a = px[tri[0]], &b = px[tri[1]], &c = px[tri[2]];
    const double area = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    if (std::abs(area) < 1e-14) continue;

    const int c0 = std::max(0, static_cast<int>(std::ceil(std::min({a.x(), b.x(), c.x()}) - 1e-9)));
    const int c1 = std::min(grid.width - 1,
                            static_cast<int>(std::floor(std::max({a.x(), b.x(), c.x()}) + 1e-9)));
    const int r0 = std::max(0, static_cast<int>(std::ceil(std::min({a.y(), b.y(), c.y()}) - 1e-9)));
    const int r1 = std::min(grid.height - 1,
                            static_cast<int>(std::floor(std::max({a.y(), b.y(), c.y()}) + 1e-9)));
    const double za = vertices(2, tri[0]), zb = vertices(2, tri[1]), zc = vertices(2, tri[2]);

    for (int r = r0; r <= r1; ++r) {
      for (int col = c0; col <= c1; ++col) {
        const double x = col, y = r;
        const double w0 = ((b.x() - x) * (c.y() - y) - (c.x() - x) * (b.y() - y)) / area;
        const double w1 = ((c.x() - x) * (a.y() - y) - (a.x() - x) * (c.y() - y)) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < -kInsideSlack || w1 < -kInsideSlack || w2 < -kInsideSlack) continue;
        const double z = w0 * za + w1 * zb + w2 * zc;
        const size_t idx = static_cast<size_t>(r) * grid.width + col;
        double &d = (*depth)[idx];
        if (std::isnan(d) || z > d) {
          d = z;
          if (attr_out)
            (*attr_out)[idx] = w0 * attr[tri[0]] + w1 * attr[tri[1]] + w2 * attr[tri[2]];
        }
      }
    }
  }
}

}  // namespace

int DepthMap::CoveredPixels() const {
  int n = 0;
  for (double d : depth) n += !std::isnan(d);
  return n;
}

DepthMap RenderFrontalDepth(const Eigen::Matrix3Xd &vertices,
                            std::span<const Triangle> triangles, const DepthGrid &grid) {
  DepthMap out;
  out.grid = grid;
  Rasterize(vertices, triangles, grid, {}, &out.depth, nullptr);
  return out;
}

Image RenderIntensity(const Eigen::Matrix3Xd &vertices,
                      std::span<const Triangle> triangles,
                      std::span<const double> intensity, const DepthGrid &grid,
                      double background) {
  Require(static_cast<Eigen::Index>(intensity.size()) == vertices.cols(),
          ErrorCode::kDimensionMismatch, "need one intensity per vertex");
  std::vector<double> depth, attr;
  Rasterize(vertices, triangles, grid, intensity, &depth, &attr);
  Image img(grid.width, grid.height, background);
  for (size_t i = 0; i < depth.size(); ++i)
    if (!std::isnan(depth[i])) img.pixels()[i] = std::clamp(attr[i], 0.0, 1.0);
  return img;
}

std::optional<Eigen::Vector2d> FrontalToInput(const Pose &pose, const DepthMap &depth,
                                              const Camera &input_camera, int col,
                                              int row) {
  if (!depth.Present(col, row)) return std::nullopt;
  const Eigen::Vector2d xy = depth.grid.camera.Unproject(col, row);
  const Eigen::Vector3d P(xy.x(), xy.y(), depth.At(col, row));
  const Eigen::Vector3d X = pose.rotation.conjugate() * (P - pose.translation) / pose.scale;
  return input_camera.Project(X);
}

Image WarpToFrontal(const Image &input, const Pose &pose, const DepthMap &depth,
                    const Camera &input_camera) {
  pose.Validate();
  const DepthGrid &g = depth.grid;
  Image out(g.width, g.height, 0.0);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      auto q = FrontalToInput(pose, depth, input_camera, c, r);
      if (q) out.at(c, r) = input.Sample(q->x(), q->y(), 0.0);
    }
  }
  return out;
}

Image WarpToFrontal(const Image &input, const Pose &pose, const DepthMap &depth) {
  return WarpToFrontal(input, pose, depth, depth.grid.camera);
}

}  // namespace avfront
