// morphable/toy-model.cc

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

// Synthetic stand-in for a scanned face model, plus the sequence generator
// used to produce ground-truth head motion and lip articulation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "avfront/morphable.h"

namespace avfront {

namespace {

// Face extents, model units.
constexpr double kHalfWidth = 1.0;
constexpr double kHalfHeight = 1.3;
constexpr double kDepth = 0.9;
constexpr double kGridExtent = 0.9;
constexpr double kMouthY = -0.6;

// Maps u in [0, 1] to [lo, hi] so that sample spacing is inversely
// proportional to `density`.
class DensityWarp {
 public:
  DensityWarp(double lo, double hi, const std::function<double(double)> &density)
      : lo_(lo), hi_(hi) {
    constexpr int kTable = 4000;
    cdf_.resize(kTable + 1);
    cdf_[0] = 0.0;
    const double h = (hi - lo) / kTable;
    for (int i = 1; i <= kTable; ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * h * (density(lo + (i - 1) * h) + density(lo + i * h));
    for (double &c : cdf_) c /= cdf_.back();
  }

  double operator()(double u) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    size_t i = std::clamp<size_t>(it - cdf_.begin(), 1, cdf_.size() - 1);
    const double f = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
    const double h = (hi_ - lo_) / (cdf_.size() - 1);
    return lo_ + (i - 1 + std::clamp(f, 0.0, 1.0)) * h;
  }

 private:
  double lo_, hi_;
  std::vector<double> cdf_;
};

double FaceDepth(double x, double y) {
  const double r2 = (x / kHalfWidth) * (x / kHalfWidth) + (y / kHalfHeight) * (y / kHalfHeight);
  double z = kDepth * std::sqrt(std::max(0.04, 1.0 - r2));
  z += 0.3 * std::exp(-x * x / (2 * 0.08 * 0.08) - (y - 0.05) * (y - 0.05) / (2 * 0.18 * 0.18));
  return z;
}

// Mouth and face landmark targets in the 68-point order.
std::vector<Eigen::Vector2d> Ibug68Targets() {
  std::vector<Eigen::Vector2d> t;
  for (int k = 0; k <= 16; ++k) {  // jaw
    const double phi = kPi + kPi * k / 16.0;
    t.emplace_back(0.85 * std::cos(phi), 0.15 + 1.2 * std::sin(phi));
  }
  for (int side = -1; side <= 1; side += 2)  // brows
    for (int k = 0; k < 5; ++k) {
      const double x = side < 0 ? -0.7 + 0.125 * k : 0.2 + 0.125 * k;
      t.emplace_back(x, 0.55 + 0.05 * std::sin(kPi * k / 4.0));
    }
  for (int k = 0; k < 4; ++k) t.emplace_back(0.0, 0.4 - 0.13 * k);  // bridge
  for (int k = 0; k < 5; ++k) t.emplace_back(-0.15 + 0.075 * k, -0.15);  // nostrils
  for (int side = -1; side <= 1; side += 2)  // eyes
    for (int k = 0; k < 6; ++k) {
      const double a = kPi - 2 * kPi * k / 6.0;
      t.emplace_back(0.4 * side + 0.13 * std::cos(a), 0.35 + 0.05 * std::sin(a));
    }
  for (int k = 0; k < 12; ++k) {  // outer lip, from the left corner over the top
    const double a = kPi - 2 * kPi * k / 12.0;
    const double s = std::sin(a);
    t.emplace_back(0.3 * std::cos(a), kMouthY + (s > 0 ? 0.08 : 0.1) * s);
  }
  for (int k = 0; k < 8; ++k) {  // inner lip
    const double a = kPi - 2 * kPi * k / 8.0;
    t.emplace_back(0.2 * std::cos(a), kMouthY + 0.03 * std::sin(a));
  }
  return t;
}

std::vector<Eigen::Vector2d> LandmarkTargets(int J, std::mt19937_64 &rng) {
  const std::vector<Eigen::Vector2d> ibug = Ibug68Targets();
  std::uniform_real_distribution<double> ux(-0.75, 0.75), uy(-0.9, 0.7);
  if (J >= 68) {
    std::vector<Eigen::Vector2d> t = ibug;
    while (static_cast<int>(t.size()) < J) t.emplace_back(ux(rng), uy(rng));
    return t;
  }
  const int mouth = J >= 12 ? 8 : 4;
  const int face = J - mouth;
  std::vector<Eigen::Vector2d> t;
  for (int i = 0; i < std::min(face, 48); ++i) t.push_back(ibug[(i * 48) / std::min(face, 48)]);
  while (static_cast<int>(t.size()) < face) t.emplace_back(ux(rng), uy(rng));
  const Eigen::Vector2d outer[4] = {{-0.3, kMouthY}, {0.0, kMouthY + 0.08},
                                    {0.3, kMouthY}, {0.0, kMouthY - 0.1}};
  const Eigen::Vector2d inner[4] = {{-0.2, kMouthY}, {0.0, kMouthY + 0.03},
                                    {0.2, kMouthY}, {0.0, kMouthY - 0.03}};
  for (const auto &p : outer) t.push_back(p);
  if (mouth == 8)
    for (const auto &p : inner) t.push_back(p);
  return t;
}

}  // namespace

DeformableModel GenerateToyModel(uint64_t seed, int N, int K, int J) {
  Require(N >= J && J >= 4 && K >= 1, ErrorCode::kInvalidArgument,
          "toy model needs N >= J >= 4 and K >= 1");
  std::mt19937_64 rng(seed);

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N))));
  const int full_rows = N / cols, rem = N % cols;
  const int rows = full_rows + (rem > 0 ? 1 : 0);

  const double xmax = kGridExtent * kHalfWidth, ymax = kGridExtent * kHalfHeight;
  DensityWarp warp_x(-xmax, xmax, [](double x) {
    return 1.0 + 1.5 * std::exp(-x * x / (2 * 0.35 * 0.35));
  });
  DensityWarp warp_y(-ymax, ymax, [](double y) {
    return 1.0 + 5.0 * std::exp(-(y - kMouthY) * (y - kMouthY) / (2 * 0.12 * 0.12));
  });

  // Identity bumps make the mean shape depend on the seed.
  struct Bump { double x, y, w, amp; };
  std::vector<Bump> bumps;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int b = 0; b < 4; ++b)
    bumps.push_back({-0.7 + 1.4 * u01(rng), -1.0 + 1.8 * u01(rng), 0.25 + 0.2 * u01(rng),
                     0.03 * (2.0 * u01(rng) - 1.0)});

  Eigen::VectorXd mean(3 * N);
  for (int v = 0; v < N; ++v) {
    const int r = v / cols, c = v % cols;
    const double x = warp_x(cols > 1 ? c / double(cols - 1) : 0.5);
    const double y = warp_y(1.0 - r / double(rows - 1));
    double z = FaceDepth(x, y);
    for (const Bump &b : bumps)
      z += b.amp * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (2 * b.w * b.w));
    mean.segment<3>(3 * v) << x, y, z;
  }

  std::vector<Triangle> tris;
  auto exists = [&](int r, int c) { return r < full_rows || (r == full_rows && c < rem); };
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c) {
      const int v00 = r * cols + c, v01 = v00 + 1, v10 = v00 + cols, v11 = v10 + 1;
      if (exists(r + 1, c + 1)) {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      } else if (exists(r + 1, c)) {
        tris.push_back({v00, v10, v01});
      }
    }

  // Snap landmark targets to distinct nearest vertices.
  std::vector<Eigen::Vector2d> targets = LandmarkTargets(J, rng);
  std::vector<int> landmark_index;
  std::vector<char> used(N, 0);
  for (const auto &tg : targets) {
    int best = -1;
    double best_d = 1e300;
    for (int v = 0; v < N; ++v) {
      if (used[v]) continue;
      const double d = (mean.segment<2>(3 * v) - tg).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = v;
      }
    }
    used[best] = 1;
    landmark_index.push_back(best);
  }

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3 * N, K);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < K; ++k) {
    double cx = 0, cy = 0, w = 0;
    Eigen::Vector3d dir = Eigen::Vector3d::Zero();
    if (k >= 2) {
      const int lm = static_cast<int>(u01(rng) * J) % J;
      cx = mean(3 * landmark_index[lm]);
      cy = mean(3 * landmark_index[lm] + 1);
      w = 0.25 + 0.25 * u01(rng);
      dir << gauss(rng), gauss(rng), 2.0 * gauss(rng);
      dir.normalize();
    }
    for (int v = 0; v < N; ++v) {
      const double x = mean(3 * v), y = mean(3 * v + 1);
      Eigen::Vector3d d = Eigen::Vector3d::Zero();
      if (k == 0) {  // mouth opening: lower lip and jaw drop, upper lip lifts
        const double g = std::exp(-x * x / (2 * 0.22 * 0.22) -
                                  (y - kMouthY) * (y - kMouthY) / (2 * 0.18 * 0.18));
        const double s = std::tanh((y - kMouthY) / 0.03);
        d.y() = g * (s > 0 ? 0.35 * s : s);
      } else if (k == 1) {  // mouth spreading
        const double g = std::exp(-x * x / (2 * 0.3 * 0.3) -
                                  (y - kMouthY) * (y - kMouthY) / (2 * 0.15 * 0.15));
        d.x() = g * x / 0.3;
      } else {
        const double g = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * w * w));
        d = g * dir;
      }
      basis.block<3, 1>(3 * v, k) = d;
    }
  }
  const double n0 = basis.col(0).norm();
  Eigen::VectorXd eigenvalues(K);
  for (int k = 0; k < K; ++k) eigenvalues(k) = std::pow(0.1 * n0, 2) * std::pow(0.7, k);

  return DeformableModel(std::move(mean), std::move(basis), std::move(eigenvalues),
                         std::move(landmark_index), std::move(tris));
}

double UnitDisplacementCoefficient(const DeformableModel &model, int k) {
  Require(k >= 0 && k < model.K(), ErrorCode::kInvalidArgument, "basis index out of range");
  double peak = 0.0;
  for (int v = 0; v < model.N(); ++v)
    peak = std::max(peak, model.basis().block<3, 1>(3 * v, k).norm());
  Require(peak > 0.0, ErrorCode::kDegenerateInput, "basis column is zero");
  return 1.0 / peak;
}

std::vector<double> SyntheticTexture(const DeformableModel &model) {
  const Eigen::Matrix3Xd verts = AsVertices(model.mean());
  const LandmarkSet lm = model.MeanLandmarks();
  const MouthLayout layout = MouthLayoutFor(model.J());
  Eigen::Vector2d lo(1e300, 1e300), hi(-1e300, -1e300);
  for (int j : layout.outer) {
    lo = lo.cwiseMin(lm[j].head<2>());
    hi = hi.cwiseMax(lm[j].head<2>());
  }
  const Eigen::Vector2d mouth_c = 0.5 * (lo + hi);
  const double rx = std::max(0.55 * (hi.x() - lo.x()), 1e-3);
  const double ry = std::max(0.65 * (hi.y() - lo.y()), 1e-3);

  std::vector<Eigen::Vector2d> eyes;
  if (model.J() >= 68) {
    for (int e = 0; e < 2; ++e) {
      Eigen::Vector2d c(0, 0);
      for (int j = 36 + 6 * e; j < 42 + 6 * e; ++j) c += lm[j].head<2>();
      eyes.push_back(c / 6.0);
    }
  }
  const double zmax = verts.row(2).maxCoeff();
  std::vector<double> tex(model.N());
  for (int v = 0; v < model.N(); ++v) {
    const double x = verts(0, v), y = verts(1, v), z = verts(2, v);
    double val = 0.5 + 0.25 * z / zmax + 0.06 * std::sin(9.0 * x) * std::cos(7.0 * y);
    const double m = std::pow((x - mouth_c.x()) / rx, 2) + std::pow((y - mouth_c.y()) / ry, 2);
    if (m < 1.0) val *= 0.4 + 0.6 * m;
    for (const auto &e : eyes) {
      const double d2 = (Eigen::Vector2d(x, y) - e).squaredNorm();
      val -= 0.45 * std::exp(-d2 / (2 * 0.06 * 0.06));
    }
    tex[v] = std::clamp(val, 0.05, 0.95);
  }
  return tex;
}

SynthSequence SynthesizeSequence(const DeformableModel &model,
                                 const Eigen::MatrixXd &articulation,
                                 std::span<const Pose> head_motion, uint64_t seed,
                                 const SynthOptions &opts) {
  const int T = static_cast<int>(articulation.rows());
  Require(T == static_cast<int>(head_motion.size()), ErrorCode::kDimensionMismatch,
          "articulation and head-motion series differ in length");
  Require(articulation.cols() <= model.K(), ErrorCode::kDimensionMismatch,
          "more articulation channels than basis columns");
  Require(opts.outlier_fraction >= 0.0 && opts.outlier_fraction < 1.0,
          ErrorCode::kInvalidArgument, "outlier fraction must lie in [0, 1)");
  Eigen::VectorXd base = opts.identity.s.size() ? opts.identity.s
                                                : Eigen::VectorXd::Zero(model.K());
  Require(base.size() == model.K(), ErrorCode::kDimensionMismatch,
          "identity coefficients have the wrong length");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::vector<double> texture =
      opts.grid.width > 0 ? SyntheticTexture(model) : std::vector<double>{};

  SynthSequence seq;
  seq.articulation = articulation;
  seq.head_motion.assign(head_motion.begin(), head_motion.end());
  const int J = model.J();
  const int n_out = static_cast<int>(std::lround(opts.outlier_fraction * J));

  for (int t = 0; t < T; ++t) {
    ShapeCoefficients s{base};
    s.s.head(articulation.cols()) = articulation.row(t).transpose();
    const Eigen::Matrix3Xd verts = AsVertices(ReconstructVertices(model, s));
    const Pose &H = head_motion[t];
    H.Validate();
    Eigen::Matrix3Xd posed = (H.scale * H.RotationMatrix()) * verts;
    posed.colwise() += H.translation;

    seq.unposed.push_back(model.Landmarks(verts));
    LandmarkSet clean = model.Landmarks(posed);
    Eigen::Matrix3Xd obs = clean.points();
    if (opts.landmark_noise_sd > 0.0)
      for (int j = 0; j < J; ++j)
        for (int d = 0; d < 3; ++d) obs(d, j) += opts.landmark_noise_sd * noise(rng);
    if (n_out > 0) {
      const Eigen::Vector3d lo = clean.points().rowwise().minCoeff();
      const Eigen::Vector3d hi = clean.points().rowwise().maxCoeff();
      std::vector<int> idx(J);
      for (int j = 0; j < J; ++j) idx[j] = j;
      std::shuffle(idx.begin(), idx.end(), rng);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (int i = 0; i < n_out; ++i)
        for (int d = 0; d < 3; ++d) obs(d, idx[i]) = lo(d) + (hi(d) - lo(d)) * u01(rng);
    }
    seq.clean.push_back(std::move(clean));
    seq.observed.emplace_back(std::move(obs));

    if (opts.grid.width > 0)
      seq.frames.push_back(RenderIntensity(posed, model.triangles(), texture, opts.grid));
  }
  return seq;
}

}  // namespace avfront
