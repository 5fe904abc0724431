// avfront/morphable.h

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

#ifndef AVFRONT_MORPHABLE_H_
#define AVFRONT_MORPHABLE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avfront/common.h"
#include "avfront/image.h"
#include "avfront/registration.h"

namespace avfront {

using Triangle = std::array<int, 3>;

/// Linear deformable mesh: vertices(s) = mean + basis * s.  Vertex v occupies
/// rows 3v..3v+2 of `mean` and `basis`.
class DeformableModel {
 public:
  DeformableModel() = default;
  /// Normalizes basis columns to unit norm (rescaling nothing that is already
  /// unit to 1e-12) and validates every invariant.
  DeformableModel(Eigen::VectorXd mean, Eigen::MatrixXd basis,
                  Eigen::VectorXd eigenvalues, std::vector<int> landmark_index,
                  std::vector<Triangle> triangles);

  int N() const { return static_cast<int>(mean_.size() / 3); }
  int K() const { return static_cast<int>(basis_.cols()); }
  int J() const { return static_cast<int>(landmark_index_.size()); }

  const Eigen::VectorXd &mean() const { return mean_; }
  const Eigen::MatrixXd &basis() const { return basis_; }
  const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }
  const std::vector<int> &landmark_index() const { return landmark_index_; }
  const std::vector<Triangle> &triangles() const { return triangles_; }

  /// Landmark positions of the mean shape.
  LandmarkSet MeanLandmarks() const;
  /// Landmark positions of an arbitrary vertex array.
  LandmarkSet Landmarks(const Eigen::Matrix3Xd &vertices) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd eigenvalues_;
  std::vector<int> landmark_index_;
  std::vector<Triangle> triangles_;
};

void SaveModelJson(const std::string &path, const DeformableModel &model);
DeformableModel LoadModelJson(const std::string &path);

/// Which landmark slots form the mouth.  J >= 68 follows the 68-point
/// convention (outer 48-59, inner 60-67, upper-lip centre 51); smaller sets
/// put the mouth in their trailing slots.
struct MouthLayout {
  std::vector<int> outer;
  std::vector<int> inner;
  int upper_lip = 0;
  int lower_lip = 0;
};
MouthLayout MouthLayoutFor(int J);

struct ShapeCoefficients {
  Eigen::VectorXd s;
};

/// Minimizes sum_j |Y_j - (mu_j + B_j s)|^2 + lambda_reg * sum_k s_k^2 / lambda_k.
ShapeCoefficients FitShape(const LandmarkSet &frontalized, const DeformableModel &model,
                           double lambda_reg = 1e-3);

struct PoseShapeFit {
  Pose pose;  // observed -> model frame
  ShapeCoefficients shape;
  double objective = 0.0;
  int iterations = 0;
};

/// Joint damped Gauss-Newton refinement of a similarity pose and shape
/// coefficients, minimizing
///   sum_j w_j |sigma R X_j + t - (mu_j + B_j s)|^2 + lambda_reg sum_k s_k^2 / lambda_k
/// from the given starting point.
PoseShapeFit RefinePoseAndShape(const LandmarkSet &observed, const DeformableModel &model,
                                std::span<const double> weights, const Pose &pose,
                                const ShapeCoefficients &shape, double lambda_reg = 0.0,
                                int max_iters = 30);

/// mean + basis * s as a flat 3N vector.
Eigen::VectorXd ReconstructVertices(const DeformableModel &model,
                                    const ShapeCoefficients &coeffs);
Eigen::Matrix3Xd AsVertices(const Eigen::VectorXd &flat);

struct DepthGrid {
  int width = 0;
  int height = 0;
  Camera camera;
};

/// Frontal depth per pixel; NaN marks pixels no triangle covers.
struct DepthMap {
  DepthGrid grid;
  std::vector<double> depth;

  bool Present(int col, int row) const {
    return !std::isnan(depth[static_cast<size_t>(row) * grid.width + col]);
  }
  double At(int col, int row) const {
    return depth[static_cast<size_t>(row) * grid.width + col];
  }
  int CoveredPixels() const;
};

/// Z-buffered barycentric rasterization; keeps the largest z per pixel.
DepthMap RenderFrontalDepth(const Eigen::Matrix3Xd &vertices,
                            std::span<const Triangle> triangles, const DepthGrid &grid);

/// Rasterizes per-vertex intensities under the same z-buffer rule.  Uncovered
/// pixels take `background`.
Image RenderIntensity(const Eigen::Matrix3Xd &vertices,
                      std::span<const Triangle> triangles,
                      std::span<const double> intensity, const DepthGrid &grid,
                      double background = 0.0);

/// Input-image pixel that frontal pixel (col, row) samples, or nothing when
/// the depth is absent.  `input_camera` describes the input image.
std::optional<Eigen::Vector2d> FrontalToInput(const Pose &pose, const DepthMap &depth,
                                              const Camera &input_camera, int col,
                                              int row);

/// Frontalizes `input`: each frontal pixel with depth d is lifted to 3D, mapped
/// through the inverse pose X = R^T (P - t) / s, projected and bilinearly
/// sampled.  Absent depth or out-of-bounds samples give 0.
Image WarpToFrontal(const Image &input, const Pose &pose, const DepthMap &depth,
                    const Camera &input_camera);
/// Same camera for input and frontal grid.
Image WarpToFrontal(const Image &input, const Pose &pose, const DepthMap &depth);

inline constexpr int kLipCropSize = 67;

struct LipCrop {
  std::vector<double> pixels;  // kLipCropSize^2, row-major, standardized
  double mean = 0.0;
  double stddev = 0.0;

  double at(int col, int row) const { return pixels[row * kLipCropSize + col]; }
  /// Min-max rescale into [0, 1] for PGM export.
  Image ToImage() const;
};

/// Square crop centred on the lip centroid, side 1.4 x the larger bounding-box
/// extent, bilinearly resampled to 67x67 and standardized.
LipCrop CropLipRegion(const Image &image, std::span<const Eigen::Vector2d> lip_landmarks);

/// 2D mouth contour for one frame (x right, y up).
struct MouthShape {
  std::vector<Eigen::Vector2d> outer;
  std::vector<Eigen::Vector2d> inner;
};

MouthShape MouthFromLandmarks(const LandmarkSet &landmarks, const MouthLayout &layout);

struct LipGeometry {
  double width = 0.0;
  double height = 0.0;
  double area = 0.0;    // shoelace area of the inner contour
  double aspect = 0.0;  // height / width
};

LipGeometry MeasureLip(const MouthShape &mouth);

/// Per frame [width, height, area, aspect, and their first differences],
/// truncated or zero-padded to M columns, each column standardized over the
/// sequence.  Returns T x M.
Eigen::MatrixXd LipFeatures(std::span<const MouthShape> frames, int M);

/// Deterministic toy head: a height-field half-ellipsoid with a nose, grid
/// rows/columns concentrated around the mouth, a 68-point style landmark map
/// and localized deformation fields.  Columns 0 and 1 (when K allows) are
/// mouth opening and mouth spreading.
DeformableModel GenerateToyModel(uint64_t seed, int N, int K, int J);

/// Coefficient that moves the largest-displaced vertex of basis column k by
/// one model unit.
double UnitDisplacementCoefficient(const DeformableModel &model, int k);

/// Per-vertex texture for synthetic renders, derived from mean-shape geometry
/// and the mouth and eye landmarks.  Values lie in [0.05, 0.95].
std::vector<double> SyntheticTexture(const DeformableModel &model);

struct SynthOptions {
  DepthGrid grid;                   // image camera; width 0 disables rendering
  double landmark_noise_sd = 0.0;   // per coordinate, model units
  double outlier_fraction = 0.0;
  ShapeCoefficients identity;       // base shape; empty means zero
};

struct SynthSequence {
  std::vector<Image> frames;
  std::vector<LandmarkSet> observed;     // posed, noisy 3D landmarks
  std::vector<LandmarkSet> clean;        // posed landmarks without noise
  std::vector<LandmarkSet> unposed;      // deformed landmarks under identity pose
  std::vector<Pose> head_motion;         // model frame -> camera frame
  Eigen::MatrixXd articulation;          // T x n, leading basis coefficients
};

/// Per frame: coefficients = identity with the first n entries overwritten by
/// the articulation row, pose by head_motion[t], then (optionally) render and
/// corrupt the landmarks.
SynthSequence SynthesizeSequence(const DeformableModel &model,
                                 const Eigen::MatrixXd &articulation,
                                 std::span<const Pose> head_motion, uint64_t seed,
                                 const SynthOptions &opts);

}  // namespace avfront

#endif  // AVFRONT_MORPHABLE_H_
