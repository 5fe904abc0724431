// registration/pose.cc

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

#include <Eigen/Eigenvalues>

#include "avfront/registration.h"

namespace avfront {

LandmarkSet::LandmarkSet(Eigen::Matrix3Xd points) : points_(std::move(points)) {}

void LandmarkSet::Validate() const {
  Require(J() >= 4, ErrorCode::kDegenerateInput,
          "landmark set needs at least 4 points, got " + std::to_string(J()));
  RequireFinite(points_, "landmark set");
}

Pose Pose::Inverse() const {
  Pose inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.conjugate();
  inv.translation = -(inv.scale * (inv.rotation * translation));
  inv.Canonicalize();
  return inv;
}

Pose Pose::Compose(const Pose &first) const {
  Pose out;
  out.scale = scale * first.scale;
  out.rotation = rotation * first.rotation;
  out.translation = scale * (rotation * first.translation) + translation;
  out.Canonicalize();
  return out;
}

void Pose::Canonicalize() {
  rotation.normalize();
  if (rotation.w() < 0.0) rotation.coeffs() *= -1.0;
}

void Pose::Validate() const {
  Require(std::isfinite(scale) && scale > 0.0, ErrorCode::kInvalidArgument,
          "pose scale must be positive");
  RequireFinite(rotation.coeffs(), "pose rotation");
  RequireFinite(translation, "pose translation");
  Require(std::abs(rotation.norm() - 1.0) < 1e-12, ErrorCode::kInvalidArgument,
          "pose quaternion is not unit norm");
}

double RotationAngleDeg(const Eigen::Quaterniond &a, const Eigen::Quaterniond &b) {
  return Rad2Deg(a.angularDistance(b));
}

Eigen::Matrix3Xd Residuals(const LandmarkSet &observed, const LandmarkSet &model,
                           const Pose &pose) {
  Require(observed.J() == model.J(), ErrorCode::kDimensionMismatch,
          "observed and model landmark counts differ");
  Eigen::Matrix3d sr = pose.scale * pose.RotationMatrix();
  Eigen::Matrix3Xd e = model.points() - sr * observed.points();
  e.colwise() -= pose.translation;
  return e;
}

LandmarkSet ApplyPose(const Pose &pose, const LandmarkSet &points) {
  pose.Validate();
  Eigen::Matrix3Xd out = (pose.scale * pose.RotationMatrix()) * points.points();
  out.colwise() += pose.translation;
  RequireFinite(out, "ApplyPose");
  return LandmarkSet(std::move(out));
}

double WeightedSimilarityObjective(const LandmarkSet &observed,
                                   const LandmarkSet &model,
                                   std::span<const double> weights,
                                   const Pose &pose) {
  Eigen::Matrix3Xd e = Residuals(observed, model, pose);
  double obj = 0.0;
  for (int j = 0; j < e.cols(); ++j) obj += weights[j] * e.col(j).squaredNorm();
  return obj;
}

Pose SolveWeightedSimilarity(const LandmarkSet &observed, const LandmarkSet &model,
                             std::span<const double> weights) {
  const int J = observed.J();
  Require(J == model.J() && static_cast<int>(weights.size()) == J,
          ErrorCode::kDimensionMismatch, "SolveWeightedSimilarity: size mismatch");
  Require(J >= 4, ErrorCode::kDegenerateInput, "need at least 4 landmarks");
  Eigen::Map<const Eigen::VectorXd> w(weights.data(), J);
  RequireFinite(w, "weights");
  Require((w.array() > 0.0).all(), ErrorCode::kInvalidArgument,
          "weights must be positive");
  const double wsum = w.sum();
  Require(wsum > 1e-300, ErrorCode::kDegenerateInput, "weight sum vanishes");

  const Eigen::Matrix3Xd &X = observed.points();
  const Eigen::Matrix3Xd &Z = model.points();
  Eigen::Vector3d xbar = X * w / wsum;
  Eigen::Vector3d zbar = Z * w / wsum;
  Eigen::Matrix3Xd xc = X.colwise() - xbar;
  Eigen::Matrix3Xd zc = Z.colwise() - zbar;

  // S(a, b) = sum_j w_j xc_a zc_b
  Eigen::Matrix3d S = xc * w.asDiagonal() * zc.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(S);
  const Eigen::Vector3d sv = svd.singularValues();
  Require(sv(0) > 0.0 && sv(1) > 1e-10 * sv(0), ErrorCode::kDegenerateInput,
          "cross-covariance has rank < 2; rotation is not identifiable");

  const double sxx = S(0, 0), sxy = S(0, 1), sxz = S(0, 2);
  const double syx = S(1, 0), syy = S(1, 1), syz = S(1, 2);
  const double szx = S(2, 0), szy = S(2, 1), szz = S(2, 2);
  Eigen::Matrix4d N;
  N << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(N);
  Eigen::Vector4d q = eig.eigenvectors().col(3);  // ascending order

  Pose pose;
  pose.rotation = Eigen::Quaterniond(q(0), q(1), q(2), q(3));
  pose.Canonicalize();
  const Eigen::Matrix3d R = pose.RotationMatrix();
  const double num = (zc.cwiseProduct(R * xc)).colwise().sum().dot(w);
  const double den = xc.colwise().squaredNorm().dot(w);
  Require(den > 0.0 && num > 0.0, ErrorCode::kDegenerateInput,
          "similarity scale is not positive");
  pose.scale = num / den;
  pose.translation = zbar - pose.scale * (R * xbar);
  return pose;
}

nlohmann::json PoseToJson(const Pose &pose) {
  const auto &q = pose.rotation;
  return nlohmann::json{{"scale", pose.scale},
                        {"quat", {q.w(), q.x(), q.y(), q.z()}},
                        {"t", {pose.translation.x(), pose.translation.y(),
                               pose.translation.z()}}};
}

Pose PoseFromJson(const nlohmann::json &j) {
  try {
    Pose pose;
    pose.scale = j.at("scale").get<double>();
    const auto &q = j.at("quat");
    const auto &t = j.at("t");
    Require(q.size() == 4 && t.size() == 3, ErrorCode::kBadFile,
            "pose JSON needs quat[4] and t[3]");
    pose.rotation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                       q[2].get<double>(), q[3].get<double>());
    pose.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    pose.Canonicalize();
    pose.Validate();
    return pose;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kBadFile, std::string("malformed pose JSON: ") + e.what());
  }
}

}  // namespace avfront
