// avfront/registration.h

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

#ifndef AVFRONT_REGISTRATION_H_
#define AVFRONT_REGISTRATION_H_

// Robust similarity registration of an observed 3D landmark set onto a
// frontal model landmark set.  Residuals e_j = Z_j - s R X_j - t are modelled
// as isotropic trivariate Student-t; the EM alternates weight posteriors,
// (nu, sigma_e^2), and the similarity parameters.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "avfront/common.h"
#include "json.hpp"

namespace avfront {

/// Ordered 3D landmarks; column j of `points` is landmark j.  The ordering is
/// semantic and shared with the deformable model's landmark map.
class LandmarkSet {
 public:
  LandmarkSet() = default;
  explicit LandmarkSet(Eigen::Matrix3Xd points);

  int J() const { return static_cast<int>(points_.cols()); }
  const Eigen::Matrix3Xd &points() const { return points_; }
  Eigen::Vector3d operator[](int j) const { return points_.col(j); }

  /// Throws unless J >= 4 and every coordinate is finite.
  void Validate() const;

 private:
  Eigen::Matrix3Xd points_;
};

/// Similarity transform x -> scale * R * x + translation.
struct Pose {
  double scale = 1.0;
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose(); }

  Eigen::Matrix3d RotationMatrix() const { return rotation.toRotationMatrix(); }
  Eigen::Vector3d Apply(const Eigen::Vector3d &x) const {
    return scale * (rotation * x) + translation;
  }
  Pose Inverse() const;
  /// (*this) after `first`: x -> this(first(x)).
  Pose Compose(const Pose &first) const;
  /// Renormalizes the quaternion and flips its sign so that w >= 0.
  void Canonicalize();
  void Validate() const;
};

/// Angle of R_a^T R_b in degrees.
double RotationAngleDeg(const Eigen::Quaterniond &a, const Eigen::Quaterniond &b);

struct EmConfig {
  int max_iters = 100;
  double rel_tol = 1e-8;
  double nu_init = 5.0;
  double nu_min = 0.1;
  double nu_max = 100.0;
  double sigma2_floor = 1e-12;
  /// When false nu stays at nu_init (used for the Gaussian limit).
  bool estimate_nu = true;

  void Validate() const;
};

struct RobustFit {
  std::vector<double> weights;
  double nu = 0.0;
  double sigma2 = 0.0;
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;
};

struct EStepResult {
  std::vector<double> weights;
  std::vector<double> exp_log_tau;
};

/// Digamma by upward recurrence into the asymptotic series; x > 0.
double Digamma(double x);

/// Residuals Z_j - (s R X_j + t), one column per landmark.
Eigen::Matrix3Xd Residuals(const LandmarkSet &observed, const LandmarkSet &model,
                           const Pose &pose);

/// Posterior precision weights w_j = (nu + 3) / (nu + |e_j|^2 / sigma2) and
/// E[log tau_j] = psi((nu+3)/2) - log((nu + |e_j|^2/sigma2) / 2).
EStepResult EStepWeights(const Eigen::Matrix3Xd &residuals, double nu,
                         double sigma2);

/// M-step for the Student-t parameters.  sigma2 is the weighted mean squared
/// residual per coordinate; nu is the bisection root of the standard
/// fixed-point equation, clamped to [cfg.nu_min, cfg.nu_max] when the bracket
/// has no sign change.
std::pair<double, double> UpdateStudentParams(const Eigen::Matrix3Xd &residuals,
                                              std::span<const double> weights,
                                              std::span<const double> exp_log_tau,
                                              const EmConfig &cfg);

/// Same bisection with caller-supplied digamma; lets tests swap the special
/// function for an independent implementation.
double SolveNu(double mean_elogtau_minus_w, double nu_lo, double nu_hi,
               double (*digamma)(double));

/// Closed-form minimizer of sum_j w_j |Z_j - s R X_j - t|^2.  The rotation is
/// the leading eigenvector of Horn's 4x4 quaternion matrix built from the
/// weight-centred cross-covariance.
Pose SolveWeightedSimilarity(const LandmarkSet &observed, const LandmarkSet &model,
                             std::span<const double> weights);

/// sum_j w_j |Z_j - s R X_j - t|^2.
double WeightedSimilarityObjective(const LandmarkSet &observed,
                                   const LandmarkSet &model,
                                   std::span<const double> weights,
                                   const Pose &pose);

LandmarkSet ApplyPose(const Pose &pose, const LandmarkSet &points);

/// Sum of trivariate isotropic Student-t log densities of the residuals.
double LogLikelihood(const Eigen::Matrix3Xd &residuals, double nu, double sigma2);

/// Robust pose of `observed` relative to `model` (so that model ~ pose(observed)).
std::pair<Pose, RobustFit> EstimatePose(const LandmarkSet &observed,
                                        const LandmarkSet &model,
                                        const EmConfig &cfg = {});

// Pose <-> {"scale": s, "quat": [w,x,y,z], "t": [x,y,z]}.
nlohmann::json PoseToJson(const Pose &pose);
Pose PoseFromJson(const nlohmann::json &j);

}  // namespace avfront

#endif  // AVFRONT_REGISTRATION_H_
