// morphable/pose-shape.cc

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

#include <cmath>

#include "avfront/morphable.h"

namespace avfront {

namespace {

Eigen::Matrix3d Skew(const Eigen::Vector3d &v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

struct Problem {
  const LandmarkSet &observed;
  const DeformableModel &model;
  std::span<const double> w;
  double lambda_reg;

  Eigen::Vector3d Residual(const Pose &p, const Eigen::VectorXd &s, int j) const {
    const int v = model.landmark_index()[j];
    return p.scale * (p.rotation * observed[j]) + p.translation -
           model.mean().segment<3>(3 * v) - model.basis().middleRows(3 * v, 3) * s;
  }

  double Objective(const Pose &p, const Eigen::VectorXd &s) const {
    double f = 0.0;
    for (int j = 0; j < observed.J(); ++j) f += w[j] * Residual(p, s, j).squaredNorm();
    return f + lambda_reg * (s.array().square() / model.eigenvalues().array()).sum();
  }
};

}  // namespace

PoseShapeFit RefinePoseAndShape(const LandmarkSet &observed, const DeformableModel &model,
                                std::span<const double> weights, const Pose &pose,
                                const ShapeCoefficients &shape, double lambda_reg,
                                int max_iters) {
  const int J = observed.J(), K = model.K(), P = 7 + K;
  Require(J == model.J() && static_cast<int>(weights.size()) == J &&
              shape.s.size() == K,
          ErrorCode::kDimensionMismatch, "pose/shape refinement inputs differ in size");
  Require(lambda_reg >= 0.0 && max_iters >= 0, ErrorCode::kInvalidArgument,
          "refinement needs lambda_reg >= 0 and max_iters >= 0");
  for (double x : weights)
    Require(std::isfinite(x) && x >= 0.0, ErrorCode::kInvalidArgument,
            "refinement weights must be finite and nonnegative");
  RequireFinite(observed.points(), "observed landmarks");

  const Problem prob{observed, model, weights, lambda_reg};
  PoseShapeFit fit;
  fit.pose = pose;
  fit.shape = shape;
  fit.objective = prob.Objective(pose, shape.s);
  double damping = 1e-9;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P, P);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(P);
    Eigen::MatrixXd Jj(3, P);
    const Eigen::Matrix3d R = fit.pose.RotationMatrix();
    for (int j = 0; j < J; ++j) {
      const int v = model.landmark_index()[j];
      const Eigen::Vector3d rx = fit.pose.scale * (R * observed[j]);
      Jj.leftCols<3>() = -Skew(rx);
      Jj.col(3) = rx;
      Jj.middleCols<3>(4).setIdentity();
      Jj.rightCols(K) = -model.basis().middleRows(3 * v, 3);
      const Eigen::Vector3d e = prob.Residual(fit.pose, fit.shape.s, j);
      A.noalias() += weights[j] * Jj.transpose() * Jj;
      g.noalias() += weights[j] * Jj.transpose() * e;
    }
    const Eigen::VectorXd prior = lambda_reg * model.eigenvalues().cwiseInverse();
    A.diagonal().tail(K) += prior;
    g.tail(K) += prior.cwiseProduct(fit.shape.s);

    bool accepted = false;
    for (int tries = 0; tries < 20 && !accepted; ++tries) {
      Eigen::MatrixXd M = A;
      M.diagonal() += damping * A.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      Pose trial = fit.pose;
      const Eigen::Vector3d dw = step.head<3>();
      if (dw.norm() > 0.0)
        trial.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(dw.norm(), dw.normalized())) *
                         trial.rotation;
      trial.rotation.normalize();
      trial.scale *= std::exp(step(3));
      trial.translation += step.segment<3>(4);
      const Eigen::VectorXd s = fit.shape.s + step.tail(K);
      const double f = prob.Objective(trial, s);
      if (f <= fit.objective) {
        const double prev = fit.objective;
        fit.pose = trial;
        fit.shape.s = s;
        fit.objective = f;
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        fit.iterations = it + 1;
        if (prev - f <= 1e-15 * std::max(prev, 1e-300)) it = max_iters;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted) break;
  }
  fit.pose.Canonicalize();
  return fit;
}

}  // namespace avfront
