// registration/student-em.cc

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

#include "avfront/registration.h"

namespace avfront {

namespace {

constexpr double kDim = 3.0;

// Rank of the centred point cloud, judged from its scatter singular values.
int PointSpan(const Eigen::Matrix3Xd &pts) {
  Eigen::Vector3d c = pts.rowwise().mean();
  Eigen::Matrix3d scatter = (pts.colwise() - c) * (pts.colwise() - c).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(scatter);
  Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(0) > 0.0)) return 0;
  int rank = 1;
  for (int i = 1; i < 3; ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  return rank;
}

}  // namespace

void EmConfig::Validate() const {
  Require(max_iters > 0 && rel_tol > 0.0 && nu_init > 0.0 && nu_min > 0.0 &&
              nu_max > nu_min && sigma2_floor > 0.0,
          ErrorCode::kInvalidArgument, "EmConfig: fields must be positive and "
                                       "nu bounds ordered");
}

double Digamma(double x) {
  Require(x > 0.0 && std::isfinite(x), ErrorCode::kInvalidArgument,
          "Digamma: argument must be positive and finite");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  // Bernoulli-number asymptotic series.
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

EStepResult EStepWeights(const Eigen::Matrix3Xd &residuals, double nu,
                         double sigma2) {
  Require(nu > 0.0 && sigma2 > 0.0, ErrorCode::kInvalidArgument,
          "EStepWeights: nu and sigma2 must be positive");
  RequireFinite(residuals, "EStepWeights residuals");
  const int J = static_cast<int>(residuals.cols());
  EStepResult out;
  out.weights.resize(J);
  out.exp_log_tau.resize(J);
  const double psi = Digamma(0.5 * (nu + kDim));
  for (int j = 0; j < J; ++j) {
    const double denom = nu + residuals.col(j).squaredNorm() / sigma2;
    out.weights[j] = (nu + kDim) / denom;
    out.exp_log_tau[j] = psi - std::log(0.5 * denom);
    RequireFinite(out.weights[j], "EStepWeights weight");
  }
  return out;
}

double SolveNu(double c, double nu_lo, double nu_hi, double (*digamma)(double)) {
  // f is strictly decreasing in nu, so the root is unique when bracketed.
  auto f = [&](double nu) { return 1.0 + std::log(0.5 * nu) - digamma(0.5 * nu) + c; };
  double flo = f(nu_lo), fhi = f(nu_hi);
  if (flo <= 0.0) return nu_lo;
  if (fhi >= 0.0) return nu_hi;
  double lo = nu_lo, hi = nu_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> UpdateStudentParams(const Eigen::Matrix3Xd &residuals,
                                              std::span<const double> weights,
                                              std::span<const double> exp_log_tau,
                                              const EmConfig &cfg) {
  const int J = static_cast<int>(residuals.cols());
  Require(static_cast<int>(weights.size()) == J &&
              static_cast<int>(exp_log_tau.size()) == J && J > 0,
          ErrorCode::kDimensionMismatch, "UpdateStudentParams: size mismatch");
  double wr = 0.0, c = 0.0;
  for (int j = 0; j < J; ++j) {
    wr += weights[j] * residuals.col(j).squaredNorm();
    c += exp_log_tau[j] - weights[j];
  }
  c /= J;
  const double sigma2 = std::max(cfg.sigma2_floor, wr / (kDim * J));
  const double nu = SolveNu(c, cfg.nu_min, cfg.nu_max, &Digamma);
  RequireFinite(sigma2, "sigma2 update");
  RequireFinite(nu, "nu update");
  return {nu, sigma2};
}

double LogLikelihood(const Eigen::Matrix3Xd &residuals, double nu, double sigma2) {
  Require(nu > 0.0 && sigma2 > 0.0, ErrorCode::kInvalidArgument,
          "LogLikelihood: nu and sigma2 must be positive");
  const double log_norm = std::lgamma(0.5 * (nu + kDim)) - std::lgamma(0.5 * nu) -
                          0.5 * kDim * std::log(nu * kPi * sigma2);
  double ll = 0.0;
  for (int j = 0; j < residuals.cols(); ++j) {
    const double delta = residuals.col(j).squaredNorm() / sigma2;
    ll += log_norm - 0.5 * (nu + kDim) * std::log1p(delta / nu);
  }
  RequireFinite(ll, "LogLikelihood");
  return ll;
}

std::pair<Pose, RobustFit> EstimatePose(const LandmarkSet &observed,
                                        const LandmarkSet &model,
                                        const EmConfig &cfg) {
  cfg.Validate();
  Require(observed.J() == model.J(), ErrorCode::kDimensionMismatch,
          "observed has " + std::to_string(observed.J()) + " landmarks, model has " +
              std::to_string(model.J()));
  observed.Validate();
  model.Validate();
  Require(PointSpan(observed.points()) >= 2 && PointSpan(model.points()) >= 2,
          ErrorCode::kDegenerateInput,
          "landmarks are coincident or collinear; rotation is unidentifiable");

  const int J = observed.J();
  Pose pose;
  pose.translation = model.points().rowwise().mean() - observed.points().rowwise().mean();

  Eigen::Matrix3Xd e = Residuals(observed, model, pose);
  double nu = cfg.nu_init;
  double sigma2 = std::max(cfg.sigma2_floor, e.squaredNorm() / (kDim * J));

  RobustFit fit;
  double ll = LogLikelihood(e, nu, sigma2);
  fit.log_likelihood_trace.push_back(ll);

  for (int it = 0; it < cfg.max_iters; ++it) {
    EStepResult es = EStepWeights(e, nu, sigma2);

    auto [nu_new, sigma2_new] = UpdateStudentParams(e, es.weights, es.exp_log_tau, cfg);
    if (cfg.estimate_nu) nu = nu_new;
    sigma2 = sigma2_new;

    pose = SolveWeightedSimilarity(observed, model, es.weights);
    e = Residuals(observed, model, pose);

    const double ll_new = LogLikelihood(e, nu, sigma2);
    fit.log_likelihood_trace.push_back(ll_new);
    fit.iterations = it + 1;
    const bool small = std::abs(ll_new - ll) <= cfg.rel_tol * std::max(1.0, std::abs(ll));
    ll = ll_new;
    if (small) {
      fit.converged = true;
      break;
    }
  }

  fit.weights = EStepWeights(e, nu, sigma2).weights;
  fit.nu = nu;
  fit.sigma2 = sigma2;
  return {pose, fit};
}

}  // namespace avfront
