// enhance/nmf.cc

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
#include <random>

#include "avfront/enhance.h"

namespace avfront {

void NmfNoiseModel::Validate(int F, int T) const {
  Require(W.rows() == F && H.cols() == T && W.cols() == H.rows() && g.size() == T &&
              W.cols() >= 1,
          ErrorCode::kDimensionMismatch,
          "noise model is not F x Kn, Kn x T with T gains for F=" + std::to_string(F) +
              ", T=" + std::to_string(T));
  RequireFinite(W, "W");
  RequireFinite(H, "H");
  RequireFinite(g, "g");
}

NmfNoiseModel InitNoiseModel(const Eigen::MatrixXd &power, int Kn, uint64_t seed) {
  Require(Kn >= 1, ErrorCode::kInvalidArgument, "NMF rank must be at least 1");
  Require(power.size() > 0, ErrorCode::kInvalidArgument, "empty power matrix");
  const int F = static_cast<int>(power.rows()), T = static_cast<int>(power.cols());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  NmfNoiseModel m;
  m.W.resize(F, Kn);
  m.H.resize(Kn, T);
  for (int k = 0; k < Kn; ++k)
    for (int f = 0; f < F; ++f) m.W(f, k) = u(rng);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < Kn; ++k) m.H(k, t) = u(rng);
  m.g = Eigen::VectorXd::Ones(T);

  const double target = power.leftCols(std::min(3, T)).mean();
  const double current = (m.W * m.H).mean();
  const double c = std::sqrt(std::max(target, 1e-12) / current);
  m.W *= c;
  m.H *= c;
  return m;
}

NmfNoiseModel InitNoiseModel(const Spectrogram &noisy, int Kn, uint64_t seed) {
  return InitNoiseModel(noisy.Power(), Kn, seed);
}

Eigen::MatrixXd ObservedVariance(const Eigen::MatrixXd &speech_var,
                                 const NmfNoiseModel &model) {
  Eigen::MatrixXd v = model.W * model.H;
  v += speech_var * model.g.asDiagonal();
  return v;
}

double IsDivergence(const Eigen::MatrixXd &power, const Eigen::MatrixXd &variance,
                    double floor) {
  Require(power.rows() == variance.rows() && power.cols() == variance.cols(),
          ErrorCode::kDimensionMismatch, "IS divergence needs equal shapes");
  const Eigen::ArrayXXd r = power.array().max(floor) / variance.array();
  return (r - r.log() - 1.0).sum();
}

NmfNoiseModel MStepNmf(const Eigen::MatrixXd &power, const Eigen::MatrixXd &speech_var,
                       const NmfNoiseModel &model, double floor, bool update_gain) {
  const int F = static_cast<int>(power.rows()), T = static_cast<int>(power.cols());
  Require(speech_var.rows() == F && speech_var.cols() == T, ErrorCode::kDimensionMismatch,
          "speech variance does not match the observed power");
  model.Validate(F, T);
  Require(floor > 0.0, ErrorCode::kInvalidArgument, "floor must be positive");

  NmfNoiseModel m = model;
  Eigen::MatrixXd vo, a, b;
  auto refresh = [&] {
    vo = ObservedVariance(speech_var, m);
    a = (power.array() / vo.array().square()).matrix();  // P / v_o^2
    b = vo.cwiseInverse();                               // 1 / v_o
  };

  refresh();
  m.H = (m.H.array() * ((m.W.transpose() * a).array() / (m.W.transpose() * b).array()).sqrt())
            .max(floor)
            .matrix();
  refresh();
  m.W = (m.W.array() * ((a * m.H.transpose()).array() / (b * m.H.transpose()).array()).sqrt())
            .max(floor)
            .matrix();
  if (update_gain) {
    refresh();
    const Eigen::VectorXd num = (a.array() * speech_var.array()).colwise().sum().transpose();
    const Eigen::VectorXd den = (b.array() * speech_var.array()).colwise().sum().transpose();
    m.g = (m.g.array() * (num.array() / den.array()).sqrt()).max(floor).matrix();
  }
  RequireFinite(m.W, "W after NMF update");
  RequireFinite(m.H, "H after NMF update");
  RequireFinite(m.g, "g after NMF update");
  return m;
}

Eigen::VectorXcd WienerFilter(const Eigen::VectorXcd &o, const Eigen::VectorXd &v_s,
                              const Eigen::VectorXd &v_b) {
  Require(o.size() == v_s.size() && o.size() == v_b.size(), ErrorCode::kDimensionMismatch,
          "Wiener filter inputs differ in length");
  return (o.array() * (v_s.array() / (v_s.array() + v_b.array())).cast<std::complex<double>>())
      .matrix();
}

Eigen::MatrixXcd WienerFilter(const Eigen::MatrixXcd &o, const Eigen::MatrixXd &v_s,
                              const Eigen::MatrixXd &v_b) {
  Require(o.rows() == v_s.rows() && o.cols() == v_s.cols() && o.rows() == v_b.rows() &&
              o.cols() == v_b.cols(),
          ErrorCode::kDimensionMismatch, "Wiener filter inputs differ in shape");
  return (o.array() * (v_s.array() / (v_s.array() + v_b.array())).cast<std::complex<double>>())
      .matrix();
}

}  // namespace avfront
