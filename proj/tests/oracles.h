// tests/oracles.h

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

#ifndef AVFRONT_TESTS_ORACLES_H_
#define AVFRONT_TESTS_ORACLES_H_

// Reference computations shared by the unit tests and the acceptance run.

#include <limits>
#include <random>
#include <vector>

#include "test-util.h"

namespace avfront {
namespace testing {

// Profile objective over the rotation: for fixed R the weighted problem in
// (s, t) is linear least squares, solved here with a generic QR.
inline double ProfileObjective(const LandmarkSet &obs, const LandmarkSet &model,
                        const std::vector<double> &w, const Eigen::Matrix3d &R, Pose *best) {
  const int J = obs.J();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * J, 4);
  Eigen::VectorXd b(3 * J);
  for (int j = 0; j < J; ++j) {
    const double sw = std::sqrt(w[j]);
    const Eigen::Vector3d rx = R * obs[j];
    for (int d = 0; d < 3; ++d) {
      A(3 * j + d, 0) = sw * rx(d);
      A(3 * j + d, 1 + d) = sw;
      b(3 * j + d) = sw * model[j](d);
    }
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  if (best) {
    best->scale = sol(0);
    best->rotation = Eigen::Quaterniond(R);
    best->translation = sol.tail<3>();
  }
  return (A * sol - b).squaredNorm();
}

inline Eigen::Matrix3d FromRotationVector(const Eigen::Vector3d &r) {
  const double a = r.norm();
  if (a == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(a, r / a).toRotationMatrix();
}

// Compass search over rotation vectors from several starts.
inline double NumericalMinimum(const LandmarkSet &obs, const LandmarkSet &model,
                        const std::vector<double> &w, std::mt19937_64 &rng) {
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 12; ++start) {
    Eigen::Vector3d r = Eigen::AngleAxisd(RandomRotation(rng)).angle() *
                        Eigen::AngleAxisd(RandomRotation(rng)).axis();
    if (start == 0) r.setZero();
    double f = ProfileObjective(obs, model, w, FromRotationVector(r), nullptr);
    for (double step = 0.5; step > 1e-11;) {
      bool moved = false;
      for (int d = 0; d < 3; ++d)
        for (double sgn : {-1.0, 1.0}) {
          Eigen::Vector3d c = r;
          c(d) += sgn * step;
          const double fc = ProfileObjective(obs, model, w, FromRotationVector(c), nullptr);
          if (fc < f) {
            f = fc;
            r = c;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    best = std::min(best, f);
  }
  return best;
}

inline LandmarkSet RandomPoints(int J, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::Matrix3Xd p(3, J);
  for (int j = 0; j < J; ++j) p.col(j) = Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
  return LandmarkSet(p);
}

// Two spectral templates; each frame picks one, scales it by a log-uniform
// gain and draws exponential powers around it.
inline FrameSet ToyFamily(int n, int F, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::exponential_distribution<double> e1(1.0);
  FrameSet s;
  s.power.resize(F, n);
  s.visual.resize(0, n);
  for (int t = 0; t < n; ++t) {
    const int c = u01(rng) < 0.5 ? 0 : 1;
    const double gain = std::exp(2.0 * u01(rng) - 1.0);
    for (int f = 0; f < F; ++f) {
      const double x = static_cast<double>(f) / (F - 1);
      const double v = c == 0 ? std::exp(3.0 * (1.0 - x))
                              : 1.0 + 4.0 * std::exp(-20.0 * (x - 0.5) * (x - 0.5));
      s.power(f, t) = gain * v * e1(rng);
    }
  }
  return s;
}

inline Eigen::MatrixXd RandomMatrix(int r, int c, uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = sd * n01(rng);
  return m;
}

// Random weights everywhere, including biases, so no gradient is trivially zero.
inline VaeParams RandomParams(int F, int L, int M, int hidden, uint64_t seed) {
  VaeParams p = InitVaeParams(F, L, M, hidden, seed);
  std::mt19937_64 rng(seed + 17);
  std::normal_distribution<double> n01;
  p.ForEachTensor([&](const char *, auto t) {
    for (int i = 0; i < t.size(); ++i) t.data()[i] += 0.2 * n01(rng);
  });
  p.input_mean = RandomMatrix(F, 1, seed + 3, 0.5).col(0);
  p.input_std = RandomMatrix(F, 1, seed + 4, 0.2).col(0).array().abs() + 0.8;
  return p;
}

inline double MaxGradientError(int M) {
  const int F = 8, L = 2, N = 3, hidden = 6;
  VaeParams p = RandomParams(F, L, M, hidden, 21 + M);
  const Eigen::MatrixXd power = RandomMatrix(F, N, 5).array().square() + 0.1;
  const Eigen::MatrixXd visual = RandomMatrix(M, N, 6);
  const Eigen::MatrixXd eps = RandomMatrix(L, N, 7);
  const ElboResult r = Elbo(p, power, visual, eps, true);

  std::vector<Eigen::MatrixXd> analytic;
  r.grad.ForEachTensor([&](const char *, auto t) { analytic.emplace_back(t); });
  std::vector<double *> data;
  std::vector<Eigen::Index> sizes;
  p.ForEachTensor([&](const char *, auto t) {
    data.push_back(t.data());
    sizes.push_back(t.size());
  });
  Require(analytic.size() == data.size(), ErrorCode::kDimensionMismatch, "gradient layout");

  const double h = 1e-5;
  double worst = 0.0;
  for (size_t k = 0; k < data.size(); ++k) {
    for (Eigen::Index i = 0; i < sizes[k]; ++i) {
      const double keep = data[k][i];
      data[k][i] = keep + h;
      const double up = Elbo(p, power, visual, eps, false).value;
      data[k][i] = keep - h;
      const double down = Elbo(p, power, visual, eps, false).value;
      data[k][i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k].data()[i];
      const double scale = std::max(std::abs(a), std::abs(numeric));
      if (scale > 0.0) worst = std::max(worst, std::abs(a - numeric) / scale);
    }
  }
  return worst;
}

}  // namespace testing
}  // namespace avfront

#endif  // AVFRONT_TESTS_ORACLES_H_
