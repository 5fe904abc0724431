// tests/test-util.h

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

#ifndef AVFRONT_TESTS_TEST_UTIL_H_
#define AVFRONT_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "avfront/harness.h"

namespace avfront {
namespace testing {

inline Eigen::Quaterniond RandomRotation(std::mt19937_64 &rng) {
  std::normal_distribution<double> n01;
  Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
  q.normalize();
  return q;
}

inline double ShapeScale(const Eigen::Matrix3Xd &p) {
  const Eigen::Vector3d c = p.rowwise().mean();
  return std::sqrt((p.colwise() - c).squaredNorm() / p.cols());
}

struct RegistrationProblem {
  LandmarkSet model;
  LandmarkSet observed;
  Pose truth;  // model ~ truth(observed)
  std::vector<bool> inlier;
};

// Observed landmarks are the model mapped through truth^-1, with Gaussian
// noise of sd noise_rel * shape scale and a fraction of points replaced by
// uniform draws over the enlarged bounding box.
inline RegistrationProblem MakeRegistrationProblem(uint64_t seed, const LandmarkSet &model,
                                                   double noise_rel, double outlier_frac,
                                                   const Pose *fixed_truth = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  RegistrationProblem p;
  p.model = model;
  if (fixed_truth) {
    p.truth = *fixed_truth;
  } else {
    p.truth.rotation = RandomRotation(rng);
    p.truth.scale = 0.5 + 1.5 * u01(rng);
    p.truth.translation = Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
  }
  const int J = model.J();
  Eigen::Matrix3Xd obs = ApplyPose(p.truth.Inverse(), model).points();
  const double sd = noise_rel * ShapeScale(obs);
  for (int j = 0; j < J; ++j)
    for (int d = 0; d < 3; ++d) obs(d, j) += sd * n01(rng);
  const Eigen::Vector3d lo = obs.rowwise().minCoeff(), hi = obs.rowwise().maxCoeff();
  const Eigen::Vector3d c = 0.5 * (lo + hi), half = 0.75 * (hi - lo);
  p.inlier.assign(J, true);
  std::vector<int> idx(J);
  for (int j = 0; j < J; ++j) idx[j] = j;
  std::shuffle(idx.begin(), idx.end(), rng);
  const int n_out = static_cast<int>(std::round(outlier_frac * J));
  for (int k = 0; k < n_out; ++k) {
    const int j = idx[k];
    p.inlier[j] = false;
    for (int d = 0; d < 3; ++d) obs(d, j) = c(d) + half(d) * (2.0 * u01(rng) - 1.0);
  }
  p.observed = LandmarkSet(obs);
  return p;
}

inline const DeformableModel &ToyModel68() {
  static const DeformableModel m = GenerateToyModel(1, 1600, 12, 68);
  return m;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("avfront-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path &path() const { return path_; }
  std::string str(const std::string &leaf) const { return (path_ / leaf).string(); }

 private:
  std::filesystem::path path_;
};

inline Waveform Noise(int64_t n, uint64_t seed, double sd = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Waveform w;
  w.samples.resize(n);
  for (auto &x : w.samples) x = sd * n01(rng);
  return w;
}

}  // namespace testing
}  // namespace avfront

#endif  // AVFRONT_TESTS_TEST_UTIL_H_
