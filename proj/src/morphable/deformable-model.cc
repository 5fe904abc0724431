// morphable/deformable-model.cc

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
#include <fstream>

#include <Eigen/SVD>

#include "avfront/morphable.h"
#include "json.hpp"

namespace avfront {

DeformableModel::DeformableModel(Eigen::VectorXd mean, Eigen::MatrixXd basis,
                                 Eigen::VectorXd eigenvalues,
                                 std::vector<int> landmark_index,
                                 std::vector<Triangle> triangles)
    : mean_(std::move(mean)), basis_(std::move(basis)),
      eigenvalues_(std::move(eigenvalues)),
      landmark_index_(std::move(landmark_index)), triangles_(std::move(triangles)) {
  Require(mean_.size() > 0 && mean_.size() % 3 == 0, ErrorCode::kDimensionMismatch,
          "mean must hold 3N coordinates");
  Require(basis_.rows() == mean_.size(), ErrorCode::kDimensionMismatch,
          "basis must have 3N rows");
  Require(eigenvalues_.size() == basis_.cols(), ErrorCode::kDimensionMismatch,
          "need one eigenvalue per basis column");
  RequireFinite(mean_, "model mean");
  RequireFinite(basis_, "model basis");
  RequireFinite(eigenvalues_, "model eigenvalues");
  for (int k = 0; k < K(); ++k) {
    Require(eigenvalues_(k) > 0.0, ErrorCode::kInvalidArgument,
            "eigenvalues must be positive");
    if (k > 0)
      Require(eigenvalues_(k) <= eigenvalues_(k - 1), ErrorCode::kInvalidArgument,
              "eigenvalues must be sorted descending");
    const double n = basis_.col(k).norm();
    Require(n > 0.0, ErrorCode::kInvalidArgument, "basis column is zero");
    if (std::abs(n - 1.0) > 1e-12) basis_.col(k) /= n;
  }
  Require(!landmark_index_.empty(), ErrorCode::kInvalidArgument,
          "landmark index is empty");
  for (int v : landmark_index_)
    Require(v >= 0 && v < N(), ErrorCode::kInvalidArgument,
            "landmark index out of range");
  for (const Triangle &t : triangles_)
    for (int v : t)
      Require(v >= 0 && v < N(), ErrorCode::kInvalidArgument,
              "triangle references a missing vertex");
}

LandmarkSet DeformableModel::MeanLandmarks() const { return Landmarks(AsVertices(mean_)); }

LandmarkSet DeformableModel::Landmarks(const Eigen::Matrix3Xd &vertices) const {
  Require(vertices.cols() == N(), ErrorCode::kDimensionMismatch,
          "vertex array does not match the model");
  Eigen::Matrix3Xd pts(3, J());
  for (int j = 0; j < J(); ++j) pts.col(j) = vertices.col(landmark_index_[j]);
  return LandmarkSet(std::move(pts));
}

void SaveModelJson(const std::string &path, const DeformableModel &model) {
  nlohmann::json j;
  j["N"] = model.N();
  j["K"] = model.K();
  j["J"] = model.J();
  j["mean"] = std::vector<double>(model.mean().data(),
                                  model.mean().data() + model.mean().size());
  nlohmann::json basis = nlohmann::json::array();
  for (int r = 0; r < model.basis().rows(); ++r) {
    std::vector<double> row(model.K());
    for (int k = 0; k < model.K(); ++k) row[k] = model.basis()(r, k);
    basis.push_back(std::move(row));
  }
  j["basis"] = std::move(basis);
  j["eigenvalues"] = std::vector<double>(
      model.eigenvalues().data(), model.eigenvalues().data() + model.K());
  j["landmark_index"] = model.landmark_index();
  j["triangles"] = model.triangles();
  std::ofstream os(path);
  Require(os.good(), ErrorCode::kIoError, "cannot write " + path);
  os << j.dump();
}

DeformableModel LoadModelJson(const std::string &path) {
  std::ifstream is(path);
  Require(is.good(), ErrorCode::kIoError, "cannot open " + path);
  try {
    nlohmann::json j = nlohmann::json::parse(is);
    const int N = j.at("N"), K = j.at("K"), J = j.at("J");
    auto mean_v = j.at("mean").get<std::vector<double>>();
    auto eig_v = j.at("eigenvalues").get<std::vector<double>>();
    auto lm = j.at("landmark_index").get<std::vector<int>>();
    auto tris = j.at("triangles").get<std::vector<Triangle>>();
    const auto &basis_j = j.at("basis");
    Require(static_cast<int>(mean_v.size()) == 3 * N &&
                static_cast<int>(eig_v.size()) == K &&
                static_cast<int>(lm.size()) == J &&
                static_cast<int>(basis_j.size()) == 3 * N,
            ErrorCode::kBadFile, path + ": declared N/K/J disagree with arrays");
    Eigen::MatrixXd basis(3 * N, K);
    for (int r = 0; r < 3 * N; ++r) {
      const auto &row = basis_j[r];
      Require(static_cast<int>(row.size()) == K, ErrorCode::kBadFile,
              path + ": basis row has wrong length");
      for (int k = 0; k < K; ++k) basis(r, k) = row[k].get<double>();
    }
    return DeformableModel(Eigen::Map<Eigen::VectorXd>(mean_v.data(), 3 * N),
                           std::move(basis),
                           Eigen::Map<Eigen::VectorXd>(eig_v.data(), K),
                           std::move(lm), std::move(tris));
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kBadFile, path + ": " + e.what());
  }
}

MouthLayout MouthLayoutFor(int J) {
  Require(J >= 4, ErrorCode::kInvalidArgument, "mouth layout needs J >= 4");
  MouthLayout m;
  if (J >= 68) {
    for (int j = 48; j < 60; ++j) m.outer.push_back(j);
    for (int j = 60; j < 68; ++j) m.inner.push_back(j);
    m.upper_lip = 51;
    m.lower_lip = 57;
  } else if (J >= 12) {
    // left corner, top, right corner, bottom; outer ring then inner ring
    for (int j = J - 8; j < J - 4; ++j) m.outer.push_back(j);
    for (int j = J - 4; j < J; ++j) m.inner.push_back(j);
    m.upper_lip = J - 7;
    m.lower_lip = J - 5;
  } else {
    for (int j = J - 4; j < J; ++j) m.outer.push_back(j);
    m.inner = m.outer;
    m.upper_lip = J - 3;
    m.lower_lip = J - 1;
  }
  return m;
}

Eigen::Matrix3Xd AsVertices(const Eigen::VectorXd &flat) {
  Require(flat.size() % 3 == 0, ErrorCode::kDimensionMismatch,
          "vertex array length must be a multiple of 3");
  return Eigen::Map<const Eigen::Matrix3Xd>(flat.data(), 3, flat.size() / 3);
}

Eigen::VectorXd ReconstructVertices(const DeformableModel &model,
                                    const ShapeCoefficients &coeffs) {
  Require(coeffs.s.size() == model.K(), ErrorCode::kDimensionMismatch,
          "expected " + std::to_string(model.K()) + " coefficients, got " +
              std::to_string(coeffs.s.size()));
  RequireFinite(coeffs.s, "shape coefficients");
  return model.mean() + model.basis() * coeffs.s;
}

ShapeCoefficients FitShape(const LandmarkSet &frontalized, const DeformableModel &model,
                           double lambda_reg) {
  Require(frontalized.J() == model.J(), ErrorCode::kDimensionMismatch,
          "landmark count does not match the model");
  Require(lambda_reg >= 0.0 && std::isfinite(lambda_reg), ErrorCode::kInvalidArgument,
          "lambda_reg must be nonnegative");
  RequireFinite(frontalized.points(), "frontalized landmarks");
  const int J = model.J(), K = model.K();

  Eigen::MatrixXd B(3 * J, K);
  Eigen::VectorXd r(3 * J);
  for (int j = 0; j < J; ++j) {
    const int v = model.landmark_index()[j];
    B.middleRows(3 * j, 3) = model.basis().middleRows(3 * v, 3);
    r.segment(3 * j, 3) = frontalized[j] - model.mean().segment(3 * v, 3);
  }

  // Least squares on the stacked system; the prior rows carry sqrt(lambda/lambda_k).
  Eigen::MatrixXd A(3 * J + K, K);
  A.topRows(3 * J) = B;
  A.bottomRows(K) = (lambda_reg * model.eigenvalues().cwiseInverse()).cwiseSqrt().asDiagonal();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * J + K);
  rhs.head(3 * J) = r;

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(K - 1);
  Require(smax > 0.0 && smin > 1e-6 * smax, ErrorCode::kSingularSystem,
          "shape normal equations are singular (3J=" + std::to_string(3 * J) +
              ", K=" + std::to_string(K) + ")");

  ShapeCoefficients out;
  out.s = svd.solve(rhs);
  RequireFinite(out.s, "FitShape solution");
  return out;
}

}  // namespace avfront
