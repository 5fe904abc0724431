// prior/prior-io.cc

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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "avfront/prior.h"

namespace avfront {

namespace {

nlohmann::json VectorJson(const Eigen::VectorXd &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd VectorFromJson(const nlohmann::json &j, int expect, const char *what) {
  const std::vector<double> v = j.get<std::vector<double>>();
  Require(static_cast<int>(v.size()) == expect, ErrorCode::kBadFile,
          std::string(what) + " has the wrong length");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

nlohmann::json VaeParamsToJson(const VaeParams &params) {
  params.Validate();
  nlohmann::json j;
  j["F"] = params.F;
  j["L"] = params.L;
  j["M"] = params.M;
  j["hidden"] = params.hidden;
  j["seed"] = params.seed;
  j["input_mean"] = VectorJson(params.input_mean);
  j["input_std"] = VectorJson(params.input_std);
  nlohmann::json tensors = nlohmann::json::object();
  params.ForEachTensor([&tensors](const char *name, auto t) {
    // Column-major flat data, matching Eigen's storage.
    tensors[name] = {{"shape", {t.rows(), t.cols()}},
                     {"data", std::vector<double>(t.data(), t.data() + t.size())}};
  });
  j["tensors"] = std::move(tensors);
  return j;
}

VaeParams VaeParamsFromJson(const nlohmann::json &j) {
  try {
    VaeParams p = InitVaeParams(j.at("F").get<int>(), j.at("L").get<int>(),
                                j.at("M").get<int>(), j.at("hidden").get<int>(), 0);
    p.seed = j.at("seed").get<uint64_t>();
    p.input_mean = VectorFromJson(j.at("input_mean"), p.F, "input_mean");
    p.input_std = VectorFromJson(j.at("input_std"), p.F, "input_std");
    const nlohmann::json &tensors = j.at("tensors");
    p.ForEachTensor([&tensors](const char *name, auto t) {
      const nlohmann::json &e = tensors.at(name);
      const auto shape = e.at("shape").get<std::vector<int64_t>>();
      Require(shape.size() == 2 && shape[0] == t.rows() && shape[1] == t.cols(),
              ErrorCode::kBadFile, std::string("tensor ") + name + " has the wrong shape");
      const auto data = e.at("data").get<std::vector<double>>();
      Require(static_cast<int64_t>(data.size()) == t.size(), ErrorCode::kBadFile,
              std::string("tensor ") + name + " has the wrong element count");
      std::copy(data.begin(), data.end(), t.data());
    });
    p.Validate();
    return p;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kBadFile, std::string("malformed VAE parameters: ") + e.what());
  }
}

void SaveVaeParams(const std::string &path, const VaeParams &params,
                   const nlohmann::json &extra) {
  nlohmann::json j = VaeParamsToJson(params);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream os(path);
  Require(os.good(), ErrorCode::kIoError, "cannot write " + path);
  os << j.dump() << "\n";
  Require(os.good(), ErrorCode::kIoError, "write failed: " + path);
}

VaeParams LoadVaeParams(const std::string &path, nlohmann::json *extra) {
  std::ifstream is(path);
  Require(is.good(), ErrorCode::kIoError, "cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kBadFile, path + ": " + e.what());
  }
  if (extra) *extra = j;
  return VaeParamsFromJson(j);
}

void WriteOraclePrior(const std::string &path, const Eigen::MatrixXd &v) {
  Require((v.array() >= 0.0).all() && v.allFinite(), ErrorCode::kInvalidArgument,
          "variance field must be finite and nonnegative");
  std::ofstream os(path);
  Require(os.good(), ErrorCode::kIoError, "cannot write " + path);
  os << v.rows() << " " << v.cols() << "\n";
  for (int f = 0; f < v.rows(); ++f) {
    for (int t = 0; t < v.cols(); ++t) os << (t ? "," : "") << FormatDouble(v(f, t));
    os << "\n";
  }
  Require(os.good(), ErrorCode::kIoError, "write failed: " + path);
}

Eigen::MatrixXd ReadOraclePrior(const std::string &path, int expect_F, int expect_T) {
  std::ifstream is(path);
  Require(is.good(), ErrorCode::kIoError, "cannot open " + path);
  std::string line;
  long F = 0, T = 0;
  Require(static_cast<bool>(std::getline(is, line)), ErrorCode::kBadFile,
          path + ": missing header");
  {
    std::istringstream hs(line);
    std::string rest;
    Require(static_cast<bool>(hs >> F >> T) && !(hs >> rest) && F > 0 && T > 0,
            ErrorCode::kBadFile, path + ": header must be 'F T'");
  }
  Require((expect_F < 0 || F == expect_F) && (expect_T < 0 || T == expect_T),
          ErrorCode::kDimensionMismatch,
          path + ": field is " + std::to_string(F) + " x " + std::to_string(T) +
              ", expected " + std::to_string(expect_F) + " x " + std::to_string(expect_T));
  Eigen::MatrixXd v(F, T);
  for (long f = 0; f < F; ++f) {
    Require(static_cast<bool>(std::getline(is, line)), ErrorCode::kBadFile,
            path + ": expected " + std::to_string(F) + " rows");
    const char *p = line.c_str();
    for (long t = 0; t < T; ++t) {
      char *end = nullptr;
      const double x = std::strtod(p, &end);
      Require(end != p, ErrorCode::kBadFile,
              path + ": malformed entry at row " + std::to_string(f) + ", column " +
                  std::to_string(t));
      Require(std::isfinite(x) && x >= 0.0, ErrorCode::kBadFile,
              path + ": negative or non-finite entry at row " + std::to_string(f) +
                  ", column " + std::to_string(t));
      v(f, t) = x == 0.0 ? 1e-10 : x;
      p = end;
      if (t + 1 < T) {
        Require(*p == ',', ErrorCode::kBadFile,
                path + ": expected " + std::to_string(T) + " columns in row " +
                    std::to_string(f));
        ++p;
      }
    }
    while (*p == ' ' || *p == '\r') ++p;
    Require(*p == '\0', ErrorCode::kBadFile,
            path + ": trailing data in row " + std::to_string(f));
  }
  return v;
}

}  // namespace avfront
