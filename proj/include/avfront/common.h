// avfront/common.h

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

#ifndef AVFRONT_COMMON_H_
#define AVFRONT_COMMON_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace avfront {

/// Failure categories shared by every module. The CLI reports them by name
/// in its machine-readable error object.
enum class ErrorCode {
  kInvalidArgument,
  kDegenerateInput,
  kDimensionMismatch,
  kNonFinite,
  kSingularSystem,
  kEmptyMesh,
  kLandmarksOutOfFrame,
  kDegenerateLandmarks,
  kTooShort,
  kInconsistentConfig,
  kBadFile,
  kZeroReference,
  kZeroSignal,
  kIoError,
  kMissingArtifacts,
  kConfigMismatch,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string &what);

inline void Require(bool cond, ErrorCode code, const std::string &what) {
  if (!cond) Fail(code, what);
}

template <typename Derived>
bool AllFinite(const Eigen::DenseBase<Derived> &m) {
  return m.allFinite();
}

template <typename Derived>
void RequireFinite(const Eigen::DenseBase<Derived> &m, const std::string &what) {
  if (!m.allFinite()) Fail(ErrorCode::kNonFinite, what + ": non-finite value");
}

inline void RequireFinite(double x, const std::string &what) {
  if (!std::isfinite(x)) Fail(ErrorCode::kNonFinite, what + ": non-finite value");
}

/// 64-bit FNV-1a, used for config and manifest fingerprints.
uint64_t Fnv1a64(std::string_view bytes);

std::string HexDigest(uint64_t h);

constexpr double kPi = 3.14159265358979323846;

inline double Deg2Rad(double deg) { return deg * kPi / 180.0; }
inline double Rad2Deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace avfront

#endif  // AVFRONT_COMMON_H_
