// common.cc

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

#include "avfront/common.h"

#include <cstdio>

namespace avfront {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kEmptyMesh: return "EmptyMesh";
    case ErrorCode::kLandmarksOutOfFrame: return "LandmarksOutOfFrame";
    case ErrorCode::kDegenerateLandmarks: return "DegenerateLandmarks";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kInconsistentConfig: return "InconsistentConfig";
    case ErrorCode::kBadFile: return "BadFile";
    case ErrorCode::kZeroReference: return "ZeroReference";
    case ErrorCode::kZeroSignal: return "ZeroSignal";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMissingArtifacts: return "MissingArtifacts";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
  }
  return "Unknown";
}

void Fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace avfront
