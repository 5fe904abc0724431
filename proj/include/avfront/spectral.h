// avfront/spectral.h

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

#ifndef AVFRONT_SPECTRAL_H_
#define AVFRONT_SPECTRAL_H_

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avfront/common.h"

namespace avfront {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
};

struct StftConfig {
  int fft_size = 1024;
  int hop = 256;
  bool center = true;  // pad fft_size/2 zeros on both ends

  int NumBins() const { return fft_size / 2 + 1; }
  /// hop must divide fft_size and the squared window must overlap-add to a
  /// constant; throws InconsistentConfig otherwise.
  void Validate() const;
};

/// Complex F x T STFT; columns are frames.  `num_samples` is the length of
/// the analysed signal so synthesis can trim padding exactly.
struct Spectrogram {
  Eigen::MatrixXcd data;
  StftConfig config;
  int64_t num_samples = 0;
  int sample_rate = 16000;

  int F() const { return static_cast<int>(data.rows()); }
  int T() const { return static_cast<int>(data.cols()); }
  Eigen::MatrixXd Power() const { return data.cwiseAbs2(); }
};

/// Periodic Hann window of length n.
std::vector<double> PeriodicHann(int n);

/// sum_m w^2(n - m*hop) over one hop period; constant iff the config is COLA
/// for weighted overlap-add.
std::vector<double> SquaredWindowOverlap(const StftConfig &cfg);

Spectrogram Stft(const Waveform &w, const StftConfig &cfg = {});

/// Weighted overlap-add with squared-window normalization.
Waveform Istft(const Spectrogram &S);

/// PCM 16-bit mono little-endian WAV.  Other layouts are rejected.
Waveform ReadWav(const std::string &path);
void WriteWav(const std::string &path, const Waveform &w);

}  // namespace avfront

#endif  // AVFRONT_SPECTRAL_H_
