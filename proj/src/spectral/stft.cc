// spectral/stft.cc

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

#include <unsupported/Eigen/FFT>

#include "avfront/spectral.h"

namespace avfront {

std::vector<double> PeriodicHann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

std::vector<double> SquaredWindowOverlap(const StftConfig &cfg) {
  const std::vector<double> w = PeriodicHann(cfg.fft_size);
  std::vector<double> acc(cfg.hop, 0.0);
  for (int i = 0; i < cfg.fft_size; ++i) acc[i % cfg.hop] += w[i] * w[i];
  return acc;
}

void StftConfig::Validate() const {
  Require(fft_size >= 2 && fft_size % 2 == 0 && hop > 0 && hop <= fft_size / 2,
          ErrorCode::kInconsistentConfig, "STFT needs an even fft_size and 0 < hop <= fft_size/2");
  Require(fft_size % hop == 0, ErrorCode::kInconsistentConfig,
          "hop must divide fft_size");
  const std::vector<double> ov = SquaredWindowOverlap(*this);
  const auto [lo, hi] = std::minmax_element(ov.begin(), ov.end());
  Require(*hi - *lo <= 1e-10 * *hi, ErrorCode::kInconsistentConfig,
          "window does not satisfy the overlap-add condition at this hop");
}

Spectrogram Stft(const Waveform &w, const StftConfig &cfg) {
  cfg.Validate();
  const int n = cfg.fft_size;
  Require(static_cast<int64_t>(w.size()) >= n, ErrorCode::kTooShort,
          "signal shorter than one FFT frame");
  for (double x : w.samples) RequireFinite(x, "waveform sample");

  const int pad = cfg.center ? n / 2 : 0;
  std::vector<double> padded(w.size() + 2 * pad, 0.0);
  std::copy(w.samples.begin(), w.samples.end(), padded.begin() + pad);
  const int T = static_cast<int>((padded.size() - n) / cfg.hop) + 1;

  const std::vector<double> win = PeriodicHann(n);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(n);
  std::vector<std::complex<double>> spec;

  Spectrogram S;
  S.config = cfg;
  S.num_samples = static_cast<int64_t>(w.size());
  S.sample_rate = w.sample_rate;
  S.data.resize(cfg.NumBins(), T);
  for (int t = 0; t < T; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg.hop;
    for (int i = 0; i < n; ++i) frame[i] = padded[start + i] * win[i];
    fft.fwd(spec, frame);
    for (int f = 0; f < cfg.NumBins(); ++f) S.data(f, t) = spec[f];
  }
  return S;
}

Waveform Istft(const Spectrogram &S) {
  const StftConfig &cfg = S.config;
  cfg.Validate();
  const int n = cfg.fft_size;
  Require(S.F() == cfg.NumBins(), ErrorCode::kInconsistentConfig,
          "spectrogram has " + std::to_string(S.F()) + " bins, config expects " +
              std::to_string(cfg.NumBins()));
  Require(S.T() >= 1, ErrorCode::kInconsistentConfig, "spectrogram has no frames");
  RequireFinite(S.data, "spectrogram");

  const std::vector<double> win = PeriodicHann(n);
  const size_t padded_len = static_cast<size_t>(S.T() - 1) * cfg.hop + n;
  std::vector<double> acc(padded_len, 0.0), norm(padded_len, 0.0);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec(cfg.NumBins());
  std::vector<double> frame;
  for (int t = 0; t < S.T(); ++t) {
    for (int f = 0; f < cfg.NumBins(); ++f) spec[f] = S.data(f, t);
    fft.inv(frame, spec, n);
    const size_t start = static_cast<size_t>(t) * cfg.hop;
    for (int i = 0; i < n; ++i) {
      acc[start + i] += frame[i] * win[i];
      norm[start + i] += win[i] * win[i];
    }
  }

  const int pad = cfg.center ? n / 2 : 0;
  int64_t len = S.num_samples > 0 ? S.num_samples
                                   : static_cast<int64_t>(padded_len) - 2 * pad;
  Waveform out;
  out.sample_rate = S.sample_rate;
  out.samples.assign(len, 0.0);
  for (int64_t i = 0; i < len; ++i) {
    const size_t k = static_cast<size_t>(i + pad);
    if (k < padded_len && norm[k] > 1e-10) out.samples[i] = acc[k] / norm[k];
  }
  return out;
}

}  // namespace avfront
