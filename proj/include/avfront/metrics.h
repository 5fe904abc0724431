// avfront/metrics.h

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

#ifndef AVFRONT_METRICS_H_
#define AVFRONT_METRICS_H_

#include <span>
#include <utility>
#include <vector>

#include "avfront/spectral.h"

namespace avfront {

/// Scale-invariant SDR in dB after mean removal.  Returns +infinity when the
/// residual is numerically zero (below 1e-20 of the target energy).
double SiSdr(std::span<const double> est, std::span<const double> ref);
double SiSdr(const Waveform &est, const Waveform &ref);

/// Short-time objective intelligibility (Taal et al. 2011), clamped to [0, 1].
/// fs must be 10000 or 16000; 16 kHz input is resampled to 10 kHz first.
double Stoi(const Waveform &est, const Waveform &ref);
double Stoi(std::span<const double> est, std::span<const double> ref, int fs);

/// Polyphase rational resampler with the Kaiser-windowed sinc lowpass of
/// Octave's resample().
std::vector<double> ResamplePoly(std::span<const double> x, int up, int down);

struct Mixture {
  Waveform mixture;
  Waveform scaled_noise;
};

/// Scales `noise` so that 10 log10(|clean|^2 / |noise'|^2) == snr_db.
Mixture MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db);

/// 10 log10(|a|^2 / |b|^2).
double EnergyRatioDb(std::span<const double> a, std::span<const double> b);

}  // namespace avfront

#endif  // AVFRONT_METRICS_H_
