// metrics/metrics.cc

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
#include <limits>
#include <numeric>

#include "avfront/metrics.h"

namespace avfront {

namespace {

double Energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

}  // namespace

double SiSdr(std::span<const double> est, std::span<const double> ref) {
  Require(est.size() == ref.size() && !ref.empty(), ErrorCode::kDimensionMismatch,
          "SI-SDR needs equal, non-zero lengths");
  const double n = static_cast<double>(ref.size());
  const double me = std::accumulate(est.begin(), est.end(), 0.0) / n;
  const double mr = std::accumulate(ref.begin(), ref.end(), 0.0) / n;
  double dot = 0.0, rr = 0.0;
  for (size_t i = 0; i < ref.size(); ++i) {
    const double r = ref[i] - mr;
    dot += (est[i] - me) * r;
    rr += r * r;
  }
  Require(rr > 0.0, ErrorCode::kZeroReference, "reference signal is identically zero");
  const double alpha = dot / rr;
  double target = 0.0, resid = 0.0;
  for (size_t i = 0; i < ref.size(); ++i) {
    const double t = alpha * (ref[i] - mr);
    const double e = t - (est[i] - me);
    target += t * t;
    resid += e * e;
  }
  if (resid <= 1e-20 * target) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(target / resid);
}

double SiSdr(const Waveform &est, const Waveform &ref) {
  return SiSdr(std::span<const double>(est.samples), std::span<const double>(ref.samples));
}

double EnergyRatioDb(std::span<const double> a, std::span<const double> b) {
  return 10.0 * std::log10(Energy(a) / Energy(b));
}

Mixture MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db) {
  Require(clean.size() == noise.size(), ErrorCode::kDimensionMismatch,
          "clean and noise lengths differ");
  Require(std::isfinite(snr_db), ErrorCode::kInvalidArgument, "SNR must be finite");
  const double ec = Energy(clean.samples), en = Energy(noise.samples);
  Require(ec > 0.0 && en > 0.0, ErrorCode::kZeroSignal, "clean or noise has zero energy");
  const double gain = std::sqrt(ec / (en * std::pow(10.0, snr_db / 10.0)));
  Mixture m;
  m.scaled_noise.sample_rate = noise.sample_rate;
  m.mixture.sample_rate = clean.sample_rate;
  m.scaled_noise.samples.resize(noise.size());
  m.mixture.samples.resize(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    m.scaled_noise.samples[i] = gain * noise.samples[i];
    m.mixture.samples[i] = clean.samples[i] + m.scaled_noise.samples[i];
  }
  return m;
}

std::vector<double> ResamplePoly(std::span<const double> x, int up, int down) {
  Require(up > 0 && down > 0, ErrorCode::kInvalidArgument, "resampling factors must be positive");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if (up == 1 && down == 1) return {x.begin(), x.end()};

  // Octave resample() lowpass: 60 dB rejection, roll-off a tenth of the cutoff.
  const int m = std::max(up, down);
  const double cutoff = 1.0 / (2.0 * m);
  const double rejection_db = 60.0;
  const int half = static_cast<int>(std::ceil((rejection_db - 8.0) / (28.714 * cutoff / 10.0)));
  const double beta = 0.1102 * (rejection_db - 8.7);
  const int len = 2 * half + 1;
  const int center = half;
  std::vector<double> h(len);
  const double i0b = std::cyl_bessel_i(0.0, beta);
  double sum = 0.0;
  for (int k = 0; k < len; ++k) {
    const double t = k - center;
    const double arg = 2.0 * kPi * cutoff * t;
    const double sinc = t == 0 ? 1.0 : std::sin(arg) / arg;
    const double r = static_cast<double>(t) / half;
    const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[k] = sinc * win;
    sum += h[k];
  }
  for (double &v : h) v *= up / sum;

  const int64_t n_in = static_cast<int64_t>(x.size());
  const int64_t n_out = (n_in * up + down - 1) / down;
  std::vector<double> y(n_out, 0.0);
  for (int64_t o = 0; o < n_out; ++o) {
    // Upsampled index u = o*down; sum over k with (u + center - k) % up == 0.
    const int64_t u = o * down + center;
    int k0 = static_cast<int>(u % up);
    double acc = 0.0;
    for (int k = k0; k < len; k += up) {
      const int64_t idx = (u - k) / up;
      if (idx >= 0 && idx < n_in) acc += h[k] * x[idx];
    }
    y[o] = acc;
  }
  return y;
}

}  // namespace avfront
