// harness/synth-audio.cc

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
#include <random>

#include <unsupported/Eigen/FFT>

#include "avfront/harness.h"

namespace avfront {

namespace {

constexpr double kEdgeSilence = 0.15;  // seconds of closed mouth at each end
constexpr double kPeakAmplitude = 0.2;

double Interp(const Eigen::VectorXd &track, double pos) {
  if (pos <= 0.0) return track(0);
  const int last = static_cast<int>(track.size()) - 1;
  if (pos >= last) return track(last);
  const int i = static_cast<int>(pos);
  const double f = pos - i;
  return (1.0 - f) * track(i) + f * track(i + 1);
}

// Sum of Lorentzian resonances with a gentle high-frequency tilt.
double VocalEnvelope(double f, const double *formants, const double *bandwidths,
                     const double *gains) {
  double e = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double x = (f - formants[k]) / (0.5 * bandwidths[k]);
    e += gains[k] / (1.0 + x * x);
  }
  return e / (1.0 + f / 2000.0);
}

}  // namespace

Eigen::MatrixXd ArticulationProgram(int frames, double frame_rate, uint64_t seed) {
  Require(frames >= 2 && frame_rate > 0.0, ErrorCode::kInvalidArgument,
          "articulation program needs at least two frames");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  Eigen::MatrixXd art = Eigen::MatrixXd::Zero(frames, 2);
  const double end = (frames - 1) / frame_rate - kEdgeSilence;
  double cur = kEdgeSilence + uni(0.0, 0.05);
  while (cur + 0.12 < end) {
    const double dur = std::min(uni(0.14, 0.28), end - cur);
    const double peak = uni(0.35, 1.0);
    const double spread = uni(-1.0, 1.0);
    const int f0 = static_cast<int>(std::ceil(cur * frame_rate));
    const int f1 = static_cast<int>(std::floor((cur + dur) * frame_rate));
    for (int t = f0; t <= f1 && t < frames; ++t) {
      const double tau = (t / frame_rate - cur) / dur;
      if (tau < 0.0 || tau > 1.0) continue;
      const double s = std::sin(kPi * tau);
      art(t, 0) = peak * std::pow(s, 1.2);
      art(t, 1) = spread * std::sqrt(s);
    }
    cur += dur + (u01(rng) < 0.2 ? uni(0.12, 0.25) : uni(0.02, 0.08));
  }
  return art;
}

Waveform SynthesizeSpeech(const Eigen::MatrixXd &articulation, double frame_rate,
                          int64_t num_samples, int sample_rate, uint64_t seed) {
  Require(articulation.cols() >= 2 && articulation.rows() >= 2, ErrorCode::kInvalidArgument,
          "articulation needs opening and spreading tracks");
  Require(num_samples > 0 && sample_rate > 0, ErrorCode::kInvalidArgument,
          "speech synthesis needs a positive length and rate");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double f0_base = 100.0 + 70.0 * u01(rng);
  const double f0_rate1 = 0.8 + 0.8 * u01(rng), f0_phase1 = 2.0 * kPi * u01(rng);
  const double f0_rate2 = 2.0 + 2.0 * u01(rng), f0_phase2 = 2.0 * kPi * u01(rng);
  const double f1_base = 250.0 + 50.0 * u01(rng);
  const double f2_base = 1300.0 + 300.0 * u01(rng);
  const double duration = static_cast<double>(num_samples) / sample_rate;

  const Eigen::VectorXd open = articulation.col(0), spread = articulation.col(1);
  const double bandwidths[3] = {80.0, 110.0, 160.0};
  const double gains[3] = {1.0, 0.6, 0.3};
  const double nyquist_guard = 0.45 * sample_rate;

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(num_samples, 0.0);
  constexpr int kBlock = 16;
  std::vector<double> amps;
  double phase = 0.0;
  for (int64_t start = 0; start < num_samples; start += kBlock) {
    const double time = static_cast<double>(start) / sample_rate;
    const double a = Interp(open, time * frame_rate);
    const double b = Interp(spread, time * frame_rate);
    // Intonation: slow drift, faster wobble, and a rise on open syllables.
    const double f0 = f0_base * (1.0 + 0.12 * std::sin(2.0 * kPi * f0_rate1 * time + f0_phase1) +
                                 0.06 * std::sin(2.0 * kPi * f0_rate2 * time + f0_phase2) +
                                 0.15 * (a - 0.5) - 0.08 * time / duration);
    const int64_t stop = std::min<int64_t>(start + kBlock, num_samples);
    if (a <= 1e-4) {
      phase += f0 * (stop - start) / sample_rate;
      continue;
    }
    const double formants[3] = {f1_base + 550.0 * a, f2_base + 600.0 * b, 2600.0 + 250.0 * b};
    const int nh = static_cast<int>(std::min(7000.0, nyquist_guard) / f0);
    amps.resize(nh);
    for (int h = 1; h <= nh; ++h)
      amps[h - 1] = a * VocalEnvelope(h * f0, formants, bandwidths, gains);
    for (int64_t n = start; n < stop; ++n) {
      double s = 0.0;
      for (int h = 1; h <= nh; ++h) s += amps[h - 1] * std::sin(2.0 * kPi * h * phase);
      w.samples[n] = s;
      phase += f0 / sample_rate;
    }
    phase -= std::floor(phase);
  }
  double peak = 0.0;
  for (double x : w.samples) peak = std::max(peak, std::abs(x));
  Require(peak > 0.0, ErrorCode::kDegenerateInput, "articulation program is silent");
  for (double &x : w.samples) x *= kPeakAmplitude / peak;
  return w;
}

Waveform SynthesizeNoise(const std::string &type, int64_t num_samples, int sample_rate,
                         uint64_t seed) {
  Require(num_samples > 16, ErrorCode::kInvalidArgument, "noise length too short");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> white(num_samples);
  for (double &x : white) x = n01(rng);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, white);
  for (size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / num_samples;
    double gain;
    if (type == "pink") {
      gain = 1.0 / std::sqrt(std::max(f, 20.0) / 20.0);
    } else if (type == "rumble") {
      gain = 1.0 / (std::max(f, 20.0) / 20.0);
    } else if (type == "hiss") {
      gain = f * f / (f * f + 2000.0 * 2000.0);
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown noise type '" + type + "'");
    }
    spec[k] *= gain;
  }
  std::vector<double> shaped;
  fft.inv(shaped, spec, num_samples);

  if (type == "rumble") {
    double energy = 0.0;
    for (double x : shaped) energy += x * x;
    const double rms = std::sqrt(energy / num_samples);
    std::uniform_real_distribution<double> u01(0.0, 2.0 * kPi);
    const double mains = 50.0;
    for (int h = 1; h <= 3; ++h) {
      const double amp = rms * 0.8 / h, ph = u01(rng);
      for (int64_t n = 0; n < num_samples; ++n)
        shaped[n] += amp * std::sin(2.0 * kPi * mains * h * n / sample_rate + ph);
    }
  }
  double energy = 0.0;
  for (double x : shaped) energy += x * x;
  const double scale = 0.05 / std::sqrt(energy / num_samples);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(num_samples);
  for (int64_t n = 0; n < num_samples; ++n) w.samples[n] = scale * shaped[n];
  return w;
}

Pose PoseFromEuler(double yaw_deg, double pitch_deg, double roll_deg, double scale,
                   const Eigen::Vector3d &translation) {
  const Eigen::Matrix3d R =
      (Eigen::AngleAxisd(Deg2Rad(yaw_deg), Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(Deg2Rad(pitch_deg), Eigen::Vector3d::UnitX()) *
       Eigen::AngleAxisd(Deg2Rad(roll_deg), Eigen::Vector3d::UnitZ()))
          .toRotationMatrix();
  Pose p;
  p.scale = scale;
  p.rotation = Eigen::Quaterniond(R);
  p.translation = translation;
  p.Canonicalize();
  return p;
}

double YawDeg(const Eigen::Matrix3d &R) { return Rad2Deg(std::atan2(R(0, 2), R(2, 2))); }

std::vector<Pose> HeadMotionProgram(int frames, double frame_rate, double amplitude_deg,
                                    double scale_excursion, uint64_t seed) {
  Require(frames >= 1 && frame_rate > 0.0, ErrorCode::kInvalidArgument,
          "head motion needs at least one frame");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double freq[6], phase[6];
  for (int i = 0; i < 6; ++i) {
    freq[i] = 0.5 + 0.3 * u01(rng);
    phase[i] = 2.0 * kPi * u01(rng);
  }
  const double shift = 0.05 * amplitude_deg / 20.0;
  std::vector<Pose> out;
  out.reserve(frames);
  for (int t = 0; t < frames; ++t) {
    const double time = t / frame_rate;
    auto wave = [&](int i) { return std::sin(2.0 * kPi * freq[i] * time + phase[i]); };
    out.push_back(PoseFromEuler(amplitude_deg * wave(0), 0.5 * amplitude_deg * wave(1),
                                0.5 * amplitude_deg * wave(2),
                                1.0 + scale_excursion * wave(3),
                                Eigen::Vector3d(shift * wave(4), shift * wave(5), 0.0)));
  }
  return out;
}

}  // namespace avfront
