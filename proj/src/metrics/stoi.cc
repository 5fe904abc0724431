// metrics/stoi.cc

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

// STOI following Taal, Hendriks, Heusdens, Jensen (2011): 10 kHz, 256-sample
// frames at 50% overlap, 512-point FFT, 15 third-octave bands from 150 Hz,
// 40 dB silent-frame removal, 30-frame segments, -15 dB clipping.

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "avfront/metrics.h"

namespace avfront {

namespace {

constexpr int kFs = 10000;
constexpr int kFrameLen = 256;
constexpr int kHop = kFrameLen / 2;
constexpr int kNfft = 512;
constexpr int kNumBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegment = 30;
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Symmetric Hann without the zero end points (MATLAB hanning()).
std::vector<double> MatlabHanning(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * (i + 1) / (n + 1));
  return w;
}

// Frame starts used throughout: 0, hop, ... while start < len - framelen.
int NumFrames(size_t len) {
  if (len <= static_cast<size_t>(kFrameLen)) return 0;
  return static_cast<int>((len - kFrameLen - 1) / kHop) + 1;
}

void RemoveSilentFrames(std::vector<double> *x, std::vector<double> *y) {
  const std::vector<double> w = MatlabHanning(kFrameLen);
  const int nf = NumFrames(x->size());
  std::vector<double> energy(nf);
  for (int f = 0; f < nf; ++f) {
    double e = 0.0;
    for (int i = 0; i < kFrameLen; ++i) {
      const double v = w[i] * (*x)[f * kHop + i];
      e += v * v;
    }
    energy[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
  }
  const double emax = nf ? *std::max_element(energy.begin(), energy.end()) : 0.0;
  std::vector<int> keep;
  for (int f = 0; f < nf; ++f)
    if (emax - kDynRange - energy[f] < 0.0) keep.push_back(f);

  const size_t out_len = keep.empty() ? 0 : (keep.size() - 1) * kHop + kFrameLen;
  std::vector<double> xs(out_len, 0.0), ys(out_len, 0.0);
  for (size_t k = 0; k < keep.size(); ++k)
    for (int i = 0; i < kFrameLen; ++i) {
      xs[k * kHop + i] += w[i] * (*x)[keep[k] * kHop + i];
      ys[k * kHop + i] += w[i] * (*y)[keep[k] * kHop + i];
    }
  *x = std::move(xs);
  *y = std::move(ys);
}

// Third-octave band magnitudes, kNumBands x frames.
Eigen::MatrixXd BandEnvelopes(const std::vector<double> &x) {
  static const Eigen::MatrixXd obm = [] {
    const int nbins = kNfft / 2 + 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kNumBands, nbins);
    auto nearest = [&](double freq) {
      int best = 0;
      double bd = 1e300;
      for (int b = 0; b < nbins; ++b) {
        const double f = static_cast<double>(kFs) * b / kNfft;
        if ((f - freq) * (f - freq) < bd) {
          bd = (f - freq) * (f - freq);
          best = b;
        }
      }
      return best;
    };
    for (int k = 0; k < kNumBands; ++k) {
      const int lo = nearest(kMinFreq * std::pow(2.0, (2.0 * k - 1.0) / 6.0));
      const int hi = nearest(kMinFreq * std::pow(2.0, (2.0 * k + 1.0) / 6.0));
      for (int b = lo; b < hi; ++b) m(k, b) = 1.0;
    }
    return m;
  }();

  const std::vector<double> w = MatlabHanning(kFrameLen);
  const int nf = NumFrames(x.size());
  Eigen::MatrixXd power(kNfft / 2 + 1, nf);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(kNfft, 0.0);
  std::vector<std::complex<double>> spec;
  for (int f = 0; f < nf; ++f) {
    for (int i = 0; i < kFrameLen; ++i) frame[i] = w[i] * x[f * kHop + i];
    fft.fwd(spec, frame);
    for (int b = 0; b <= kNfft / 2; ++b) power(b, f) = std::norm(spec[b]);
  }
  return (obm * power).cwiseSqrt();
}

}  // namespace

double Stoi(std::span<const double> est, std::span<const double> ref, int fs) {
  Require(est.size() == ref.size(), ErrorCode::kDimensionMismatch,
          "STOI needs equal-length signals");
  Require(fs == 10000 || fs == 16000, ErrorCode::kInvalidArgument,
          "STOI supports 10 kHz and 16 kHz input");
  std::vector<double> x, y;  // x: clean reference, y: processed
  if (fs == kFs) {
    x.assign(ref.begin(), ref.end());
    y.assign(est.begin(), est.end());
  } else {
    x = ResamplePoly(ref, 5, 8);
    y = ResamplePoly(est, 5, 8);
  }
  RemoveSilentFrames(&x, &y);
  const Eigen::MatrixXd X = BandEnvelopes(x);
  const Eigen::MatrixXd Y = BandEnvelopes(y);
  Require(X.cols() >= kSegment, ErrorCode::kTooShort,
          "fewer than 30 non-silent frames for STOI");

  const double clip = std::pow(10.0, -kBeta / 20.0);
  double total = 0.0;
  int count = 0;
  for (int m = kSegment; m <= X.cols(); ++m) {
    for (int b = 0; b < kNumBands; ++b) {
      Eigen::VectorXd xs = X.row(b).segment(m - kSegment, kSegment).transpose();
      Eigen::VectorXd ys = Y.row(b).segment(m - kSegment, kSegment).transpose();
      const double alpha = xs.norm() / (ys.norm() + kEps);
      Eigen::VectorXd yp = (ys * alpha).cwiseMin(xs * (1.0 + clip));
      yp.array() -= yp.mean();
      xs.array() -= xs.mean();
      yp /= yp.norm() + kEps;
      xs /= xs.norm() + kEps;
      total += xs.dot(yp);
      ++count;
    }
  }
  return std::clamp(total / count, 0.0, 1.0);
}

double Stoi(const Waveform &est, const Waveform &ref) {
  Require(est.sample_rate == ref.sample_rate, ErrorCode::kInvalidArgument,
          "STOI inputs have different sample rates");
  return Stoi(std::span<const double>(est.samples), std::span<const double>(ref.samples),
              ref.sample_rate);
}

}  // namespace avfront
