// tests/metrics-test.cc

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

#include "doctest.h"
#include "test-util.h"

using namespace avfront;
using namespace avfront::testing;

namespace {

double Centered(std::vector<double> *v) {
  double m = 0.0;
  for (double x : *v) m += x;
  m /= v->size();
  for (double &x : *v) x -= m;
  double e = 0.0;
  for (double x : *v) e += x * x;
  return e;
}

// Deterministic test signals shared with the external reference run below.
std::vector<double> Tonal(int n, int fs) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    const double env = 0.5 * (1.0 + std::sin(2.0 * kPi * 2.5 * i / fs));
    x[i] = env * (std::sin(2.0 * kPi * 220.0 * i / fs) + 0.5 * std::sin(2.0 * kPi * 660.0 * i / fs + 0.3) +
                  0.25 * std::sin(2.0 * kPi * 1500.0 * i / fs));
  }
  return x;
}

std::vector<double> Lcg(int n, uint64_t seed) {
  std::vector<double> out(n);
  uint64_t x = seed;
  for (int i = 0; i < n; ++i) {
    x = (1103515245ULL * x + 12345ULL) % (1ULL << 31);
    out[i] = static_cast<double>(x) / static_cast<double>(1ULL << 31) - 0.5;
  }
  return out;
}

Waveform SpeechLike(uint64_t seed) {
  const Eigen::MatrixXd art = ArticulationProgram(126, 62.5, seed);
  return SynthesizeSpeech(art, 62.5, 32000, 16000, seed + 1);
}

}  // namespace

TEST_CASE("si-sdr basics") {
  const Waveform ref = Noise(5000, 1);
  CHECK(std::isinf(SiSdr(ref, ref)));
  CHECK(SiSdr(ref, ref) > 0.0);
  Waveform scaled = ref;
  for (double &x : scaled.samples) x *= 3.7;
  CHECK(std::isinf(SiSdr(scaled, ref)));

  Waveform est = ref;
  const Waveform n = Noise(5000, 2);
  for (size_t i = 0; i < est.size(); ++i) est.samples[i] += 0.5 * n.samples[i];
  const double base = SiSdr(est, ref);
  for (double c : {-2.0, 0.01, 17.0}) {
    Waveform e2 = est;
    for (double &x : e2.samples) x *= c;
    CHECK(std::abs(SiSdr(e2, ref) - base) < 1e-9);
  }
}

TEST_CASE("si-sdr with orthogonal noise at ten percent energy") {
  std::vector<double> ref = Noise(8000, 3).samples, n = Noise(8000, 4).samples;
  const double er = Centered(&ref);
  Centered(&n);
  double dot = 0.0;
  for (size_t i = 0; i < n.size(); ++i) dot += n[i] * ref[i];
  for (size_t i = 0; i < n.size(); ++i) n[i] -= dot / er * ref[i];
  const double en = Centered(&n);
  std::vector<double> est(ref.size());
  for (size_t i = 0; i < est.size(); ++i) est[i] = ref[i] + std::sqrt(0.1 * er / en) * n[i];
  CHECK(std::abs(SiSdr(est, ref) - 10.0) < 1e-9);
}

TEST_CASE("si-sdr errors") {
  Waveform zero;
  zero.samples.assign(100, 1.0);  // constant: zero after mean removal
  try {
    SiSdr(Noise(100, 1), zero);
    FAIL("expected ZeroReference");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kZeroReference);
  }
  CHECK_THROWS_AS(SiSdr(Noise(100, 1), Noise(101, 1)), Error);
}

TEST_CASE("stoi against an independent reference") {
  // Values from pystoi 0.4.1 on the same deterministic signals.
  const int fs = 16000, n = 3 * fs;
  const std::vector<double> ref = Tonal(n, fs), noise = Lcg(n, 7);
  const std::pair<double, double> cases[] = {
      {0.1, 0.6804915644542687}, {0.5, 0.6285227472494972},
      {1.0, 0.607326630255793}, {2.0, 0.5588492492078005}};
  for (const auto &[a, expect] : cases) {
    std::vector<double> est(n);
    for (int i = 0; i < n; ++i) est[i] = ref[i] + a * noise[i];
    CHECK(std::abs(Stoi(est, ref, fs) - expect) < 1e-4);
  }
  std::vector<double> pure(n);
  for (int i = 0; i < n; ++i) pure[i] = 0.3 * noise[i];
  CHECK(std::abs(Stoi(pure, ref, fs) - 0.28761287045786943) < 1e-4);
}

TEST_CASE("stoi sanity") {
  const Waveform s = SpeechLike(5);
  CHECK(Stoi(s, s) >= 0.99);
  for (uint64_t seed : {8, 9, 10, 11}) {
    const Waveform n = Noise(static_cast<int64_t>(s.size()), seed, 0.05);
    const double v = Stoi(n, s);
    CHECK(v < 0.3);
    CHECK(v >= 0.0);
  }
  const Waveform noise = SynthesizeNoise("pink", static_cast<int64_t>(s.size()), 16000, 3);
  double prev = -1.0;
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
    const double v = Stoi(MixAtSnr(s, noise, snr).mixture, s);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("stoi errors") {
  Waveform shortw = Noise(3000, 1);
  try {
    Stoi(shortw, shortw);
    FAIL("expected TooShort");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kTooShort);
  }
  const std::vector<double> x(20000, 0.1);
  CHECK_THROWS_AS(Stoi(x, x, 8000), Error);
}

TEST_CASE("polyphase resampler") {
  const int n = 16000;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(2.0 * kPi * 300.0 * i / 16000.0);
  const std::vector<double> y = ResamplePoly(x, 5, 8);
  CHECK(y.size() == 10000u);
  double err = 0.0;
  for (int i = 500; i < 9500; ++i)
    err = std::max(err, std::abs(y[i] - std::sin(2.0 * kPi * 300.0 * i / 10000.0)));
  CHECK(err < 1e-2);
}

TEST_CASE("mixing at a target snr") {
  const Waveform s = SpeechLike(2), n = Noise(32000, 6);
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
    const Mixture m = MixAtSnr(s, n, snr);
    double es = 0.0, en = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
      es += s.samples[i] * s.samples[i];
      en += m.scaled_noise.samples[i] * m.scaled_noise.samples[i];
      CHECK(m.mixture.samples[i] == s.samples[i] + m.scaled_noise.samples[i]);
    }
    CHECK(std::abs(10.0 * std::log10(es / en) - snr) < 1e-9);
    if (snr == 0.0) CHECK(std::abs(es - en) < 1e-9 * es);
  }
  Waveform zero;
  zero.samples.assign(32000, 0.0);
  try {
    MixAtSnr(s, zero, 0.0);
    FAIL("expected ZeroSignal");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kZeroSignal);
  }
}
