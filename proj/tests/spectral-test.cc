// tests/spectral-test.cc

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

#include <complex>
#include <fstream>

#include "doctest.h"
#include "test-util.h"

using namespace avfront;
using namespace avfront::testing;

TEST_CASE("stft of silence is zero") {
  Waveform w;
  w.samples.assign(4000, 0.0);
  CHECK(Stft(w).data.cwiseAbs().maxCoeff() == 0.0);
  const Spectrogram S = Stft(w);
  CHECK(S.F() == 513);
  CHECK(S.T() == (4000 + 1024 - 1024) / 256 + 1);
}

TEST_CASE("impulse at a frame position") {
  const StftConfig cfg;
  const std::vector<double> win = PeriodicHann(cfg.fft_size);
  Waveform w;
  w.samples.assign(8192, 0.0);
  const int frame = 10, offset = 300;
  // Frame m starts at sample m*hop - fft_size/2 under centre padding.
  w.samples[frame * cfg.hop - cfg.fft_size / 2 + offset] = 1.0;
  const Spectrogram S = Stft(w);
  for (int k = 0; k < S.F(); ++k) CHECK(std::abs(S.data(k, frame)) == doctest::Approx(win[offset]).epsilon(1e-12));
  for (int k = 0; k < S.F(); ++k) CHECK(std::abs(S.data(k, frame)) == doctest::Approx(std::abs(S.data(0, frame))));
}

TEST_CASE("sinusoid energy concentrates at its bin") {
  const int N = 1024;
  Waveform w;
  w.samples.resize(16000);
  for (size_t n = 0; n < w.size(); ++n) w.samples[n] = std::sin(2.0 * kPi * 16.0 * n / N + 0.4);
  const Spectrogram S = Stft(w);
  const Eigen::VectorXd p = S.data.col(20).cwiseAbs2();
  CHECK(p.segment(15, 3).sum() >= 0.99 * p.sum());

  // Direct DFT of the windowed frame.
  const std::vector<double> win = PeriodicHann(N);
  const int start = 20 * 256 - N / 2;
  for (int k : {0, 5, 16, 17, 200, 512}) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < N; ++n)
      acc += win[n] * w.samples[start + n] * std::polar(1.0, -2.0 * kPi * k * n / N);
    CHECK(std::abs(acc - S.data(k, 20)) < 1e-9);
  }
}

TEST_CASE("stft round trip") {
  const Waveform x = Noise(20000, 2, 0.3);
  const Waveform y = Istft(Stft(x));
  REQUIRE(y.size() == x.size());
  double err = 0.0;
  for (size_t n = 0; n < x.size(); ++n) err = std::max(err, std::abs(x.samples[n] - y.samples[n]));
  CHECK(err < 1e-6);

  Spectrogram zero = Stft(x);
  zero.data.setZero();
  for (double v : Istft(zero).samples) CHECK(v == 0.0);
}

TEST_CASE("istft is linear") {
  Spectrogram a = Stft(Noise(9000, 3)), b = Stft(Noise(9000, 4));
  Spectrogram sum = a;
  sum.data += b.data;
  const Waveform ya = Istft(a), yb = Istft(b), ys = Istft(sum);
  for (size_t n = 0; n < ys.size(); ++n) CHECK(std::abs(ys.samples[n] - ya.samples[n] - yb.samples[n]) < 1e-9);
}

TEST_CASE("squared window overlap is constant") {
  const std::vector<double> s = SquaredWindowOverlap(StftConfig{});
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  CHECK(*hi - *lo < 1e-10);
  CHECK(*lo == doctest::Approx(1.5).epsilon(1e-12));  // 4 frames x 3/8
  StftConfig bad;
  bad.hop = 384;
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad.hop = 768;
  CHECK_THROWS_AS(bad.Validate(), Error);
}

TEST_CASE("parseval over fully overlapped frames") {
  Waveform x = Noise(12000, 5);
  for (size_t n = 0; n < x.size(); ++n)
    if (n < 2048 || n + 2048 >= x.size()) x.samples[n] = 0.0;
  const Spectrogram S = Stft(x);
  double spec = 0.0;
  for (int t = 0; t < S.T(); ++t)
    for (int k = 0; k < S.F(); ++k)
      spec += (k == 0 || k == S.F() - 1 ? 1.0 : 2.0) * std::norm(S.data(k, t));
  double time = 0.0;
  for (double v : x.samples) time += v * v;
  CHECK(spec / (1024.0 * 1.5) == doctest::Approx(time).epsilon(1e-6));
}

TEST_CASE("stft errors") {
  Waveform w;
  w.samples.assign(100, 0.0);
  try {
    Stft(w);
    FAIL("expected TooShort");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kTooShort);
  }
  Spectrogram S = Stft(Noise(4000, 1));
  S.data.conservativeResize(100, S.T());
  try {
    Istft(S);
    FAIL("expected InconsistentConfig");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kInconsistentConfig);
  }
}

TEST_CASE("wav io") {
  TempDir dir("wav");
  Waveform w = Noise(1000, 9, 0.2);
  WriteWav(dir.str("a.wav"), w);
  const Waveform r = ReadWav(dir.str("a.wav"));
  REQUIRE(r.size() == w.size());
  CHECK(r.sample_rate == 16000);
  for (size_t n = 0; n < w.size(); ++n) CHECK(std::abs(r.samples[n] - w.samples[n]) <= 1.0 / 32767.0);
  // Writing what was read is lossless.
  WriteWav(dir.str("b.wav"), r);
  CHECK(ReadWav(dir.str("b.wav")).samples == r.samples);

  // An 8-bit file is rejected.
  std::string bytes = "RIFF";
  auto u32 = [&](uint32_t v) { for (int i = 0; i < 4; ++i) bytes.push_back(char((v >> (8 * i)) & 0xff)); };
  auto u16 = [&](uint16_t v) { for (int i = 0; i < 2; ++i) bytes.push_back(char((v >> (8 * i)) & 0xff)); };
  u32(36 + 4);
  bytes += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(1);
  u32(16000);
  u32(16000);
  u16(1);
  u16(8);
  bytes += "data";
  u32(4);
  bytes += "abcd";
  {
    std::ofstream os(dir.str("c.wav"), std::ios::binary);
    os << bytes;
  }
  try {
    ReadWav(dir.str("c.wav"));
    FAIL("expected BadFile");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kBadFile);
  }
}
