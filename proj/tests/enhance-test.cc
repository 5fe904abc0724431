// tests/enhance-test.cc

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

Eigen::MatrixXd Uniform(int r, int c, std::mt19937_64 &rng, double lo = 0.1, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

NmfNoiseModel RandomModel(int F, int T, int Kn, std::mt19937_64 &rng) {
  NmfNoiseModel m;
  m.W = Uniform(F, Kn, rng);
  m.H = Uniform(Kn, T, rng);
  m.g = Uniform(T, 1, rng, 0.5, 1.5).col(0);
  return m;
}

// Independent evaluation of sum P/V - log(P/V) - 1 with V = g * vs + W H.
double DirectDivergence(const Eigen::MatrixXd &P, const Eigen::MatrixXd &vs,
                        const NmfNoiseModel &m) {
  double d = 0.0;
  for (int f = 0; f < P.rows(); ++f)
    for (int t = 0; t < P.cols(); ++t) {
      double v = m.g(t) * vs(f, t);
      for (int k = 0; k < m.Kn(); ++k) v += m.W(f, k) * m.H(k, t);
      const double r = std::max(P(f, t), 1e-12) / v;
      d += r - std::log(r) - 1.0;
    }
  return d;
}

Utterance TestUtterance(uint64_t seed) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.render_frames = false;
  return SynthesizeUtterance(cfg, CorpusModel(cfg), Split::kTest, 0);
}

}  // namespace

TEST_CASE("noise model initialization is seeded and matches the leading power") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd P = Uniform(20, 30, rng, 0.0, 5.0);
  const NmfNoiseModel a = InitNoiseModel(P, 4, 7), b = InitNoiseModel(P, 4, 7);
  CHECK(a.W == b.W);
  CHECK(a.H == b.H);
  CHECK(InitNoiseModel(P, 4, 8).W != a.W);
  CHECK(a.g == Eigen::VectorXd::Ones(30));
  CHECK((a.W * a.H).mean() == doctest::Approx(P.leftCols(3).mean()).epsilon(1e-9));
}

TEST_CASE("a rank-one noise field is fitted exactly with one component") {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd w = Uniform(10, 1, rng).col(0), h = Uniform(12, 1, rng).col(0);
  const Eigen::MatrixXd P = w * h.transpose();
  const Eigen::MatrixXd vs = Eigen::MatrixXd::Constant(10, 12, 1e-15);
  NmfNoiseModel m = InitNoiseModel(P, 1, 3);
  for (int it = 0; it < 3000; ++it) m = MStepNmf(P, vs, m, 1e-12, false);
  const double d = IsDivergence(P, ObservedVariance(vs, m));
  MESSAGE("IS divergence after fitting " << d);
  CHECK(d < 1e-6);
}

TEST_CASE("updates leave an exact fit unchanged") {
  std::mt19937_64 rng(4);
  const NmfNoiseModel m = RandomModel(6, 5, 2, rng);
  const Eigen::MatrixXd vs = Uniform(6, 5, rng);
  const Eigen::MatrixXd P = ObservedVariance(vs, m);
  const NmfNoiseModel n = MStepNmf(P, vs, m);
  CHECK((n.W - m.W).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((n.H - m.H).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((n.g - m.g).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("one update strictly lowers the divergence on the seed 9 instance") {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd P = Uniform(6, 5, rng, 0.0, 4.0);
  const Eigen::MatrixXd vs = Uniform(6, 5, rng);
  const NmfNoiseModel m = RandomModel(6, 5, 2, rng);
  const double before = DirectDivergence(P, vs, m);
  CHECK(IsDivergence(P, ObservedVariance(vs, m)) == doctest::Approx(before).epsilon(1e-12));
  const NmfNoiseModel n = MStepNmf(P, vs, m);
  const double after = DirectDivergence(P, vs, n);
  MESSAGE(before << " -> " << after);
  CHECK(after < before);
}

TEST_CASE("the divergence never increases across updates") {
  int bad = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_int_distribution<int> dim(2, 12);
    const int F = dim(rng), T = dim(rng), Kn = dim(rng) % 4 + 1;
    const Eigen::MatrixXd P = Uniform(F, T, rng, 0.0, 10.0).array().square();
    const Eigen::MatrixXd vs = Uniform(F, T, rng, 0.01, 3.0);
    NmfNoiseModel m = RandomModel(F, T, Kn, rng);
    double prev = DirectDivergence(P, vs, m);
    for (int it = 0; it < 20; ++it) {
      m = MStepNmf(P, vs, m, 1e-12, seed % 2 == 0);
      const double d = DirectDivergence(P, vs, m);
      if (d > prev + 1e-9) ++bad;
      prev = d;
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("the floor keeps factors positive on silent frames") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd P = Uniform(6, 5, rng);
  P.col(2).setZero();
  const Eigen::MatrixXd vs = Uniform(6, 5, rng);
  NmfNoiseModel m = RandomModel(6, 5, 2, rng);
  for (int it = 0; it < 200; ++it) m = MStepNmf(P, vs, m);
  CHECK(m.W.minCoeff() >= 1e-12);
  CHECK(m.H.minCoeff() >= 1e-12);
  CHECK(m.g.minCoeff() >= 1e-12);
  CHECK(m.W.allFinite());
  CHECK(m.H.allFinite());
}

TEST_CASE("Wiener filter limits") {
  std::mt19937_64 rng(6);
  Eigen::VectorXcd o(8);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 8; ++i) o(i) = {n01(rng), n01(rng)};
  const Eigen::VectorXd vs = Uniform(8, 1, rng).col(0);

  const Eigen::VectorXcd pass = WienerFilter(o, vs, Eigen::VectorXd::Constant(8, 1e-300));
  CHECK((pass - o).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXcd half = WienerFilter(o, vs, vs);
  CHECK((half - 0.5 * o).cwiseAbs().maxCoeff() == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd a = Uniform(8, 1, rng, 1e-6, 1e3).col(0);
    const Eigen::VectorXd b = Uniform(8, 1, rng, 1e-6, 1e3).col(0);
    const Eigen::VectorXcd out = WienerFilter(o, a, b);
    for (int i = 0; i < 8; ++i) {
      const double gain = std::abs(out(i)) / std::abs(o(i));
      CHECK(gain > 0.0);
      CHECK(gain < 1.0);
      CHECK(std::abs(out(i)) <= std::abs(o(i)));
    }
  }
}

TEST_CASE("equal speech and noise variances halve the spectrogram") {
  const Spectrogram S = Stft(Noise(16000, 3));
  const Eigen::MatrixXd v = S.Power().cwiseMax(1e-10);
  const Eigen::MatrixXcd out = WienerFilter(S.data, v, v);
  CHECK((out - 0.5 * S.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a noiseless input with the oracle prior passes through") {
  const Utterance u = TestUtterance(3);
  const Spectrogram S = Stft(u.clean);
  const VemResult r = VemEnhance(S, S.Power().cwiseMax(1e-10), VemConfig{});
  const double sdr = SiSdr(Istft(r.enhanced), u.clean);
  MESSAGE("SI-SDR " << sdr);
  CHECK(sdr > 30.0);
}

TEST_CASE("the oracle prior improves a 0 dB mixture by at least 5 dB") {
  const Utterance u = TestUtterance(6);
  const Mixture mix = MixAtSnr(u.clean, u.noise, 0.0);
  const Spectrogram S = Stft(mix.mixture);
  const VemResult r = VemEnhance(S, Stft(u.clean).Power().cwiseMax(1e-10), VemConfig{});
  const double gain = SiSdr(Istft(r.enhanced), u.clean) - SiSdr(mix.mixture, u.clean);
  MESSAGE("improvement " << gain << " dB");
  CHECK(gain >= 5.0);
  const auto &trace = r.diagnostics.divergence_trace;
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-6);
}

TEST_CASE("the learned-prior loop reports a non-increasing divergence") {
  const Utterance u = TestUtterance(7);
  const Mixture mix = MixAtSnr(u.clean, u.noise, 5.0);
  const Spectrogram S = Stft(mix.mixture);
  VaeParams prior = InitVaeParams(S.F(), 4, 0, 16, 1);
  SetInputStatistics(Stft(u.clean).Power(), &prior);
  VemConfig cfg;
  cfg.outer_iters = 15;
  const VemResult r = VemEnhance(S, prior, Eigen::MatrixXd(0, S.T()), cfg);
  const auto &trace = r.diagnostics.divergence_trace;
  REQUIRE(trace.size() == static_cast<size_t>(r.diagnostics.iters + 1));
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-6);
  CHECK(r.enhanced.data.allFinite());
  CHECK(r.diagnostics.rejected_latent_updates <= r.diagnostics.iters);

  const VemResult again = VemEnhance(S, prior, Eigen::MatrixXd(0, S.T()), cfg);
  CHECK(again.enhanced.data == r.enhanced.data);
}

TEST_CASE("mismatched inputs are rejected") {
  const Spectrogram S = Stft(Noise(8000, 1));
  try {
    VemEnhance(S, Eigen::MatrixXd::Ones(10, S.T()), VemConfig{});
    FAIL("accepted a mismatched oracle field");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  VemConfig bad;
  bad.Kn = 0;
  try {
    VemEnhance(S, S.Power().cwiseMax(1e-10), bad);
    FAIL("accepted Kn = 0");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kInconsistentConfig);
  }
  NmfNoiseModel m = InitNoiseModel(S.Power(), 2, 0);
  try {
    MStepNmf(S.Power(), Eigen::MatrixXd::Ones(3, 3), m);
    FAIL("accepted a mismatched speech variance");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}
