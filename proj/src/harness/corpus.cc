// harness/corpus.cc

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
#include <random>

#include "avfront/harness.h"

namespace avfront {

namespace {

uint64_t SubSeed(uint64_t seed, uint64_t k) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Frame index prefix for errors raised inside per-frame processing.
template <typename Fn>
auto AtFrame(int t, Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    Fail(e.code(), "frame " + std::to_string(t) + ": " + e.what());
  }
}

}  // namespace

DeformableModel CorpusModel(const ExperimentConfig &cfg) {
  return GenerateToyModel(SubSeed(cfg.seed, 1000), cfg.model_vertices, cfg.model_basis,
                          cfg.landmarks);
}

DepthGrid ImageGrid(const ExperimentConfig &cfg) {
  DepthGrid g;
  g.width = g.height = cfg.image_size;
  g.camera = Camera::Centered(g.width, g.height, 0.0, 0.0, 3.2 / cfg.image_size);
  return g;
}

int VisualFrames(const ExperimentConfig &cfg) {
  const StftConfig stft;
  const int64_t n = std::llround(cfg.duration_s * cfg.sample_rate);
  const int64_t padded = n + (stft.center ? stft.fft_size : 0);
  return static_cast<int>((padded - stft.fft_size) / stft.hop) + 1;
}

double FrameRate(const ExperimentConfig &cfg) {
  return static_cast<double>(cfg.sample_rate) / StftConfig().hop;
}

Utterance SynthesizeUtterance(const ExperimentConfig &cfg, const DeformableModel &model,
                              Split split, int index, double head_motion_deg) {
  Utterance u;
  u.split = split;
  u.seed = UtteranceSeed(cfg.seed, split, index);
  char id[32];
  std::snprintf(id, sizeof(id), "%s%03d", SplitName(split), index);
  u.id = id;

  const int64_t n = std::llround(cfg.duration_s * cfg.sample_rate);
  const int T = VisualFrames(cfg);
  const double fr = FrameRate(cfg);
  u.articulation = ArticulationProgram(T, fr, SubSeed(u.seed, 1));
  u.clean = SynthesizeSpeech(u.articulation, fr, n, cfg.sample_rate, SubSeed(u.seed, 2));
  u.noise_type = cfg.noise_types[index % cfg.noise_types.size()];
  u.noise = SynthesizeNoise(u.noise_type, n, cfg.sample_rate, SubSeed(u.seed, 3));

  const double amp = head_motion_deg < 0.0 ? cfg.head_motion_deg : head_motion_deg;
  u.head_motion = HeadMotionProgram(T, fr, amp, amp > 0.0 ? cfg.head_scale : 0.0,
                                    SubSeed(u.seed, 4));

  std::mt19937_64 rng(SubSeed(u.seed, 5));
  std::normal_distribution<double> n01;
  u.identity.s = Eigen::VectorXd::Zero(model.K());
  for (int k = 2; k < model.K(); ++k)
    u.identity.s(k) = 0.03 * n01(rng) * UnitDisplacementCoefficient(model, k);

  Eigen::MatrixXd coeffs(T, 2);
  coeffs.col(0) = u.articulation.col(0) * (cfg.mouth_open * UnitDisplacementCoefficient(model, 0));
  coeffs.col(1) =
      u.articulation.col(1) * (cfg.mouth_spread * UnitDisplacementCoefficient(model, 1));

  SynthOptions opts;
  if (cfg.render_frames) opts.grid = ImageGrid(cfg);
  opts.landmark_noise_sd = cfg.landmark_noise_sd;
  opts.outlier_fraction = cfg.outlier_fraction;
  opts.identity = u.identity;
  SynthSequence seq = SynthesizeSequence(model, coeffs, u.head_motion, SubSeed(u.seed, 6), opts);
  u.observed = std::move(seq.observed);
  u.unposed = std::move(seq.unposed);
  u.frames = std::move(seq.frames);
  return u;
}

Corpus SynthesizeCorpus(const ExperimentConfig &cfg) {
  cfg.Validate();
  Corpus c;
  c.config = cfg;
  c.model = CorpusModel(cfg);
  for (int i = 0; i < cfg.train_utterances; ++i)
    c.train.push_back(SynthesizeUtterance(cfg, c.model, Split::kTrain, i));
  for (int i = 0; i < cfg.val_utterances; ++i)
    c.val.push_back(SynthesizeUtterance(cfg, c.model, Split::kVal, i));
  for (int i = 0; i < cfg.test_utterances; ++i)
    c.test.push_back(SynthesizeUtterance(cfg, c.model, Split::kTest, i));
  return c;
}

double AudioLipCorrelation(const Utterance &u, const DeformableModel &model) {
  const Eigen::MatrixXd P = Stft(u.clean).Power();
  const MouthLayout layout = MouthLayoutFor(model.J());
  const int T = std::min<int>(static_cast<int>(P.cols()), static_cast<int>(u.unposed.size()));
  Eigen::VectorXd e(T), area(T);
  for (int t = 0; t < T; ++t) {
    e(t) = std::log(P.col(t).sum() + 1e-10);
    area(t) = MeasureLip(MouthFromLandmarks(u.unposed[t], layout)).area;
  }
  e.array() -= e.mean();
  area.array() -= area.mean();
  const double den = e.norm() * area.norm();
  return den > 0.0 ? e.dot(area) / den : 0.0;
}

FrontalizedSequence FrontalizeSequence(const std::vector<LandmarkSet> &observed,
                                       const DeformableModel &model, int rounds,
                                       const std::vector<Image> &frames,
                                       const DepthGrid &grid) {
  Require(rounds >= 1, ErrorCode::kInvalidArgument, "frontalization needs rounds >= 1");
  Require(frames.empty() || frames.size() == observed.size(), ErrorCode::kDimensionMismatch,
          "frame and landmark sequences differ in length");
  Require(frames.empty() || grid.width > 0, ErrorCode::kInvalidArgument,
          "frontal crops need an image grid");
  const LandmarkSet mean_landmarks = model.MeanLandmarks();
  const MouthLayout layout = MouthLayoutFor(model.J());

  FrontalizedSequence out;
  const int T = static_cast<int>(observed.size());
  for (int t = 0; t < T; ++t) {
    AtFrame(t, [&] {
      LandmarkSet target = mean_landmarks;
      Pose pose;
      RobustFit fit;
      ShapeCoefficients shape;
      LandmarkSet frontal;
      for (int r = 0; r < rounds; ++r) {
        std::tie(pose, fit) = EstimatePose(observed[t], target);
        frontal = ApplyPose(pose, observed[t]);
        shape = FitShape(frontal, model);
        target = model.Landmarks(AsVertices(ReconstructVertices(model, shape)));
      }
      const PoseShapeFit joint = RefinePoseAndShape(observed[t], model, fit.weights, pose, shape);
      pose = joint.pose;
      shape = joint.shape;
      frontal = ApplyPose(pose, observed[t]);
      if (!frames.empty()) {
        const Eigen::Matrix3Xd verts = AsVertices(ReconstructVertices(model, shape));
        const DepthMap depth = RenderFrontalDepth(verts, model.triangles(), grid);
        const Image warped = WarpToFrontal(frames[t], pose, depth);
        std::vector<Eigen::Vector2d> lips;
        for (int j : layout.outer) lips.push_back(grid.camera.Project(frontal[j]));
        out.crops.push_back(CropLipRegion(warped, lips));
      }
      out.poses.push_back(pose);
      out.fits.push_back(std::move(fit));
      out.frontal.push_back(std::move(frontal));
      out.shapes.push_back(std::move(shape));
      return 0;
    });
  }
  return out;
}

Eigen::MatrixXd LipFeaturesOf(const std::vector<LandmarkSet> &tracks,
                              const MouthLayout &layout, int M) {
  std::vector<MouthShape> mouths;
  mouths.reserve(tracks.size());
  for (const auto &lm : tracks) mouths.push_back(MouthFromLandmarks(lm, layout));
  return LipFeatures(mouths, M);
}

UtteranceFeatures ComputeFeatures(const Utterance &u, const DeformableModel &model,
                                  const ExperimentConfig &cfg) {
  const MouthLayout layout = MouthLayoutFor(model.J());
  UtteranceFeatures f;
  f.head_motion = LipFeaturesOf(u.observed, layout, cfg.visual_dim);
  const FrontalizedSequence fs = FrontalizeSequence(u.observed, model, cfg.frontalize_rounds);
  f.frontal = LipFeaturesOf(fs.frontal, layout, cfg.visual_dim);
  return f;
}

}  // namespace avfront
