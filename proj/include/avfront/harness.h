// avfront/harness.h

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

#ifndef AVFRONT_HARNESS_H_
#define AVFRONT_HARNESS_H_

// Experiment orchestration: the synthetic audio-visual corpus, the
// frontalization pipeline, prior training for each conditioning variant,
// batch enhancement and the metric reports.  Every stage is available both
// in memory and as a file-producing command.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avfront/common.h"
#include "avfront/enhance.h"
#include "avfront/metrics.h"
#include "avfront/morphable.h"
#include "avfront/prior.h"
#include "avfront/registration.h"
#include "avfront/spectral.h"
#include "json.hpp"

namespace avfront {

// Method names used in configs and reports.
inline constexpr const char *kMethodNoisy = "noisy";
inline constexpr const char *kMethodAvae = "a-vae";
inline constexpr const char *kMethodCvaeHeadMotion = "cvae-hm";
inline constexpr const char *kMethodCvaeFrontal = "cvae-rff";
inline constexpr const char *kMethodOracle = "oracle";

/// Prior training defaults for the synthetic corpus: the step size is raised
/// to 1e-3 because the corpus is a few thousand frames.
TrainConfig DefaultExperimentTraining();

struct ExperimentConfig {
  uint64_t seed = 1;
  int train_utterances = 40;
  int val_utterances = 8;
  int test_utterances = 20;
  double duration_s = 2.0;
  int sample_rate = 16000;
  std::vector<double> snr_db = {-10, -5, 0, 5, 10};
  std::vector<std::string> methods = {kMethodNoisy, kMethodAvae, kMethodCvaeHeadMotion,
                                      kMethodCvaeFrontal, kMethodOracle};
  std::vector<std::string> noise_types = {"pink", "rumble", "hiss"};

  // Face and head motion.
  int model_vertices = 1600;
  int model_basis = 12;
  int landmarks = 68;
  double head_motion_deg = 20.0;  // yaw amplitude; pitch and roll use half
  double head_scale = 0.1;        // relative scale excursion
  double landmark_noise_sd = 0.005;
  double outlier_fraction = 0.0;
  double mouth_open = 0.25;       // peak opening displacement, model units
  double mouth_spread = 0.08;
  int frontalize_rounds = 2;
  bool render_frames = false;
  int image_size = 96;

  int visual_dim = 8;
  TrainConfig train = DefaultExperimentTraining();
  VemConfig vem;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ExperimentConfig FromJson(const nlohmann::json &j);
  static ExperimentConfig Load(const std::string &path);
  /// FNV-1a of the canonical JSON dump, as 16 hex digits.
  std::string Hash() const;
};

/// Per-utterance seed; splits use disjoint streams.
enum class Split { kTrain = 0, kVal = 1, kTest = 2 };
const char *SplitName(Split s);
uint64_t UtteranceSeed(uint64_t base, Split split, int index);

// ---- Audio synthesis ----

/// Articulation program at the STFT frame rate: column 0 mouth opening in
/// [0, 1], column 1 lip spreading in [-1, 1].  Leading and trailing 150 ms
/// are closed-mouth silence.
Eigen::MatrixXd ArticulationProgram(int frames, double frame_rate, uint64_t seed);

/// Harmonic source whose formants follow the articulation (F1 with opening,
/// F2/F3 with spreading) and whose amplitude follows the opening.
Waveform SynthesizeSpeech(const Eigen::MatrixXd &articulation, double frame_rate,
                          int64_t num_samples, int sample_rate, uint64_t seed);

/// Stationary noise by spectral shaping of white Gaussian noise.  Types:
/// pink, rumble (brown noise plus mains hum), hiss (high-pass).
Waveform SynthesizeNoise(const std::string &type, int64_t num_samples, int sample_rate,
                         uint64_t seed);

/// Smooth yaw/pitch/roll/scale/translation program, model -> camera.
std::vector<Pose> HeadMotionProgram(int frames, double frame_rate, double amplitude_deg,
                                    double scale_excursion, uint64_t seed);
Pose PoseFromEuler(double yaw_deg, double pitch_deg, double roll_deg, double scale,
                   const Eigen::Vector3d &translation);
/// Yaw of R = Ry(yaw) Rx(pitch) Rz(roll), in degrees.
double YawDeg(const Eigen::Matrix3d &R);

// ---- Corpus ----

struct Utterance {
  std::string id;
  Split split = Split::kTrain;
  uint64_t seed = 0;
  Waveform clean;
  Waveform noise;
  std::string noise_type;
  Eigen::MatrixXd articulation;       // T x 2
  std::vector<Pose> head_motion;      // T
  ShapeCoefficients identity;
  std::vector<LandmarkSet> observed;  // posed and corrupted, T
  std::vector<LandmarkSet> unposed;   // identity-motion landmarks, T
  std::vector<Image> frames;          // empty unless rendered

  int T() const { return static_cast<int>(articulation.rows()); }
};

struct Corpus {
  ExperimentConfig config;
  DeformableModel model;
  std::vector<Utterance> train, val, test;
};

DeformableModel CorpusModel(const ExperimentConfig &cfg);
DepthGrid ImageGrid(const ExperimentConfig &cfg);
/// Number of STFT frames for the configured duration.
int VisualFrames(const ExperimentConfig &cfg);
double FrameRate(const ExperimentConfig &cfg);

/// `head_motion_deg` < 0 uses the configured amplitude.
Utterance SynthesizeUtterance(const ExperimentConfig &cfg, const DeformableModel &model,
                              Split split, int index, double head_motion_deg = -1.0);
Corpus SynthesizeCorpus(const ExperimentConfig &cfg);

/// Correlation between per-frame clean log energy and inner-lip area.
double AudioLipCorrelation(const Utterance &u, const DeformableModel &model);

// ---- Frontalization ----

struct FrontalizedSequence {
  std::vector<Pose> poses;                 // observed -> model frame, per frame
  std::vector<RobustFit> fits;
  std::vector<LandmarkSet> frontal;        // pose applied to observed landmarks
  std::vector<ShapeCoefficients> shapes;
  std::vector<LipCrop> crops;              // only when frames are given
};

/// Per frame: robust pose against the model landmarks, shape fit on the
/// frontalized landmarks, then `rounds - 1` refinements against the fitted
/// landmarks.  With frames, the fitted mesh is rendered into a frontal depth
/// map, the frame is warped and the lip region cropped.
FrontalizedSequence FrontalizeSequence(const std::vector<LandmarkSet> &observed,
                                       const DeformableModel &model, int rounds,
                                       const std::vector<Image> &frames = {},
                                       const DepthGrid &grid = {});

/// T x M lip features from the 2D (x, y) mouth landmarks.
Eigen::MatrixXd LipFeaturesOf(const std::vector<LandmarkSet> &tracks,
                              const MouthLayout &layout, int M);

// ---- Training and enhancement ----

enum class Conditioning { kNone, kHeadMotion, kFrontal };
Conditioning ConditioningFor(const std::string &method);

/// Visual features of one utterance, computed once and reused.
struct UtteranceFeatures {
  Eigen::MatrixXd head_motion;  // T x M from the raw tracks
  Eigen::MatrixXd frontal;      // T x M from the frontalized tracks
};
UtteranceFeatures ComputeFeatures(const Utterance &u, const DeformableModel &model,
                                  const ExperimentConfig &cfg);

/// Clean power frames plus the selected features (transposed to M x T).
FrameSet BuildFrameSet(const std::vector<Utterance> &utts,
                       const std::vector<UtteranceFeatures> &feats, Conditioning c,
                       const StftConfig &stft);

struct ReportRow {
  std::string utterance;
  double snr_db = 0.0;
  std::string method;
  double si_sdr = 0.0;
  double stoi = 0.0;
};

/// Enhances one mixture with one method.  `prior` is ignored for noisy and
/// oracle; `clean` is only used by the oracle.
Waveform EnhanceWith(const std::string &method, const Waveform &mixture,
                     const Waveform &clean, const VaeParams *prior,
                     const Eigen::MatrixXd &features, const VemConfig &vem,
                     VemDiagnostics *diag = nullptr);

struct TrainedPriors {
  std::map<std::string, VaeParams> params;       // by method name
  std::map<std::string, TrainResult> results;
};

/// Trains every VAE-based method listed in the config.
TrainedPriors TrainPriors(const Corpus &corpus,
                          const std::vector<UtteranceFeatures> &train_feats,
                          const std::vector<UtteranceFeatures> &val_feats);

/// Mixes each test utterance at each SNR and scores every configured method.
std::vector<ReportRow> EvaluateCorpus(const Corpus &corpus,
                                      const std::vector<UtteranceFeatures> &test_feats,
                                      const TrainedPriors &priors);

// ---- Reports ----

struct CellStats {
  double si_sdr = 0.0;
  double stoi = 0.0;
  int count = 0;
};
/// Mean per (method, snr).
std::map<std::string, std::map<double, CellStats>> Summarize(
    const std::vector<ReportRow> &rows);

std::string ReportCsv(const std::vector<ReportRow> &rows, const std::string &config_hash);
std::vector<ReportRow> ParseReportCsv(const std::string &text, std::string *config_hash);
/// Method x SNR tables of mean STOI and SI-SDR (PESQ column shown as a dash),
/// followed by the improvement over the noisy input.
std::string FormatTables(const std::vector<ReportRow> &rows,
                         const std::vector<std::string> &methods,
                         const std::vector<double> &snrs, const std::string &config_hash);

struct Fig4Data {
  // Per frame upper-lip (x, y) for the identity-motion reference, the raw
  // head-motion track and the frontalized track.
  Eigen::MatrixXd reference;  // T x 2
  Eigen::MatrixXd raw;
  Eigen::MatrixXd frontal;
  double raw_rms = 0.0;       // RMS distance from the reference
  double frontal_rms = 0.0;
  double Ratio() const { return raw_rms / std::max(frontal_rms, 1e-300); }
};
Fig4Data ComputeFig4(const Utterance &u, const FrontalizedSequence &fs,
                     const DeformableModel &model);
std::string Fig4Csv(const Fig4Data &d, const std::string &config_hash);

// ---- File-based commands (used by the CLI) ----

struct CommandPaths {
  std::string config;    // JSON config; empty means defaults
  std::string corpus;    // synth-data output directory
  std::string frontal;   // frontalize output directory
  std::string priors;    // train-prior output directory
  std::string enhanced;  // enhance output directory
  std::string out;
  std::string landmarks; // single-sequence frontalize input
  std::string model;
  std::string utterance;
};

ExperimentConfig LoadConfigOrDefault(const std::string &path, const uint64_t *seed_override);

void CmdSynthData(const ExperimentConfig &cfg, const CommandPaths &p);
void CmdFrontalize(const ExperimentConfig &cfg, const CommandPaths &p);
void CmdTrainPrior(const ExperimentConfig &cfg, const CommandPaths &p);
void CmdEnhance(const ExperimentConfig &cfg, const CommandPaths &p);
void CmdEvaluate(const ExperimentConfig &cfg, const CommandPaths &p);
void CmdFig4(const ExperimentConfig &cfg, const CommandPaths &p);

// Landmark track files: CSV rows "frame,index,x,y,z".
void WriteLandmarkTracks(const std::string &path, const std::vector<LandmarkSet> &tracks,
                         const std::string &config_hash);
std::vector<LandmarkSet> ReadLandmarkTracks(const std::string &path);

}  // namespace avfront

#endif  // AVFRONT_HARNESS_H_
