// harness/commands.cc

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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "avfront/harness.h"

namespace avfront {

namespace fs = std::filesystem;

namespace {

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  Require(os.good(), ErrorCode::kIoError, "cannot write " + path.string());
  os << text;
  Require(os.good(), ErrorCode::kIoError, "write failed: " + path.string());
}

std::string ReadText(const fs::path &path) {
  std::ifstream is(path, std::ios::binary);
  Require(is.good(), ErrorCode::kMissingArtifacts, "missing artifact " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteJson(const fs::path &path, const nlohmann::json &j) {
  WriteText(path, j.dump(2) + "\n");
}

nlohmann::json ReadJson(const fs::path &path) {
  const std::string text = ReadText(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kBadFile, path.string() + ": " + e.what());
  }
}

void MakeDir(const fs::path &p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  Require(!ec, ErrorCode::kIoError, "cannot create directory " + p.string() + ": " + ec.message());
}

void RequireDir(const std::string &dir, const char *flag) {
  Require(!dir.empty(), ErrorCode::kInvalidArgument, std::string("missing ") + flag);
}

// Loads a manifest and refuses it when its config hash differs from ours.
nlohmann::json CheckedManifest(const fs::path &dir, const std::string &hash) {
  const fs::path path = dir / "manifest.json";
  Require(fs::exists(path), ErrorCode::kMissingArtifacts, "missing artifact " + path.string());
  nlohmann::json m = ReadJson(path);
  const std::string got = m.value("config_hash", std::string());
  Require(got == hash, ErrorCode::kConfigMismatch,
          path.string() + " was produced with config " + got + ", current config is " + hash);
  return m;
}

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void WriteMatrixCsv(const fs::path &path, const Eigen::MatrixXd &m,
                    const std::vector<std::string> &columns, const std::string &hash) {
  std::ostringstream os;
  os << "# config_hash=" << hash << "\n";
  for (size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << "\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) os << (c ? "," : "") << Num(m(r, c));
    os << "\n";
  }
  WriteText(path, os.str());
}

Eigen::MatrixXd ReadMatrixCsv(const fs::path &path) {
  std::istringstream is(ReadText(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      Require(end != cell.c_str() && *end == '\0', ErrorCode::kBadFile,
              path.string() + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    Require(rows.empty() || row.size() == rows[0].size(), ErrorCode::kBadFile,
            path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  Require(!rows.empty(), ErrorCode::kBadFile, path.string() + ": no data rows");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

std::vector<std::string> FeatureColumns(int M) {
  std::vector<std::string> c;
  c.push_back("frame");
  for (int k = 0; k < M; ++k) c.push_back("f" + std::to_string(k));
  return c;
}

Eigen::MatrixXd WithFrameColumn(const Eigen::MatrixXd &f) {
  Eigen::MatrixXd out(f.rows(), f.cols() + 1);
  out.col(0) = Eigen::VectorXd::LinSpaced(f.rows(), 0, f.rows() - 1);
  out.rightCols(f.cols()) = f;
  return out;
}

nlohmann::json PoseTraceEntry(int t, const Pose &p, const RobustFit &fit) {
  nlohmann::json j = PoseToJson(p);
  j["frame"] = t;
  j["yaw_deg"] = YawDeg(p.Inverse().RotationMatrix());
  j["nu"] = fit.nu;
  j["sigma2"] = fit.sigma2;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

uint64_t WaveDigest(const Waveform &w) {
  return Fnv1a64(std::string_view(reinterpret_cast<const char *>(w.samples.data()),
                                  w.samples.size() * sizeof(double)));
}

std::vector<std::pair<Split, int>> AllUtterances(const ExperimentConfig &cfg) {
  std::vector<std::pair<Split, int>> out;
  for (int i = 0; i < cfg.train_utterances; ++i) out.emplace_back(Split::kTrain, i);
  for (int i = 0; i < cfg.val_utterances; ++i) out.emplace_back(Split::kVal, i);
  for (int i = 0; i < cfg.test_utterances; ++i) out.emplace_back(Split::kTest, i);
  return out;
}

std::string UtteranceId(Split s, int i) {
  char id[32];
  std::snprintf(id, sizeof(id), "%s%03d", SplitName(s), i);
  return id;
}

// Utterance as stored by synth-data (audio from WAV, tracks from CSV).
Utterance LoadUtterance(const fs::path &corpus, Split split, int index) {
  Utterance u;
  u.id = UtteranceId(split, index);
  u.split = split;
  const fs::path dir = corpus / u.id;
  u.clean = ReadWav((dir / "clean.wav").string());
  u.noise = ReadWav((dir / "noise.wav").string());
  const nlohmann::json meta = ReadJson(dir / "meta.json");
  u.seed = meta.at("seed").get<uint64_t>();
  u.noise_type = meta.at("noise_type").get<std::string>();
  u.articulation = ReadMatrixCsv(dir / "articulation.csv");
  u.observed = ReadLandmarkTracks((dir / "landmarks.csv").string());
  u.unposed = ReadLandmarkTracks((dir / "landmarks_identity.csv").string());
  for (const auto &p : meta.at("head_motion")) u.head_motion.push_back(PoseFromJson(p));
  const fs::path frames = dir / "frames";
  if (fs::exists(frames))
    for (int t = 0; t < u.T(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04d.pgm", t);
      u.frames.push_back(ReadPgm((frames / name).string()));
    }
  return u;
}

UtteranceFeatures LoadFeatures(const fs::path &frontal, const std::string &id) {
  UtteranceFeatures f;
  const Eigen::MatrixXd raw = ReadMatrixCsv(frontal / id / "features_raw.csv");
  const Eigen::MatrixXd fr = ReadMatrixCsv(frontal / id / "features_frontal.csv");
  Require(raw.cols() >= 2 && fr.cols() == raw.cols(), ErrorCode::kBadFile,
          id + ": feature files need a frame column and at least one feature");
  f.head_motion = raw.rightCols(raw.cols() - 1);
  f.frontal = fr.rightCols(fr.cols() - 1);
  return f;
}

std::string SnrDir(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snr_%+g", snr);
  return buf;
}

void FrontalizeOne(const std::vector<LandmarkSet> &observed, const std::vector<Image> &frames,
                   const DeformableModel &model, const ExperimentConfig &cfg,
                   const fs::path &out, const std::string &hash) {
  MakeDir(out);
  const FrontalizedSequence seq =
      FrontalizeSequence(observed, model, cfg.frontalize_rounds, frames, ImageGrid(cfg));
  nlohmann::json trace = nlohmann::json::array();
  for (size_t t = 0; t < seq.poses.size(); ++t)
    trace.push_back(PoseTraceEntry(static_cast<int>(t), seq.poses[t], seq.fits[t]));
  WriteJson(out / "poses.json", {{"config_hash", hash}, {"poses", trace}});
  WriteLandmarkTracks((out / "frontal_landmarks.csv").string(), seq.frontal, hash);
  const MouthLayout layout = MouthLayoutFor(model.J());
  WriteMatrixCsv(out / "features_raw.csv",
                 WithFrameColumn(LipFeaturesOf(observed, layout, cfg.visual_dim)),
                 FeatureColumns(cfg.visual_dim), hash);
  WriteMatrixCsv(out / "features_frontal.csv",
                 WithFrameColumn(LipFeaturesOf(seq.frontal, layout, cfg.visual_dim)),
                 FeatureColumns(cfg.visual_dim), hash);
  if (!seq.crops.empty()) {
    MakeDir(out / "crops");
    for (size_t t = 0; t < seq.crops.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "crop_%04zu.pgm", t);
      WritePgm((out / "crops" / name).string(), seq.crops[t].ToImage());
    }
  }
}

}  // namespace

void WriteLandmarkTracks(const std::string &path, const std::vector<LandmarkSet> &tracks,
                         const std::string &config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash << "\n";
  os << "frame,index,x,y,z\n";
  for (size_t t = 0; t < tracks.size(); ++t)
    for (int j = 0; j < tracks[t].J(); ++j) {
      const Eigen::Vector3d p = tracks[t][j];
      os << t << "," << j << "," << Num(p.x()) << "," << Num(p.y()) << "," << Num(p.z())
         << "\n";
    }
  WriteText(path, os.str());
}

std::vector<LandmarkSet> ReadLandmarkTracks(const std::string &path) {
  const Eigen::MatrixXd m = ReadMatrixCsv(path);
  Require(m.cols() == 5, ErrorCode::kBadFile, path + ": expected frame,index,x,y,z");
  std::vector<std::vector<Eigen::Vector3d>> frames;
  for (int r = 0; r < m.rows(); ++r) {
    const int t = static_cast<int>(m(r, 0)), j = static_cast<int>(m(r, 1));
    Require(t >= 0 && j >= 0 && t == m(r, 0) && j == m(r, 1), ErrorCode::kBadFile,
            path + ": frame and landmark must be nonnegative integers");
    if (t >= static_cast<int>(frames.size())) frames.resize(t + 1);
    Require(j == static_cast<int>(frames[t].size()), ErrorCode::kBadFile,
            path + ": landmarks must be listed in order within each frame");
    frames[t].emplace_back(m(r, 2), m(r, 3), m(r, 4));
  }
  std::vector<LandmarkSet> out;
  for (size_t t = 0; t < frames.size(); ++t) {
    Require(!frames[t].empty() && frames[t].size() == frames[0].size(), ErrorCode::kBadFile,
            path + ": frame " + std::to_string(t) + " has a different landmark count");
    Eigen::Matrix3Xd pts(3, frames[t].size());
    for (size_t j = 0; j < frames[t].size(); ++j) pts.col(j) = frames[t][j];
    out.emplace_back(std::move(pts));
  }
  return out;
}

void CmdSynthData(const ExperimentConfig &cfg, const CommandPaths &p) {
  RequireDir(p.out, "--out");
  const fs::path out(p.out);
  MakeDir(out);
  const std::string hash = cfg.Hash();
  const DeformableModel model = CorpusModel(cfg);
  SaveModelJson((out / "model.json").string(), model);

  nlohmann::json list = nlohmann::json::array();
  std::string digests;
  for (const auto &[split, i] : AllUtterances(cfg)) {
    const Utterance u = SynthesizeUtterance(cfg, model, split, i);
    const fs::path dir = out / u.id;
    MakeDir(dir);
    WriteWav((dir / "clean.wav").string(), u.clean);
    WriteWav((dir / "noise.wav").string(), u.noise);
    WriteMatrixCsv(dir / "articulation.csv", u.articulation, {"opening", "spreading"}, hash);
    WriteLandmarkTracks((dir / "landmarks.csv").string(), u.observed, hash);
    WriteLandmarkTracks((dir / "landmarks_identity.csv").string(), u.unposed, hash);
    nlohmann::json motion = nlohmann::json::array();
    for (const auto &h : u.head_motion) motion.push_back(PoseToJson(h));
    std::vector<double> identity(u.identity.s.data(), u.identity.s.data() + u.identity.s.size());
    WriteJson(dir / "meta.json", {{"config_hash", hash},
                                  {"id", u.id},
                                  {"split", SplitName(split)},
                                  {"seed", u.seed},
                                  {"noise_type", u.noise_type},
                                  {"identity", identity},
                                  {"head_motion", motion}});
    if (!u.frames.empty()) {
      MakeDir(dir / "frames");
      for (size_t t = 0; t < u.frames.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.pgm", t);
        WritePgm((dir / "frames" / name).string(), u.frames[t]);
      }
    }
    const std::string digest = HexDigest(WaveDigest(u.clean) ^ (WaveDigest(u.noise) << 1));
    digests += digest;
    list.push_back({{"id", u.id},
                    {"split", SplitName(split)},
                    {"seed", u.seed},
                    {"noise_type", u.noise_type},
                    {"frames", u.T()},
                    {"samples", u.clean.size()},
                    {"audio_lip_correlation", AudioLipCorrelation(u, model)},
                    {"digest", digest}});
  }
  WriteJson(out / "manifest.json",
            {{"config_hash", hash},
             {"config", cfg.ToJson()},
             {"model", "model.json"},
             {"counts",
              {{"train", cfg.train_utterances},
               {"val", cfg.val_utterances},
               {"test", cfg.test_utterances}}},
             {"corpus_digest", HexDigest(Fnv1a64(digests))},
             {"utterances", list}});
}

void CmdFrontalize(const ExperimentConfig &cfg, const CommandPaths &p) {
  RequireDir(p.out, "--out");
  const std::string hash = cfg.Hash();
  const fs::path out(p.out);
  if (!p.landmarks.empty()) {
    // Single sequence: explicit landmark track and model files.
    Require(!p.model.empty(), ErrorCode::kInvalidArgument, "--landmarks needs --model");
    const DeformableModel model = LoadModelJson(p.model);
    const std::vector<LandmarkSet> observed = ReadLandmarkTracks(p.landmarks);
    FrontalizeOne(observed, {}, model, cfg, out, hash);
    WriteJson(out / "manifest.json", {{"config_hash", hash},
                                      {"landmarks", p.landmarks},
                                      {"frames", observed.size()}});
    return;
  }
  RequireDir(p.corpus, "--corpus");
  const fs::path corpus(p.corpus);
  CheckedManifest(corpus, hash);
  const DeformableModel model = LoadModelJson((corpus / "model.json").string());
  MakeDir(out);
  nlohmann::json list = nlohmann::json::array();
  for (const auto &[split, i] : AllUtterances(cfg)) {
    const std::string id = UtteranceId(split, i);
    if (!p.utterance.empty() && id != p.utterance) continue;
    const Utterance u = LoadUtterance(corpus, split, i);
    try {
      FrontalizeOne(u.observed, u.frames, model, cfg, out / id, hash);
    } catch (const Error &e) {
      Fail(e.code(), id + ": " + e.what());
    }
    list.push_back({{"id", id}, {"frames", u.T()}, {"crops", u.frames.size()}});
  }
  WriteJson(out / "manifest.json", {{"config_hash", hash}, {"utterances", list}});
}

void CmdTrainPrior(const ExperimentConfig &cfg, const CommandPaths &p) {
  RequireDir(p.corpus, "--corpus");
  RequireDir(p.frontal, "--frontal");
  RequireDir(p.out, "--out");
  const std::string hash = cfg.Hash();
  const fs::path corpus(p.corpus), frontal(p.frontal), out(p.out);
  CheckedManifest(corpus, hash);
  CheckedManifest(frontal, hash);
  MakeDir(out);

  Corpus c;
  c.config = cfg;
  std::vector<UtteranceFeatures> tf, vf;
  for (int i = 0; i < cfg.train_utterances; ++i) {
    c.train.push_back(LoadUtterance(corpus, Split::kTrain, i));
    tf.push_back(LoadFeatures(frontal, c.train.back().id));
  }
  for (int i = 0; i < cfg.val_utterances; ++i) {
    c.val.push_back(LoadUtterance(corpus, Split::kVal, i));
    vf.push_back(LoadFeatures(frontal, c.val.back().id));
  }
  const TrainedPriors priors = TrainPriors(c, tf, vf);
  nlohmann::json list = nlohmann::json::object();
  for (const auto &[method, params] : priors.params) {
    const TrainResult &r = priors.results.at(method);
    nlohmann::json info = {{"initial_val_elbo", r.initial_val_elbo},
                           {"best_val_elbo", r.best_val_elbo},
                           {"best_epoch", r.best_epoch},
                           {"epochs_run", r.epochs_run},
                           {"stopped_early", r.stopped_early},
                           {"val_trace", r.val_trace}};
    SaveVaeParams((out / (method + ".json")).string(), params,
                  {{"config_hash", hash}, {"method", method}, {"training", info}});
    list[method] = info;
  }
  WriteJson(out / "manifest.json", {{"config_hash", hash}, {"priors", list}});
}

void CmdEnhance(const ExperimentConfig &cfg, const CommandPaths &p) {
  RequireDir(p.corpus, "--corpus");
  RequireDir(p.out, "--out");
  const std::string hash = cfg.Hash();
  const fs::path corpus(p.corpus), out(p.out);
  CheckedManifest(corpus, hash);

  std::map<std::string, VaeParams> priors;
  bool needs_features = false;
  for (const auto &m : cfg.methods) {
    if (m == kMethodNoisy || m == kMethodOracle) continue;
    RequireDir(p.priors, "--priors");
    const fs::path path = fs::path(p.priors) / (m + ".json");
    Require(fs::exists(path), ErrorCode::kMissingArtifacts, "missing artifact " + path.string());
    nlohmann::json extra;
    priors[m] = LoadVaeParams(path.string(), &extra);
    Require(extra.value("config_hash", std::string()) == hash, ErrorCode::kConfigMismatch,
            path.string() + " was trained with a different config");
    needs_features |= ConditioningFor(m) != Conditioning::kNone;
  }
  if (needs_features) {
    RequireDir(p.frontal, "--frontal");
    CheckedManifest(p.frontal, hash);
  }
  MakeDir(out);

  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < cfg.test_utterances; ++i) {
    const Utterance u = LoadUtterance(corpus, Split::kTest, i);
    if (!p.utterance.empty() && u.id != p.utterance) continue;
    UtteranceFeatures feats;
    if (needs_features) feats = LoadFeatures(p.frontal, u.id);
    for (double snr : cfg.snr_db) {
      const fs::path dir = out / u.id / SnrDir(snr);
      MakeDir(dir);
      const Mixture mix = MixAtSnr(u.clean, u.noise, snr);
      WriteWav((dir / "mixture.wav").string(), mix.mixture);
      for (const auto &m : cfg.methods) {
        const VaeParams *prior = priors.count(m) ? &priors.at(m) : nullptr;
        Eigen::MatrixXd f;
        if (prior && ConditioningFor(m) == Conditioning::kHeadMotion) f = feats.head_motion;
        if (prior && ConditioningFor(m) == Conditioning::kFrontal) f = feats.frontal;
        VemDiagnostics diag;
        Waveform est;
        try {
          est = EnhanceWith(m, mix.mixture, u.clean, prior, f, cfg.vem, &diag);
        } catch (const Error &e) {
          Fail(e.code(), u.id + " at " + SnrDir(snr) + " with " + m + ": " + e.what());
        }
        WriteWav((dir / (m + ".wav")).string(), est);
        if (m != kMethodNoisy) {
          nlohmann::json d = diag.ToJson();
          d["config_hash"] = hash;
          WriteJson(dir / (m + ".diag.json"), d);
        }
        entries.push_back({{"utterance", u.id}, {"snr_db", snr}, {"method", m},
                           {"file", (fs::path(u.id) / SnrDir(snr) / (m + ".wav")).string()}});
      }
    }
  }
  WriteJson(out / "manifest.json", {{"config_hash", hash}, {"outputs", entries}});
}

void CmdEvaluate(const ExperimentConfig &cfg, const CommandPaths &p) {
  RequireDir(p.corpus, "--corpus");
  RequireDir(p.enhanced, "--enhanced");
  RequireDir(p.out, "--out");
  const std::string hash = cfg.Hash();
  const fs::path corpus(p.corpus), enhanced(p.enhanced), out(p.out);
  CheckedManifest(corpus, hash);
  const nlohmann::json manifest = CheckedManifest(enhanced, hash);
  MakeDir(out);

  std::vector<ReportRow> rows;
  for (int i = 0; i < cfg.test_utterances; ++i) {
    const std::string id = UtteranceId(Split::kTest, i);
    if (!p.utterance.empty() && id != p.utterance) continue;
    const Waveform clean = ReadWav((corpus / id / "clean.wav").string());
    for (double snr : cfg.snr_db)
      for (const auto &m : cfg.methods) {
        const fs::path f = enhanced / id / SnrDir(snr) / (m + ".wav");
        Require(fs::exists(f), ErrorCode::kMissingArtifacts, "missing artifact " + f.string());
        const Waveform est = ReadWav(f.string());
        Require(est.size() == clean.size(), ErrorCode::kDimensionMismatch,
                f.string() + " and the clean reference differ in length");
        rows.push_back({id, snr, m, SiSdr(est, clean), Stoi(est, clean)});
      }
  }
  WriteText(out / "report.csv", ReportCsv(rows, hash));
  WriteText(out / "tables.md", FormatTables(rows, cfg.methods, cfg.snr_db, hash));
}

void CmdFig4(const ExperimentConfig &cfg, const CommandPaths &p) {
  RequireDir(p.corpus, "--corpus");
  RequireDir(p.frontal, "--frontal");
  RequireDir(p.out, "--out");
  const std::string hash = cfg.Hash();
  const fs::path corpus(p.corpus), frontal(p.frontal), out(p.out);
  CheckedManifest(corpus, hash);
  CheckedManifest(frontal, hash);
  const DeformableModel model = LoadModelJson((corpus / "model.json").string());
  MakeDir(out);

  nlohmann::json summary = nlohmann::json::array();
  double raw = 0.0, fr = 0.0;
  int n = 0;
  for (int i = 0; i < cfg.test_utterances; ++i) {
    const std::string id = UtteranceId(Split::kTest, i);
    if (!p.utterance.empty() && id != p.utterance) continue;
    const Utterance u = LoadUtterance(corpus, Split::kTest, i);
    const fs::path tracks = frontal / id / "frontal_landmarks.csv";
    Require(fs::exists(tracks), ErrorCode::kMissingArtifacts,
            "missing artifact " + tracks.string());
    FrontalizedSequence seq;
    seq.frontal = ReadLandmarkTracks(tracks.string());
    const Fig4Data d = ComputeFig4(u, seq, model);
    WriteText(out / (id + ".csv"), Fig4Csv(d, hash));
    summary.push_back({{"utterance", id},
                       {"raw_rms", d.raw_rms},
                       {"frontal_rms", d.frontal_rms},
                       {"ratio", d.Ratio()}});
    raw += d.raw_rms;
    fr += d.frontal_rms;
    ++n;
  }
  Require(n > 0, ErrorCode::kMissingArtifacts, "no test utterances selected");
  WriteJson(out / "summary.json", {{"config_hash", hash},
                                   {"mean_raw_rms", raw / n},
                                   {"mean_frontal_rms", fr / n},
                                   {"ratio_of_means", raw / std::max(fr, 1e-300)},
                                   {"utterances", summary}});
}

}  // namespace avfront
