// harness/config.cc

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

#include <fstream>
#include <set>

#include "avfront/harness.h"

namespace avfront {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::set<std::string> &KnownMethods() {
  static const std::set<std::string> m = {kMethodNoisy, kMethodAvae, kMethodCvaeHeadMotion,
                                          kMethodCvaeFrontal, kMethodOracle};
  return m;
}

}  // namespace

const char *SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

uint64_t UtteranceSeed(uint64_t base, Split split, int index) {
  return SplitMix64(SplitMix64(base) ^ (static_cast<uint64_t>(split) << 56) ^
                    static_cast<uint64_t>(index));
}

TrainConfig DefaultExperimentTraining() {
  TrainConfig t;
  t.learning_rate = 1e-3;
  return t;
}

void ExperimentConfig::Validate() const {
  auto bad = [](const std::string &msg) { Fail(ErrorCode::kInconsistentConfig, msg); };
  if (train_utterances < 1 || val_utterances < 1 || test_utterances < 1)
    bad("every split needs at least one utterance");
  if (!(duration_s >= 0.5)) bad("duration_s must be at least 0.5");
  if (sample_rate != 16000) bad("only 16 kHz audio is supported");
  if (snr_db.empty()) bad("snr_db grid is empty");
  for (double s : snr_db)
    if (!std::isfinite(s)) bad("snr_db entries must be finite");
  if (methods.empty()) bad("method list is empty");
  for (const auto &m : methods)
    if (!KnownMethods().count(m)) bad("unknown method '" + m + "'");
  if (noise_types.empty()) bad("noise_types is empty");
  for (const auto &n : noise_types)
    if (n != "pink" && n != "rumble" && n != "hiss") bad("unknown noise type '" + n + "'");
  if (model_basis < 2) bad("model_basis must be at least 2 (opening and spreading)");
  if (landmarks < 12 || model_vertices < landmarks) bad("need 12 <= landmarks <= vertices");
  if (head_motion_deg < 0.0 || head_motion_deg > 60.0) bad("head_motion_deg must be in [0, 60]");
  if (head_scale < 0.0 || head_scale >= 0.5) bad("head_scale must be in [0, 0.5)");
  if (landmark_noise_sd < 0.0) bad("landmark_noise_sd must be nonnegative");
  if (outlier_fraction < 0.0 || outlier_fraction >= 0.5) bad("outlier_fraction must be in [0, 0.5)");
  if (!(mouth_open > 0.0) || mouth_spread < 0.0) bad("mouth excursions must be positive");
  if (frontalize_rounds < 1) bad("frontalize_rounds must be at least 1");
  if (image_size < 32) bad("image_size must be at least 32");
  if (visual_dim < 4) bad("visual_dim must be at least 4");

  std::set<uint64_t> seen;
  const int counts[3] = {train_utterances, val_utterances, test_utterances};
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < counts[s]; ++i)
      if (!seen.insert(UtteranceSeed(seed, static_cast<Split>(s), i)).second)
        bad("utterance seeds collide across splits");
  train.Validate();
  vem.Validate();
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["train_utterances"] = train_utterances;
  j["val_utterances"] = val_utterances;
  j["test_utterances"] = test_utterances;
  j["duration_s"] = duration_s;
  j["sample_rate"] = sample_rate;
  j["snr_db"] = snr_db;
  j["methods"] = methods;
  j["noise_types"] = noise_types;
  j["model_vertices"] = model_vertices;
  j["model_basis"] = model_basis;
  j["landmarks"] = landmarks;
  j["head_motion_deg"] = head_motion_deg;
  j["head_scale"] = head_scale;
  j["landmark_noise_sd"] = landmark_noise_sd;
  j["outlier_fraction"] = outlier_fraction;
  j["mouth_open"] = mouth_open;
  j["mouth_spread"] = mouth_spread;
  j["frontalize_rounds"] = frontalize_rounds;
  j["render_frames"] = render_frames;
  j["image_size"] = image_size;
  j["visual_dim"] = visual_dim;
  j["train"] = train.ToJson();
  j["vem"] = vem.ToJson();
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json &j) {
  ExperimentConfig c;
  try {
    Require(j.is_object(), ErrorCode::kInconsistentConfig, "config must be a JSON object");
    static const std::set<std::string> keys = {
        "seed", "train_utterances", "val_utterances", "test_utterances", "duration_s",
        "sample_rate", "snr_db", "methods", "noise_types", "model_vertices", "model_basis",
        "landmarks", "head_motion_deg", "head_scale", "landmark_noise_sd",
        "outlier_fraction", "mouth_open", "mouth_spread", "frontalize_rounds",
        "render_frames", "image_size", "visual_dim", "train", "vem"};
    for (auto it = j.begin(); it != j.end(); ++it)
      Require(keys.count(it.key()) > 0, ErrorCode::kInconsistentConfig,
              "unknown config key '" + it.key() + "'");
    c.seed = j.value("seed", c.seed);
    c.train_utterances = j.value("train_utterances", c.train_utterances);
    c.val_utterances = j.value("val_utterances", c.val_utterances);
    c.test_utterances = j.value("test_utterances", c.test_utterances);
    c.duration_s = j.value("duration_s", c.duration_s);
    c.sample_rate = j.value("sample_rate", c.sample_rate);
    c.snr_db = j.value("snr_db", c.snr_db);
    c.methods = j.value("methods", c.methods);
    c.noise_types = j.value("noise_types", c.noise_types);
    c.model_vertices = j.value("model_vertices", c.model_vertices);
    c.model_basis = j.value("model_basis", c.model_basis);
    c.landmarks = j.value("landmarks", c.landmarks);
    c.head_motion_deg = j.value("head_motion_deg", c.head_motion_deg);
    c.head_scale = j.value("head_scale", c.head_scale);
    c.landmark_noise_sd = j.value("landmark_noise_sd", c.landmark_noise_sd);
    c.outlier_fraction = j.value("outlier_fraction", c.outlier_fraction);
    c.mouth_open = j.value("mouth_open", c.mouth_open);
    c.mouth_spread = j.value("mouth_spread", c.mouth_spread);
    c.frontalize_rounds = j.value("frontalize_rounds", c.frontalize_rounds);
    c.render_frames = j.value("render_frames", c.render_frames);
    c.image_size = j.value("image_size", c.image_size);
    c.visual_dim = j.value("visual_dim", c.visual_dim);
    // Nested sections override the experiment defaults key by key.
    if (j.contains("train")) {
      nlohmann::json t = c.train.ToJson();
      t.update(j.at("train"));
      c.train = TrainConfig::FromJson(t);
    }
    if (j.contains("vem")) {
      nlohmann::json v = c.vem.ToJson();
      v.update(j.at("vem"));
      c.vem = VemConfig::FromJson(v);
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kInconsistentConfig, std::string("bad config value: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string &path) {
  std::ifstream is(path);
  Require(is.good(), ErrorCode::kIoError, "cannot open config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kBadFile, path + ": " + e.what());
  }
  return FromJson(j);
}

std::string ExperimentConfig::Hash() const { return HexDigest(Fnv1a64(ToJson().dump())); }

ExperimentConfig LoadConfigOrDefault(const std::string &path, const uint64_t *seed_override) {
  ExperimentConfig c = path.empty() ? ExperimentConfig() : ExperimentConfig::Load(path);
  if (seed_override) {
    c.seed = *seed_override;
    c.train.seed = *seed_override;
    c.vem.seed = *seed_override;
  }
  c.Validate();
  return c;
}

}  // namespace avfront
