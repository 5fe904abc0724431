// harness/pipeline.cc

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

#include "avfront/harness.h"

namespace avfront {

Conditioning ConditioningFor(const std::string &method) {
  if (method == kMethodAvae) return Conditioning::kNone;
  if (method == kMethodCvaeHeadMotion) return Conditioning::kHeadMotion;
  if (method == kMethodCvaeFrontal) return Conditioning::kFrontal;
  Fail(ErrorCode::kInvalidArgument, "method '" + method + "' has no learned prior");
}

namespace {

bool IsLearned(const std::string &method) {
  return method == kMethodAvae || method == kMethodCvaeHeadMotion ||
         method == kMethodCvaeFrontal;
}

Eigen::MatrixXd SelectFeatures(const UtteranceFeatures &f, Conditioning c) {
  switch (c) {
    case Conditioning::kNone: return {};
    case Conditioning::kHeadMotion: return f.head_motion.transpose();
    case Conditioning::kFrontal: return f.frontal.transpose();
  }
  return {};
}

}  // namespace

FrameSet BuildFrameSet(const std::vector<Utterance> &utts,
                       const std::vector<UtteranceFeatures> &feats, Conditioning c,
                       const StftConfig &stft) {
  Require(utts.size() == feats.size(), ErrorCode::kDimensionMismatch,
          "one feature set per utterance is required");
  FrameSet set;
  for (size_t i = 0; i < utts.size(); ++i) {
    const Eigen::MatrixXd P = Stft(utts[i].clean, stft).Power();
    Eigen::MatrixXd v = SelectFeatures(feats[i], c);
    if (c == Conditioning::kNone) v.resize(0, P.cols());
    Require(v.rows() == 0 || v.cols() == P.cols(), ErrorCode::kDimensionMismatch,
            utts[i].id + ": " + std::to_string(v.cols()) + " visual frames for " +
                std::to_string(P.cols()) + " STFT frames");
    set.Append(P, v);
  }
  return set;
}

Waveform EnhanceWith(const std::string &method, const Waveform &mixture,
                     const Waveform &clean, const VaeParams *prior,
                     const Eigen::MatrixXd &features, const VemConfig &vem,
                     VemDiagnostics *diag) {
  if (method == kMethodNoisy) return mixture;
  const Spectrogram S = Stft(mixture);
  VemResult r;
  if (method == kMethodOracle) {
    const Eigen::MatrixXd vs = Stft(clean).Power().cwiseMax(1e-10);
    r = VemEnhance(S, vs, vem);
  } else {
    Require(prior != nullptr, ErrorCode::kMissingArtifacts,
            "method '" + method + "' needs trained prior parameters");
    const Conditioning c = ConditioningFor(method);
    Eigen::MatrixXd visual;
    if (c != Conditioning::kNone) visual = features.transpose();
    r = VemEnhance(S, *prior, visual, vem);
  }
  if (diag) *diag = r.diagnostics;
  return Istft(r.enhanced);
}

TrainedPriors TrainPriors(const Corpus &corpus,
                          const std::vector<UtteranceFeatures> &train_feats,
                          const std::vector<UtteranceFeatures> &val_feats) {
  TrainedPriors out;
  for (const auto &m : corpus.config.methods) {
    if (!IsLearned(m)) continue;
    const Conditioning c = ConditioningFor(m);
    const FrameSet tr = BuildFrameSet(corpus.train, train_feats, c, {});
    const FrameSet va = BuildFrameSet(corpus.val, val_feats, c, {});
    TrainResult r = Train(tr, va, corpus.config.train);
    out.params[m] = r.params;
    out.results[m] = std::move(r);
  }
  return out;
}

std::vector<ReportRow> EvaluateCorpus(const Corpus &corpus,
                                      const std::vector<UtteranceFeatures> &test_feats,
                                      const TrainedPriors &priors) {
  Require(test_feats.size() == corpus.test.size(), ErrorCode::kDimensionMismatch,
          "one feature set per test utterance is required");
  std::vector<ReportRow> rows;
  for (size_t i = 0; i < corpus.test.size(); ++i) {
    const Utterance &u = corpus.test[i];
    for (double snr : corpus.config.snr_db) {
      const Mixture mix = MixAtSnr(u.clean, u.noise, snr);
      for (const auto &m : corpus.config.methods) {
        const VaeParams *prior = nullptr;
        Eigen::MatrixXd feats;
        if (IsLearned(m)) {
          auto it = priors.params.find(m);
          Require(it != priors.params.end(), ErrorCode::kMissingArtifacts,
                  "no trained prior for method '" + m + "'");
          prior = &it->second;
          const Conditioning c = ConditioningFor(m);
          if (c == Conditioning::kHeadMotion) feats = test_feats[i].head_motion;
          if (c == Conditioning::kFrontal) feats = test_feats[i].frontal;
        }
        const Waveform est = EnhanceWith(m, mix.mixture, u.clean, prior, feats,
                                         corpus.config.vem);
        rows.push_back({u.id, snr, m, SiSdr(est, u.clean), Stoi(est, u.clean)});
      }
    }
  }
  return rows;
}

}  // namespace avfront
