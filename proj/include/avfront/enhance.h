// avfront/enhance.h

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

#ifndef AVFRONT_ENHANCE_H_
#define AVFRONT_ENHANCE_H_

// Unsupervised enhancement.  Each noisy bin o_ft is modelled as zero-mean
// complex Gaussian with variance g_t * sigma2_ft + (W H)_ft, where sigma2
// comes from the speech prior (decoder output or an oracle field) and W H is
// an NMF noise model.  Alternating latent updates and IS-NMF updates are
// followed by Wiener filtering.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "avfront/common.h"
#include "avfront/prior.h"
#include "avfront/spectral.h"
#include "json.hpp"

namespace avfront {

struct NmfNoiseModel {
  Eigen::MatrixXd W;  // F x Kn
  Eigen::MatrixXd H;  // Kn x T
  Eigen::VectorXd g;  // T, gain on the speech variance

  int Kn() const { return static_cast<int>(W.cols()); }
  Eigen::MatrixXd NoiseVariance() const { return W * H; }
  void Validate(int F, int T) const;
};

struct VemConfig {
  int outer_iters = 50;
  int nmf_inner_iters = 1;
  double floor = 1e-12;
  int Kn = 8;
  uint64_t seed = 0;
  double tol = 1e-6;       // relative change of the IS divergence
  bool update_gain = true;

  void Validate() const;
  nlohmann::json ToJson() const;
  static VemConfig FromJson(const nlohmann::json &j);
};

/// Seeded uniform(0.1, 1) factors scaled so that mean(W H) equals the mean
/// power of the first three frames; g = 1.
NmfNoiseModel InitNoiseModel(const Eigen::MatrixXd &power, int Kn, uint64_t seed);
NmfNoiseModel InitNoiseModel(const Spectrogram &noisy, int Kn, uint64_t seed);

/// g_t * speech_var_ft + (W H)_ft.
Eigen::MatrixXd ObservedVariance(const Eigen::MatrixXd &speech_var,
                                 const NmfNoiseModel &model);

/// sum P/V - log(P/V) - 1, with P raised to `floor` inside the logarithm.
double IsDivergence(const Eigen::MatrixXd &power, const Eigen::MatrixXd &variance,
                    double floor = 1e-12);

/// One majorize-minimize pass: H, then W, then (optionally) g, each with the
/// square-root multiplicative rule for the IS divergence and v_o recomputed
/// between factors.  Entries are floored at `floor`.
NmfNoiseModel MStepNmf(const Eigen::MatrixXd &power, const Eigen::MatrixXd &speech_var,
                       const NmfNoiseModel &model, double floor = 1e-12,
                       bool update_gain = true);

/// (v_s / (v_s + v_b)) * o elementwise.
Eigen::VectorXcd WienerFilter(const Eigen::VectorXcd &o, const Eigen::VectorXd &v_s,
                              const Eigen::VectorXd &v_b);
Eigen::MatrixXcd WienerFilter(const Eigen::MatrixXcd &o, const Eigen::MatrixXd &v_s,
                              const Eigen::MatrixXd &v_b);

struct VemDiagnostics {
  std::vector<double> divergence_trace;  // entry 0 is before the first iteration
  int iters = 0;
  bool converged = false;
  int rejected_latent_updates = 0;

  nlohmann::json ToJson() const;
};

struct VemResult {
  Spectrogram enhanced;
  NmfNoiseModel noise;
  Eigen::MatrixXd speech_var;  // g_t * sigma2_ft at the final iterate
  VemDiagnostics diagnostics;
};

/// Learned prior.  The latent code of each frame is the encoder mean of the
/// current posterior clean-power estimate; a new code is kept only when it
/// does not increase the divergence.  `visual` is M x T (empty when M == 0).
VemResult VemEnhance(const Spectrogram &noisy, const VaeParams &prior,
                     const Eigen::MatrixXd &visual, const VemConfig &cfg);

/// Fixed speech variance field (F x T), e.g. the clean power.
VemResult VemEnhance(const Spectrogram &noisy, const Eigen::MatrixXd &oracle_speech_var,
                     const VemConfig &cfg);

}  // namespace avfront

#endif  // AVFRONT_ENHANCE_H_
