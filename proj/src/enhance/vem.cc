// enhance/vem.cc

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
#include <functional>

#include "avfront/enhance.h"

namespace avfront {

void VemConfig::Validate() const {
  Require(outer_iters >= 1 && nmf_inner_iters >= 1 && floor > 0.0 && Kn >= 1 && tol > 0.0,
          ErrorCode::kInconsistentConfig,
          "VEM needs positive iteration counts, floor, rank and tolerance");
}

nlohmann::json VemConfig::ToJson() const {
  return {{"outer_iters", outer_iters}, {"nmf_inner_iters", nmf_inner_iters},
          {"floor", floor},             {"Kn", Kn},
          {"seed", seed},               {"tol", tol},
          {"update_gain", update_gain}};
}

VemConfig VemConfig::FromJson(const nlohmann::json &j) {
  VemConfig c;
  c.outer_iters = j.value("outer_iters", c.outer_iters);
  c.nmf_inner_iters = j.value("nmf_inner_iters", c.nmf_inner_iters);
  c.floor = j.value("floor", c.floor);
  c.Kn = j.value("Kn", c.Kn);
  c.seed = j.value("seed", c.seed);
  c.tol = j.value("tol", c.tol);
  c.update_gain = j.value("update_gain", c.update_gain);
  c.Validate();
  return c;
}

nlohmann::json VemDiagnostics::ToJson() const {
  return {{"divergence_trace", divergence_trace},
          {"iters", iters},
          {"converged", converged},
          {"rejected_latent_updates", rejected_latent_updates}};
}

namespace {

// Shared loop.  `latent_step`, when set, maps the current posterior clean
// power estimate to a candidate sigma2 field.
VemResult RunVem(const Spectrogram &noisy, Eigen::MatrixXd sigma2,
                 const std::function<Eigen::MatrixXd(const Eigen::MatrixXd &)> &latent_step,
                 const VemConfig &cfg) {
  const Eigen::MatrixXd P = noisy.Power();
  RequireFinite(P, "noisy spectrogram");
  NmfNoiseModel model = InitNoiseModel(P, cfg.Kn, cfg.seed);

  VemResult res;
  VemDiagnostics &diag = res.diagnostics;
  double d = IsDivergence(P, ObservedVariance(sigma2, model), cfg.floor);
  diag.divergence_trace.push_back(d);
  for (int it = 1; it <= cfg.outer_iters; ++it) {
    for (int k = 0; k < cfg.nmf_inner_iters; ++k)
      model = MStepNmf(P, sigma2, model, cfg.floor, cfg.update_gain);
    d = IsDivergence(P, ObservedVariance(sigma2, model), cfg.floor);

    if (latent_step) {
      const Eigen::MatrixXd vs = sigma2 * model.g.asDiagonal();
      const Eigen::MatrixXd vb = model.NoiseVariance();
      const Eigen::ArrayXXd gain = vs.array() / (vs.array() + vb.array());
      const Eigen::MatrixXd clean_power =
          (gain.square() * P.array() + gain * vb.array()).matrix();
      Eigen::MatrixXd candidate = latent_step(clean_power);
      const double dc = IsDivergence(P, ObservedVariance(candidate, model), cfg.floor);
      if (dc <= d) {
        sigma2 = std::move(candidate);
        d = dc;
      } else {
        ++diag.rejected_latent_updates;
      }
    }
    RequireFinite(d, "IS divergence at iteration " + std::to_string(it));
    const double prev = diag.divergence_trace.back();
    diag.divergence_trace.push_back(d);
    diag.iters = it;
    if (std::abs(prev - d) <= cfg.tol * std::abs(prev)) {
      diag.converged = true;
      break;
    }
  }

  res.speech_var = sigma2 * model.g.asDiagonal();
  res.enhanced = noisy;
  res.enhanced.data = WienerFilter(noisy.data, res.speech_var, model.NoiseVariance());
  res.noise = std::move(model);
  return res;
}

}  // namespace

VemResult VemEnhance(const Spectrogram &noisy, const VaeParams &prior,
                     const Eigen::MatrixXd &visual, const VemConfig &cfg) {
  cfg.Validate();
  prior.Validate();
  Require(noisy.F() == prior.F, ErrorCode::kDimensionMismatch,
          "spectrogram has " + std::to_string(noisy.F()) + " bins, prior expects " +
              std::to_string(prior.F));
  auto step = [&](const Eigen::MatrixXd &clean_power) {
    return Decode(prior, Encode(prior, clean_power, visual).mu, visual);
  };
  Eigen::MatrixXd sigma2 = step(noisy.Power());
  return RunVem(noisy, std::move(sigma2), step, cfg);
}

VemResult VemEnhance(const Spectrogram &noisy, const Eigen::MatrixXd &oracle_speech_var,
                     const VemConfig &cfg) {
  cfg.Validate();
  Require(oracle_speech_var.rows() == noisy.F() && oracle_speech_var.cols() == noisy.T(),
          ErrorCode::kDimensionMismatch, "oracle variance does not match the spectrogram");
  Require((oracle_speech_var.array() > 0.0).all() && oracle_speech_var.allFinite(),
          ErrorCode::kInvalidArgument, "oracle variance must be positive");
  return RunVem(noisy, oracle_speech_var, nullptr, cfg);
}

}  // namespace avfront
