// prior/vae.cc

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

#include "avfront/prior.h"

namespace avfront {

namespace {

DenseLayer XavierLayer(int in, int out, std::mt19937_64 &rng) {
  DenseLayer l;
  l.W.resize(out, in);
  l.b = Eigen::VectorXd::Zero(out);
  const double lim = std::sqrt(6.0 / (in + out));
  std::uniform_real_distribution<double> u(-lim, lim);
  for (int c = 0; c < in; ++c)
    for (int r = 0; r < out; ++r) l.W(r, c) = u(rng);
  return l;
}

Eigen::MatrixXd Affine(const DenseLayer &l, const Eigen::MatrixXd &x) {
  Eigen::MatrixXd y = l.W * x;
  y.colwise() += l.b;
  return y;
}

void AccumulateLayerGrad(const Eigen::MatrixXd &delta, const Eigen::MatrixXd &input,
                         DenseLayer *g) {
  g->W.noalias() += delta * input.transpose();
  g->b += delta.rowwise().sum();
}

Eigen::MatrixXd Stack(const Eigen::MatrixXd &top, const Eigen::MatrixXd &bottom) {
  if (bottom.rows() == 0) return top;
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

void CheckVisual(const VaeParams &p, const Eigen::MatrixXd &visual, int n) {
  if (p.M == 0) {
    Require(visual.size() == 0, ErrorCode::kDimensionMismatch,
            "audio-only model given visual features");
    return;
  }
  Require(visual.rows() == p.M && visual.cols() == n, ErrorCode::kDimensionMismatch,
          "visual features must be " + std::to_string(p.M) + " x " + std::to_string(n) +
              ", got " + std::to_string(visual.rows()) + " x " +
              std::to_string(visual.cols()));
}

Eigen::MatrixXd EncoderInput(const VaeParams &p, const Eigen::MatrixXd &power,
                             const Eigen::MatrixXd &visual) {
  Require(power.rows() == p.F, ErrorCode::kDimensionMismatch,
          "power frames have " + std::to_string(power.rows()) + " bins, model expects " +
              std::to_string(p.F));
  Require((power.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "power frames must be nonnegative");
  CheckVisual(p, visual, static_cast<int>(power.cols()));
  Eigen::MatrixXd x = (power.array() + kLogPowerOffset).log().matrix();
  x.colwise() -= p.input_mean;
  x.array().colwise() /= p.input_std.array();
  return Stack(x, visual);
}

}  // namespace

VaeParams VaeParams::ZerosLike() const {
  VaeParams z = *this;
  z.ForEachTensor([](const char *, auto m) { m.setZero(); });
  return z;
}

int64_t VaeParams::NumParameters() const {
  int64_t n = 0;
  ForEachTensor([&n](const char *, auto m) { n += m.size(); });
  return n;
}

void VaeParams::Validate() const {
  Require(F > 0 && L > 0 && M >= 0 && hidden > 0, ErrorCode::kInvalidArgument,
          "VAE dims must be positive");
  auto check = [](const DenseLayer &l, int in, int out, const char *name) {
    Require(l.W.rows() == out && l.W.cols() == in && l.b.size() == out,
            ErrorCode::kDimensionMismatch, std::string("layer ") + name + " has wrong shape");
    RequireFinite(l.W, name);
    RequireFinite(l.b, name);
  };
  check(enc_hidden, F + M, hidden, "enc_hidden");
  check(enc_mu, hidden, L, "enc_mu");
  check(enc_logvar, hidden, L, "enc_logvar");
  check(dec_hidden, L + M, hidden, "dec_hidden");
  check(dec_out, hidden, F, "dec_out");
  if (M > 0) {
    check(prior_hidden, M, hidden, "prior_hidden");
    check(prior_mu, hidden, L, "prior_mu");
    check(prior_logvar, hidden, L, "prior_logvar");
  }
  Require(input_mean.size() == F && input_std.size() == F, ErrorCode::kDimensionMismatch,
          "input statistics must have F entries");
  RequireFinite(input_mean, "input_mean");
  Require((input_std.array() > 0.0).all() && input_std.allFinite(),
          ErrorCode::kInvalidArgument, "input_std must be positive");
}

VaeParams InitVaeParams(int F, int L, int M, int hidden, uint64_t seed) {
  Require(F > 0 && L > 0 && M >= 0 && hidden > 0, ErrorCode::kInvalidArgument,
          "VAE dims must be positive");
  std::mt19937_64 rng(seed);
  VaeParams p;
  p.F = F;
  p.L = L;
  p.M = M;
  p.hidden = hidden;
  p.seed = seed;
  p.input_mean = Eigen::VectorXd::Zero(F);
  p.input_std = Eigen::VectorXd::Ones(F);
  p.enc_hidden = XavierLayer(F + M, hidden, rng);
  p.enc_mu = XavierLayer(hidden, L, rng);
  p.enc_logvar = XavierLayer(hidden, L, rng);
  p.dec_hidden = XavierLayer(L + M, hidden, rng);
  p.dec_out = XavierLayer(hidden, F, rng);
  if (M > 0) {
    p.prior_hidden = XavierLayer(M, hidden, rng);
    p.prior_mu = XavierLayer(hidden, L, rng);
    p.prior_logvar = XavierLayer(hidden, L, rng);
  }
  return p;
}

void SetInputStatistics(const Eigen::MatrixXd &power, VaeParams *params) {
  Require(power.rows() == params->F && power.cols() > 0, ErrorCode::kDimensionMismatch,
          "statistics need F x N power frames");
  const Eigen::ArrayXXd x = (power.array() + kLogPowerOffset).log();
  const Eigen::VectorXd mean = x.rowwise().mean();
  Eigen::VectorXd sd(params->F);
  for (int f = 0; f < params->F; ++f) {
    const double var = (x.row(f) - mean(f)).square().mean();
    sd(f) = std::max(std::sqrt(var), 1e-3);
  }
  params->input_mean = mean;
  params->input_std = sd;
  params->dec_out.b = mean;
}

Gaussian Encode(const VaeParams &params, const Eigen::MatrixXd &power,
                const Eigen::MatrixXd &visual) {
  const Eigen::MatrixXd x = EncoderInput(params, power, visual);
  const Eigen::MatrixXd h = Affine(params.enc_hidden, x).array().tanh().matrix();
  return {Affine(params.enc_mu, h), Affine(params.enc_logvar, h)};
}

Eigen::MatrixXd Decode(const VaeParams &params, const Eigen::MatrixXd &z,
                       const Eigen::MatrixXd &visual) {
  Require(z.rows() == params.L, ErrorCode::kDimensionMismatch,
          "latent has " + std::to_string(z.rows()) + " rows, model expects " +
              std::to_string(params.L));
  CheckVisual(params, visual, static_cast<int>(z.cols()));
  const Eigen::MatrixXd g = Affine(params.dec_hidden, Stack(z, visual)).array().tanh().matrix();
  return (Affine(params.dec_out, g).array().exp() + kVarianceFloor).matrix();
}

Gaussian LatentPrior(const VaeParams &params, const Eigen::MatrixXd &visual, int n) {
  CheckVisual(params, visual, n);
  if (params.M == 0)
    return {Eigen::MatrixXd::Zero(params.L, n), Eigen::MatrixXd::Zero(params.L, n)};
  const Eigen::MatrixXd h = Affine(params.prior_hidden, visual).array().tanh().matrix();
  return {Affine(params.prior_mu, h), Affine(params.prior_logvar, h)};
}

double GaussianKl(const Gaussian &q, const Gaussian &p) {
  const Eigen::ArrayXXd d = (q.mu - p.mu).array();
  return 0.5 * (p.logvar.array() - q.logvar.array() +
                (q.logvar.array().exp() + d.square()) * (-p.logvar.array()).exp() - 1.0)
                   .sum();
}

Eigen::MatrixXd StandardNormalMatrix(int rows, int cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd e(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) e(r, c) = n01(rng);
  return e;
}

ElboResult Elbo(const VaeParams &p, const Eigen::MatrixXd &power,
                const Eigen::MatrixXd &visual, const Eigen::MatrixXd &eps, bool with_grad) {
  const int n = static_cast<int>(power.cols());
  Require(n > 0, ErrorCode::kInvalidArgument, "ELBO needs a nonempty batch");
  Require(eps.rows() == p.L && eps.cols() == n, ErrorCode::kDimensionMismatch,
          "noise draws must be L x N");

  // Encoder.
  const Eigen::MatrixXd x = EncoderInput(p, power, visual);
  const Eigen::MatrixXd h = Affine(p.enc_hidden, x).array().tanh().matrix();
  const Eigen::MatrixXd mu = Affine(p.enc_mu, h);
  const Eigen::MatrixXd lv = Affine(p.enc_logvar, h);
  const Eigen::ArrayXXd sd = (0.5 * lv.array()).exp();
  const Eigen::MatrixXd z = (mu.array() + sd * eps.array()).matrix();

  // Latent prior.
  Eigen::MatrixXd hp;
  Gaussian prior;
  if (p.M > 0) {
    hp = Affine(p.prior_hidden, visual).array().tanh().matrix();
    prior = {Affine(p.prior_mu, hp), Affine(p.prior_logvar, hp)};
  } else {
    prior = {Eigen::MatrixXd::Zero(p.L, n), Eigen::MatrixXd::Zero(p.L, n)};
  }

  // Decoder.
  const Eigen::MatrixXd u = Stack(z, visual);
  const Eigen::MatrixXd g = Affine(p.dec_hidden, u).array().tanh().matrix();
  const Eigen::ArrayXXd eo = Affine(p.dec_out, g).array().exp();
  const Eigen::ArrayXXd s2 = eo + kVarianceFloor;

  const double recon = (-s2.log() - power.array() / s2).sum();
  const double kl = GaussianKl({mu, lv}, prior);
  ElboResult res;
  res.value = recon - kl;
  RequireFinite(res.value, "ELBO");
  if (!with_grad) return res;

  res.grad = p.ZerosLike();
  VaeParams &gr = res.grad;

  const Eigen::MatrixXd d_o = ((power.array() / s2.square() - 1.0 / s2) * eo).matrix();
  AccumulateLayerGrad(d_o, g, &gr.dec_out);
  const Eigen::MatrixXd d_a2 =
      ((p.dec_out.W.transpose() * d_o).array() * (1.0 - g.array().square())).matrix();
  AccumulateLayerGrad(d_a2, u, &gr.dec_hidden);
  const Eigen::MatrixXd d_z = (p.dec_hidden.W.transpose() * d_a2).topRows(p.L);

  const Eigen::ArrayXXd inv_pvar = (-prior.logvar.array()).exp();
  const Eigen::ArrayXXd diff = (mu - prior.mu).array();
  const Eigen::MatrixXd d_mu = (d_z.array() - diff * inv_pvar).matrix();
  const Eigen::MatrixXd d_lv =
      (d_z.array() * eps.array() * 0.5 * sd +
       0.5 * (1.0 - (lv.array() - prior.logvar.array()).exp()))
          .matrix();
  AccumulateLayerGrad(d_mu, h, &gr.enc_mu);
  AccumulateLayerGrad(d_lv, h, &gr.enc_logvar);
  const Eigen::MatrixXd d_h = p.enc_mu.W.transpose() * d_mu + p.enc_logvar.W.transpose() * d_lv;
  const Eigen::MatrixXd d_a1 = (d_h.array() * (1.0 - h.array().square())).matrix();
  AccumulateLayerGrad(d_a1, x, &gr.enc_hidden);

  if (p.M > 0) {
    const Eigen::MatrixXd d_pmu = (diff * inv_pvar).matrix();
    const Eigen::MatrixXd d_plv =
        (-0.5 * (1.0 - (lv.array().exp() + diff.square()) * inv_pvar)).matrix();
    AccumulateLayerGrad(d_pmu, hp, &gr.prior_mu);
    AccumulateLayerGrad(d_plv, hp, &gr.prior_logvar);
    const Eigen::MatrixXd d_hp =
        p.prior_mu.W.transpose() * d_pmu + p.prior_logvar.W.transpose() * d_plv;
    const Eigen::MatrixXd d_ap = (d_hp.array() * (1.0 - hp.array().square())).matrix();
    AccumulateLayerGrad(d_ap, visual, &gr.prior_hidden);
  }
  return res;
}

ElboResult Elbo(const VaeParams &params, const Eigen::MatrixXd &power,
                const Eigen::MatrixXd &visual, std::mt19937_64 &rng, bool with_grad) {
  const Eigen::MatrixXd eps =
      StandardNormalMatrix(params.L, static_cast<int>(power.cols()), rng);
  return Elbo(params, power, visual, eps, with_grad);
}

}  // namespace avfront
