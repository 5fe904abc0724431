// prior/train.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "avfront/prior.h"

namespace avfront {

namespace {

Eigen::MatrixXd Columns(const Eigen::MatrixXd &m, std::span<const int> idx) {
  Eigen::MatrixXd out(m.rows(), idx.size());
  if (m.rows() == 0) return out;
  for (size_t i = 0; i < idx.size(); ++i) out.col(i) = m.col(idx[i]);
  return out;
}

void CheckFrameSet(const FrameSet &d, const char *what) {
  Require(d.size() > 0, ErrorCode::kInvalidArgument, std::string(what) + " set is empty");
  Require(d.visual.rows() == 0 || d.visual.cols() == d.power.cols(),
          ErrorCode::kDimensionMismatch,
          std::string(what) + " visual features do not align with power frames");
}

struct Adam {
  std::vector<Eigen::MatrixXd> m, v;
  int64_t step = 0;

  explicit Adam(const VaeParams &p) {
    p.ForEachTensor([this](const char *, auto t) {
      m.push_back(Eigen::MatrixXd::Zero(t.rows(), t.cols()));
      v.push_back(Eigen::MatrixXd::Zero(t.rows(), t.cols()));
    });
  }

  // Ascent step on `params` along `grad`.
  void Update(const VaeParams &grad, const TrainConfig &cfg, VaeParams *params) {
    ++step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    std::vector<Eigen::Map<const Eigen::MatrixXd>> g;
    grad.ForEachTensor([&g](const char *, auto t) { g.push_back(t); });
    size_t i = 0;
    params->ForEachTensor([&](const char *, auto t) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i].cwiseAbs2();
      t.array() += cfg.learning_rate * (m[i].array() / c1) /
                   ((v[i].array() / c2).sqrt() + cfg.adam_eps);
      ++i;
    });
  }
};

}  // namespace

void FrameSet::Append(const Eigen::MatrixXd &p, const Eigen::MatrixXd &v) {
  Require(v.rows() == 0 || v.cols() == p.cols(), ErrorCode::kDimensionMismatch,
          "visual features do not align with power frames");
  if (power.size() == 0) {
    power = p;
    visual = v.rows() == 0 ? Eigen::MatrixXd(0, p.cols()) : v;
    return;
  }
  Require(p.rows() == power.rows() && v.rows() == visual.rows(),
          ErrorCode::kDimensionMismatch, "appended frames have different dims");
  Eigen::MatrixXd np(power.rows(), power.cols() + p.cols());
  np << power, p;
  power = std::move(np);
  Eigen::MatrixXd nv(visual.rows(), visual.cols() + p.cols());
  if (visual.rows() > 0) nv << visual, v;
  visual = std::move(nv);
}

void TrainConfig::Validate() const {
  Require(learning_rate > 0.0 && batch_size > 0 && patience >= 1 && max_epochs >= 1 &&
              latent_dim > 0 && hidden > 0,
          ErrorCode::kInconsistentConfig,
          "training needs positive rate, batch, epochs, dims and patience >= 1");
  Require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_eps > 0.0,
          ErrorCode::kInconsistentConfig, "Adam moments must lie in [0, 1)");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"learning_rate", learning_rate}, {"batch_size", batch_size},
          {"beta1", beta1},                 {"beta2", beta2},
          {"adam_eps", adam_eps},           {"patience", patience},
          {"max_epochs", max_epochs},       {"latent_dim", latent_dim},
          {"hidden", hidden},               {"seed", seed}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json &j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.patience = j.value("patience", c.patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

double MeanElbo(const VaeParams &params, const FrameSet &data, uint64_t seed) {
  CheckFrameSet(data, "evaluation");
  std::mt19937_64 rng(seed);
  constexpr int kChunk = 1024;
  double total = 0.0;
  std::vector<int> idx;
  for (int start = 0; start < data.size(); start += kChunk) {
    const int n = std::min(kChunk, data.size() - start);
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), start);
    const Eigen::MatrixXd eps = StandardNormalMatrix(params.L, n, rng);
    total += Elbo(params, Columns(data.power, idx), Columns(data.visual, idx), eps, false).value;
  }
  return total / data.size();
}

TrainResult Train(const FrameSet &train, const FrameSet &val, const TrainConfig &cfg,
                  const VaeParams *init) {
  cfg.Validate();
  CheckFrameSet(train, "training");
  CheckFrameSet(val, "validation");
  const int F = static_cast<int>(train.power.rows());
  const int M = static_cast<int>(train.visual.rows());
  Require(val.power.rows() == F && val.visual.rows() == M, ErrorCode::kDimensionMismatch,
          "training and validation sets have different dims");

  VaeParams params;
  if (init) {
    params = *init;
    params.Validate();
    Require(params.F == F && params.M == M, ErrorCode::kDimensionMismatch,
            "initial parameters do not match the dataset dims");
  } else {
    params = InitVaeParams(F, cfg.latent_dim, M, cfg.hidden, cfg.seed);
    SetInputStatistics(train.power, &params);
  }

  const uint64_t val_seed = cfg.seed ^ 0x5eedf00dULL;
  TrainResult res;
  res.initial_val_elbo = MeanElbo(params, val, val_seed);
  res.best_val_elbo = res.initial_val_elbo;
  res.params = params;

  std::mt19937_64 rng(cfg.seed + 1);
  Adam adam(params);
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < train.size(); start += cfg.batch_size) {
      const int n = std::min(cfg.batch_size, train.size() - start);
      std::span<const int> idx(order.data() + start, n);
      ElboResult r;
      try {
        r = Elbo(params, Columns(train.power, idx), Columns(train.visual, idx), rng);
      } catch (const Error &e) {
        Fail(e.code(), "training diverged in epoch " + std::to_string(epoch) + ": " +
                           e.what());
      }
      r.grad.ForEachTensor([n](const char *, auto t) { t /= n; });
      adam.Update(r.grad, cfg, &params);
    }
    const double v = MeanElbo(params, val, val_seed);
    Require(std::isfinite(v), ErrorCode::kNonFinite,
            "validation ELBO is not finite after epoch " + std::to_string(epoch));
    res.val_trace.push_back(v);
    res.epochs_run = epoch;
    if (v > res.best_val_elbo) {
      res.best_val_elbo = v;
      res.best_epoch = epoch;
      res.params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      res.stopped_early = true;
      break;
    }
  }
  return res;
}

}  // namespace avfront
