// avfront/prior.h

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

#ifndef AVFRONT_PRIOR_H_
#define AVFRONT_PRIOR_H_

// Dense (conditional) VAE over STFT power frames.  The decoder gives the
// per-bin variance of a zero-mean circular complex Gaussian; the encoder sees
// standardized log power; with M > 0 both networks also see a visual feature
// vector and the latent prior is produced by a small prior network.

#include <cstdint>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "avfront/common.h"
#include "json.hpp"

namespace avfront {

inline constexpr double kLogPowerOffset = 1e-10;
inline constexpr double kVarianceFloor = 1e-8;

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;

  int in() const { return static_cast<int>(W.cols()); }
  int out() const { return static_cast<int>(W.rows()); }
};

struct VaeParams {
  int F = 0;
  int L = 0;
  int M = 0;
  int hidden = 0;
  uint64_t seed = 0;

  // Per-bin statistics of log(power + 1e-10) used to standardize encoder input.
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_std;

  DenseLayer enc_hidden;  // F + M -> hidden
  DenseLayer enc_mu;      // hidden -> L
  DenseLayer enc_logvar;  // hidden -> L
  DenseLayer dec_hidden;  // L + M -> hidden
  DenseLayer dec_out;     // hidden -> F, log variance
  DenseLayer prior_hidden;  // M -> hidden (empty when M == 0)
  DenseLayer prior_mu;
  DenseLayer prior_logvar;

  /// Calls fn(name, Eigen::Map<MatrixXd>) for every trainable tensor, in a
  /// fixed order.  Biases are visited as column vectors.
  template <typename Fn>
  void ForEachTensor(Fn &&fn) {
    VisitAll(*this, fn);
  }
  template <typename Fn>
  void ForEachTensor(Fn &&fn) const {
    VisitAll(*this, fn);
  }

  /// Same dims, every tensor zero.
  VaeParams ZerosLike() const;
  int64_t NumParameters() const;
  void Validate() const;

 private:
  template <typename P, typename Fn>
  static void VisitAll(P &p, Fn &fn) {
    auto visit = [&fn](const char *name, auto &layer) {
      std::string base(name);
      fn((base + ".W").c_str(), MapOf(layer.W));
      fn((base + ".b").c_str(), MapOf(layer.b));
    };
    visit("enc_hidden", p.enc_hidden);
    visit("enc_mu", p.enc_mu);
    visit("enc_logvar", p.enc_logvar);
    visit("dec_hidden", p.dec_hidden);
    visit("dec_out", p.dec_out);
    if (p.M > 0) {
      visit("prior_hidden", p.prior_hidden);
      visit("prior_mu", p.prior_mu);
      visit("prior_logvar", p.prior_logvar);
    }
  }
  template <typename T>
  static auto MapOf(T &m) {
    using Scalar = std::conditional_t<std::is_const_v<T>, const double, double>;
    return Eigen::Map<std::conditional_t<std::is_const_v<T>, const Eigen::MatrixXd,
                                         Eigen::MatrixXd>>(
        static_cast<Scalar *>(m.data()), m.rows(), m.cols());
  }
};

/// Xavier-uniform weights, zero biases, unit input statistics, and a decoder
/// output bias of zero.  `hidden` is 128 in the reference configuration.
VaeParams InitVaeParams(int F, int L, int M, int hidden, uint64_t seed);

/// Sets the standardization statistics from a training set of power frames
/// (F x N) and aligns the decoder output bias with the mean log power.
void SetInputStatistics(const Eigen::MatrixXd &power, VaeParams *params);

struct Gaussian {
  Eigen::MatrixXd mu;      // L x N
  Eigen::MatrixXd logvar;  // L x N
};

/// Posterior parameters for each column of `power` (F x N).  `visual` is
/// M x N, or empty when M == 0.
Gaussian Encode(const VaeParams &params, const Eigen::MatrixXd &power,
                const Eigen::MatrixXd &visual);
/// Decoder variance exp(head) + 1e-8 for each column of z (L x N).
Eigen::MatrixXd Decode(const VaeParams &params, const Eigen::MatrixXd &z,
                       const Eigen::MatrixXd &visual);
/// Latent prior per column: the prior network when M > 0, N(0, I) otherwise.
Gaussian LatentPrior(const VaeParams &params, const Eigen::MatrixXd &visual, int n);

/// KL(N(mu_q, e^lv_q) || N(mu_p, e^lv_p)) summed over all entries.
double GaussianKl(const Gaussian &q, const Gaussian &p);

struct ElboResult {
  double value = 0.0;  // summed over the batch
  VaeParams grad;      // d value / d params
};

/// One-sample reparameterized ELBO of a batch with gradients.  `eps` (L x N)
/// supplies the standard-normal draws explicitly.
ElboResult Elbo(const VaeParams &params, const Eigen::MatrixXd &power,
                const Eigen::MatrixXd &visual, const Eigen::MatrixXd &eps,
                bool with_grad = true);
ElboResult Elbo(const VaeParams &params, const Eigen::MatrixXd &power,
                const Eigen::MatrixXd &visual, std::mt19937_64 &rng,
                bool with_grad = true);

Eigen::MatrixXd StandardNormalMatrix(int rows, int cols, std::mt19937_64 &rng);

/// Power frames (F x N) with aligned visual features (M x N, possibly 0 x N).
struct FrameSet {
  Eigen::MatrixXd power;
  Eigen::MatrixXd visual;

  int size() const { return static_cast<int>(power.cols()); }
  void Append(const Eigen::MatrixXd &p, const Eigen::MatrixXd &v);
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int patience = 10;
  int max_epochs = 200;
  int latent_dim = 32;
  int hidden = 128;
  uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json &j);
};

struct TrainResult {
  VaeParams params;                // best validation ELBO
  double initial_val_elbo = 0.0;   // per frame
  double best_val_elbo = 0.0;      // per frame
  int best_epoch = 0;
  int epochs_run = 0;
  bool stopped_early = false;
  std::vector<double> val_trace;   // per-frame validation ELBO after each epoch
};

/// Adam on the mean per-frame ELBO with early stopping on the validation set.
/// When `init` is given training starts from it (fine-tuning); otherwise from
/// InitVaeParams with statistics from `train`.  Validation uses one fixed set
/// of noise draws so epochs are compared on equal footing.
TrainResult Train(const FrameSet &train, const FrameSet &val, const TrainConfig &cfg,
                  const VaeParams *init = nullptr);

/// Mean per-frame ELBO of a dataset under fixed draws from `seed`.
double MeanElbo(const VaeParams &params, const FrameSet &data, uint64_t seed);

nlohmann::json VaeParamsToJson(const VaeParams &params);
VaeParams VaeParamsFromJson(const nlohmann::json &j);
void SaveVaeParams(const std::string &path, const VaeParams &params,
                   const nlohmann::json &extra = nlohmann::json::object());
VaeParams LoadVaeParams(const std::string &path, nlohmann::json *extra = nullptr);

/// Text matrix: a header line "F T" followed by F comma-separated rows.
void WriteOraclePrior(const std::string &path, const Eigen::MatrixXd &v);
/// Reads and validates an F x T variance field; zero entries become 1e-10.
/// Negative or malformed entries are BadFile.
Eigen::MatrixXd ReadOraclePrior(const std::string &path, int expect_F = -1,
                                int expect_T = -1);

}  // namespace avfront

#endif  // AVFRONT_PRIOR_H_
