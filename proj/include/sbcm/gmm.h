// sbcm/gmm.h

// Copyright 2026  The sbcm Authors

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

#ifndef SBCM_GMM_H_
#define SBCM_GMM_H_

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sbcm/common.h"

namespace sbcm {

/// Diagonal-covariance Gaussian mixture. Immutable once built; scoring is
/// safe from many threads.
class DiagGmm {
 public:
  DiagGmm() = default;
  /// weights: K, means/vars: K x D. Throws ConfigError if the parameters do
  /// not form a valid model (see Validate).
  DiagGmm(Vector weights, Matrix means, Matrix vars);

  int NumComponents() const { return static_cast<int>(weights_.size()); }
  int Dim() const { return static_cast<int>(means_.cols()); }
  const Vector &weights() const { return weights_; }
  const Matrix &means() const { return means_; }
  const Matrix &vars() const { return vars_; }

  /// Weights sum to 1 within 1e-10, every variance >= var_floor (and > 0),
  /// everything finite.
  void Validate(double var_floor = 0.0) const;
  void Validate(const Vector &var_floor) const;

  /// n x K matrix of log w_k + log N(x_t; mu_k, diag(var_k)).
  Matrix ComponentLogLikelihoods(const Matrix &feats) const;
  /// Per-frame log p(x_t), log-sum-exp over components.
  Vector FrameLogLikelihoods(const Matrix &feats) const;
  /// Frame-averaged log-likelihood in nats.
  double LogLikelihood(const Matrix &feats) const;

  void Write(std::ostream &os) const;
  static DiagGmm Read(std::istream &is);

  bool operator==(const DiagGmm &o) const {
    return weights_ == o.weights_ && means_ == o.means_ && vars_ == o.vars_;
  }

 private:
  void Precompute();

  Vector weights_;
  Matrix means_;
  Matrix vars_;
  // Cached for scoring.
  Matrix inv_vars_;        // K x D
  Matrix means_inv_vars_;  // K x D
  Vector gconsts_;         // K: log w - 0.5 (D log 2pi + sum log var + sum mu^2/var)
};

struct EmOptions {
  int max_iters = 100;
  /// Stop when the relative gain in average log-likelihood drops below tol.
  double tol = 1e-5;
  /// Variance floor as a fraction of the pooled per-dimension variance.
  double var_floor_ratio = 1e-3;
  int kmeans_iters = 10;
  uint64_t seed = 0;
  int jobs = 1;
};

struct EmTrace {
  /// Average per-frame log-likelihood of the model entering each iteration.
  std::vector<double> avg_loglik;
  Vector var_floor;
  int reseeded_components = 0;
  bool converged = false;
};

/// Called after every M-step with the iteration index and the new model.
using EmObserver = std::function<void(int, const DiagGmm &)>;

/// Per-dimension variance floor for the pooled frames.
Vector VarianceFloor(const Matrix &frames, double ratio);

/// k-means++ seeding followed by Lloyd iterations. Returns K x D centroids
/// and fills `assignment` when non-null. Deterministic given the seed.
Matrix KMeans(const Matrix &frames, int k, int iters, uint64_t seed,
              std::vector<int> *assignment = nullptr);

/// EM training from k-means initialisation. Throws DataError when fewer than
/// 10*K frames are available and DimensionError on inconsistent dims.
DiagGmm TrainGmm(std::span<const Matrix> features, int num_components, const EmOptions &opts,
                 EmTrace *trace = nullptr, const EmObserver &observer = {});

/// A countermeasure: bona fide and spoof models over the same features.
struct CmPair {
  DiagGmm bona;
  DiagGmm spoof;
  std::string config_hash;

  void Write(const std::string &path) const;
  static CmPair Read(const std::string &path);
};

/// Trains both models with the same seed (derived from opts.seed), so
/// identical data yields identical models and a zero LLR.
CmPair TrainCmPair(std::span<const Matrix> bona, std::span<const Matrix> spoof, int num_components,
                   const EmOptions &opts, const std::string &config_hash);

/// log p(X | bona) - log p(X | spoof), each frame-averaged. High = bona fide.
double LlrScore(const CmPair &cm, const Matrix &feats);

}  // namespace sbcm

#endif  // SBCM_GMM_H_
