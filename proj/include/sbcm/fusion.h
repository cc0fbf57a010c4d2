// sbcm/fusion.h

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

#ifndef SBCM_FUSION_H_
#define SBCM_FUSION_H_

#include <string>
#include <variant>
#include <vector>

#include "sbcm/corpus.h"
#include "sbcm/gmm.h"
#include "sbcm/svm.h"

namespace sbcm {

// Four ways of turning a vector of CM scores into one detection score. All
// of them keep the convention "high = bona fide". Linear, multinomial and
// GMM fusion produce log-likelihood ratios; the SVM produces a margin.

enum class FusionKind { kLinear, kMultinomial, kGmm, kSvmPoly };

std::string FusionKindName(FusionKind kind);
FusionKind ParseFusionKind(const std::string &name);

/// Per-dimension z-normalisation with training statistics.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer Fit(const Matrix &x);
  Matrix Apply(const Matrix &x) const;
};

struct LinearFusionOptions {
  /// Effective bona fide prior of the weighted logistic objective.
  double prior = 0.5;
  double ridge = 1e-6;
  int max_iters = 100;
  double tol = 1e-10;
};

enum class ClassPartition {
  kBinary,     // {bonafide, spoof}
  kPerAttack,  // {bonafide} + one class per training attack
};

struct MultinomialOptions {
  ClassPartition partition = ClassPartition::kBinary;
  double ridge = 1e-6;
  int max_iters = 100;
  double tol = 1e-10;
};

struct GmmFusionOptions {
  int num_components = 64;
  EmOptions em;
};

struct SvmFusionOptions {
  int degree = 7;
  /// <= 0 selects 1 / D.
  double gamma = 0.0;
  double coef0 = 1.0;
  double c = 1.0;
  double tol = 1e-3;
  long max_iters = 10000000;
};

struct LinearParams {
  Vector weights;
  double bias = 0.0;
};

struct MultinomialParams {
  std::vector<std::string> classes;  // classes[0] is bona fide
  Matrix weights;                    // C x D
  Vector bias;                       // C
};

struct GmmFusionParams {
  Standardizer standardizer;
  DiagGmm bona;
  DiagGmm spoof;
};

struct SvmParams {
  Standardizer standardizer;
  PolyKernel kernel;
  Matrix support;  // standardised support vectors, S x D
  Vector coef;     // alpha_i * y_i
  double rho = 0.0;
};

class FusionModel {
 public:
  using Params = std::variant<LinearParams, MultinomialParams, GmmFusionParams, SvmParams>;

  FusionModel(int dim, Params params);

  FusionKind kind() const;
  int Dim() const { return dim_; }
  const Params &params() const { return params_; }

  /// One fused score per row of x (trials x D).
  Vector Score(const Matrix &x) const;
  /// Fused score records carrying the trials' ids and labels.
  std::vector<ScoreRecord> Fuse(const ScoreVectorSet &set) const;

  void Write(const std::string &path) const;
  static FusionModel Read(const std::string &path);

 private:
  int dim_;
  Params params_;
};

/// Prior-weighted logistic regression on w.x + b (second-order solver).
FusionModel TrainLinearFusion(const ScoreVectorSet &train, const LinearFusionOptions &opts = {});

/// Softmax regression with class-balanced weighting; score is
/// log(p_bona / sum p_spoof) at a flat class prior.
FusionModel TrainMultinomialFusion(const ScoreVectorSet &train, const MultinomialOptions &opts = {});

/// One GMM per class over standardised score vectors; score is the LLR.
FusionModel TrainGmmFusion(const ScoreVectorSet &train, const GmmFusionOptions &opts = {});

/// Polynomial-kernel soft-margin SVM over standardised score vectors.
/// `solution`, when non-null, receives the dual solution over all training
/// trials (in input order, y = +1 for bona fide).
FusionModel TrainSvmFusion(const ScoreVectorSet &train, const SvmFusionOptions &opts = {},
                           SmoSolution *solution = nullptr);

}  // namespace sbcm

#endif  // SBCM_FUSION_H_
