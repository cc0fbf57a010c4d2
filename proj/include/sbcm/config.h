// sbcm/config.h

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

#ifndef SBCM_CONFIG_H_
#define SBCM_CONFIG_H_

#include <string>

#include "json.hpp"
#include "sbcm/corpus.h"
#include "sbcm/frontend.h"
#include "sbcm/fusion.h"
#include "sbcm/metrics.h"
#include "sbcm/subband.h"

namespace sbcm {

struct GridConfig {
  double lo = 0.0;
  double hi = 8000.0;
  int points = 21;
  double min_width = 800.0;
  double epsilon = 1e-3;
};

struct GmmConfig {
  int components = 512;
  int max_iters = 100;
  double tol = 1e-5;
  double var_floor_ratio = 1e-3;
  int kmeans_iters = 10;
};

struct FusionConfig {
  int gmm_components = 64;
  int svm_degree = 7;
  double svm_gamma = 0.0;  // 0 -> 1/D
  double svm_coef0 = 1.0;
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  ClassPartition multinomial_partition = ClassPartition::kBinary;
  double linear_prior = 0.5;
};

struct PathsConfig {
  std::string train_protocol;
  std::string train_audio;
  std::string eval_protocol;
  std::string eval_audio;
};

/// Everything an experiment needs. Unknown keys and wrongly typed values
/// are rejected before any work starts.
struct ExperimentConfig {
  FrontendConfig frontend = FrontendConfig::HighResolution();
  GmmConfig gmm;
  GridConfig grid;
  FusionConfig fusion;
  TdcfCosts costs;
  uint64_t seed = 0;
  PathsConfig paths;

  static ExperimentConfig FromJson(const nlohmann::json &j);
  static ExperimentConfig Load(const std::string &path);
  nlohmann::json ToJson() const;
  /// Hash of the canonical JSON dump.
  std::string Hash() const;
  /// Range checks beyond typing (frontend invariants at 16 kHz are checked
  /// when audio is seen).
  void Validate() const;

  CmOptions MakeCmOptions(int jobs) const;
  GmmFusionOptions MakeGmmFusionOptions() const;
  SvmFusionOptions MakeSvmFusionOptions() const;
  MultinomialOptions MakeMultinomialOptions() const;
  LinearFusionOptions MakeLinearFusionOptions() const;
  BandGrid MakeGrid() const;
};

SynthSpec SynthSpecFromJson(const nlohmann::json &j);
nlohmann::json SynthSpecToJson(const SynthSpec &spec);
ScenarioSpec ScenarioSpecFromJson(const nlohmann::json &j);
nlohmann::json ScenarioSpecToJson(const ScenarioSpec &spec);

nlohmann::json LoadJsonFile(const std::string &path);

}  // namespace sbcm

#endif  // SBCM_CONFIG_H_
