// sbcm/config.cc

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

#include "sbcm/config.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace sbcm {

using nlohmann::json;

namespace {

// Reads the listed keys of one JSON object, rejecting anything else.
class Section {
 public:
  Section(const json &j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
  }
  ~Section() = default;

  template <typename T>
  void Get(const char *key, T *out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer() && !it->is_number_unsigned()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ConfigError("");
      }
      *out = it->get<T>();
    } catch (const std::exception &) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
  }

  const json *Child(const char *key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(name_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json &j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string PartitionName(ClassPartition p) {
  return p == ClassPartition::kBinary ? "binary" : "per-attack";
}

ClassPartition ParsePartition(const std::string &s) {
  if (s == "binary") return ClassPartition::kBinary;
  if (s == "per-attack") return ClassPartition::kPerAttack;
  throw ConfigError("fusion.multinomial_partition: expected 'binary' or 'per-attack'");
}

double ParseSnr(const json &v) {
  if (v.is_null()) return -std::numeric_limits<double>::infinity();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf" || s == "off") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("attack.snr_db: expected a number, null, \"-inf\" or \"off\"");
}

Vector JsonVector(const json &j, const std::string &what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

json LoadJsonFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig ExperimentConfig::FromJson(const json &j) {
  ExperimentConfig cfg;
  Section top(j, "config");
  top.Get("seed", &cfg.seed);
  if (const json *f = top.Child("frontend")) {
    Section s(*f, "frontend");
    s.Get("window_ms", &cfg.frontend.window_ms);
    s.Get("hop_ms", &cfg.frontend.hop_ms);
    s.Get("n_fft", &cfg.frontend.n_fft);
    s.Get("n_filters", &cfg.frontend.n_filters);
    s.Get("f_min", &cfg.frontend.f_min);
    s.Get("f_max", &cfg.frontend.f_max);
    s.Get("n_ceps", &cfg.frontend.n_ceps);
    s.Get("delta_context", &cfg.frontend.delta_context);
    s.Finish();
  }
  if (const json *g = top.Child("gmm")) {
    Section s(*g, "gmm");
    s.Get("components", &cfg.gmm.components);
    s.Get("max_iters", &cfg.gmm.max_iters);
    s.Get("tol", &cfg.gmm.tol);
    s.Get("var_floor_ratio", &cfg.gmm.var_floor_ratio);
    s.Get("kmeans_iters", &cfg.gmm.kmeans_iters);
    s.Finish();
  }
  if (const json *g = top.Child("grid")) {
    Section s(*g, "grid");
    s.Get("lo", &cfg.grid.lo);
    s.Get("hi", &cfg.grid.hi);
    s.Get("points", &cfg.grid.points);
    s.Get("min_width", &cfg.grid.min_width);
    s.Get("epsilon", &cfg.grid.epsilon);
    s.Finish();
  }
  if (const json *f = top.Child("fusion")) {
    Section s(*f, "fusion");
    s.Get("gmm_components", &cfg.fusion.gmm_components);
    s.Get("svm_degree", &cfg.fusion.svm_degree);
    s.Get("svm_gamma", &cfg.fusion.svm_gamma);
    s.Get("svm_coef0", &cfg.fusion.svm_coef0);
    s.Get("svm_c", &cfg.fusion.svm_c);
    s.Get("svm_tol", &cfg.fusion.svm_tol);
    s.Get("linear_prior", &cfg.fusion.linear_prior);
    std::string partition = PartitionName(cfg.fusion.multinomial_partition);
    s.Get("multinomial_partition", &partition);
    cfg.fusion.multinomial_partition = ParsePartition(partition);
    s.Finish();
  }
  if (const json *c = top.Child("costs")) {
    Section s(*c, "costs");
    s.Get("c1", &cfg.costs.c1);
    s.Get("c2", &cfg.costs.c2);
    s.Finish();
  }
  if (const json *p = top.Child("paths")) {
    Section s(*p, "paths");
    s.Get("train_protocol", &cfg.paths.train_protocol);
    s.Get("train_audio", &cfg.paths.train_audio);
    s.Get("eval_protocol", &cfg.paths.eval_protocol);
    s.Get("eval_audio", &cfg.paths.eval_audio);
    s.Finish();
  }
  top.Finish();
  cfg.Validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::Load(const std::string &path) {
  return FromJson(LoadJsonFile(path));
}

json ExperimentConfig::ToJson() const {
  return json{
      {"seed", seed},
      {"frontend",
       {{"window_ms", frontend.window_ms},
        {"hop_ms", frontend.hop_ms},
        {"n_fft", frontend.n_fft},
        {"n_filters", frontend.n_filters},
        {"f_min", frontend.f_min},
        {"f_max", frontend.f_max},
        {"n_ceps", frontend.n_ceps},
        {"delta_context", frontend.delta_context}}},
      {"gmm",
       {{"components", gmm.components},
        {"max_iters", gmm.max_iters},
        {"tol", gmm.tol},
        {"var_floor_ratio", gmm.var_floor_ratio},
        {"kmeans_iters", gmm.kmeans_iters}}},
      {"grid",
       {{"lo", grid.lo},
        {"hi", grid.hi},
        {"points", grid.points},
        {"min_width", grid.min_width},
        {"epsilon", grid.epsilon}}},
      {"fusion",
       {{"gmm_components", fusion.gmm_components},
        {"svm_degree", fusion.svm_degree},
        {"svm_gamma", fusion.svm_gamma},
        {"svm_coef0", fusion.svm_coef0},
        {"svm_c", fusion.svm_c},
        {"svm_tol", fusion.svm_tol},
        {"multinomial_partition", PartitionName(fusion.multinomial_partition)},
        {"linear_prior", fusion.linear_prior}}},
      {"costs", {{"c1", costs.c1}, {"c2", costs.c2}}},
      {"paths",
       {{"train_protocol", paths.train_protocol},
        {"train_audio", paths.train_audio},
        {"eval_protocol", paths.eval_protocol},
        {"eval_audio", paths.eval_audio}}},
  };
}

std::string ExperimentConfig::Hash() const { return HexHash(Fnv1a64(ToJson().dump())); }

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string &m) { throw ConfigError("config: " + m); };
  if (gmm.components < 1) fail("gmm.components must be >= 1");
  if (gmm.max_iters < 1) fail("gmm.max_iters must be >= 1");
  if (!(gmm.tol > 0.0)) fail("gmm.tol must be positive");
  if (!(gmm.var_floor_ratio > 0.0)) fail("gmm.var_floor_ratio must be positive");
  if (gmm.kmeans_iters < 0) fail("gmm.kmeans_iters must be >= 0");
  if (grid.points < 1 || !(grid.hi >= grid.lo) || !(grid.min_width > 0.0)) fail("bad grid");
  if (!(grid.epsilon > 0.0)) fail("grid.epsilon must be positive");
  if (fusion.gmm_components < 1) fail("fusion.gmm_components must be >= 1");
  if (fusion.svm_degree < 1) fail("fusion.svm_degree must be >= 1");
  if (!(fusion.svm_c > 0.0) || !(fusion.svm_tol > 0.0)) fail("fusion.svm_c and svm_tol must be positive");
  if (!(fusion.linear_prior > 0.0 && fusion.linear_prior < 1.0)) fail("fusion.linear_prior must be in (0, 1)");
  costs.Validate();
}

CmOptions ExperimentConfig::MakeCmOptions(int jobs) const {
  CmOptions o;
  o.num_components = gmm.components;
  o.em.max_iters = gmm.max_iters;
  o.em.tol = gmm.tol;
  o.em.var_floor_ratio = gmm.var_floor_ratio;
  o.em.kmeans_iters = gmm.kmeans_iters;
  o.em.seed = DeriveSeed(seed, "cm");
  o.em.jobs = jobs;
  o.costs = costs;
  o.jobs = jobs;
  return o;
}

GmmFusionOptions ExperimentConfig::MakeGmmFusionOptions() const {
  GmmFusionOptions o;
  o.num_components = fusion.gmm_components;
  o.em.max_iters = gmm.max_iters;
  o.em.tol = gmm.tol;
  o.em.var_floor_ratio = gmm.var_floor_ratio;
  o.em.kmeans_iters = gmm.kmeans_iters;
  o.em.seed = DeriveSeed(seed, "fusion");
  return o;
}

SvmFusionOptions ExperimentConfig::MakeSvmFusionOptions() const {
  SvmFusionOptions o;
  o.degree = fusion.svm_degree;
  o.gamma = fusion.svm_gamma;
  o.coef0 = fusion.svm_coef0;
  o.c = fusion.svm_c;
  o.tol = fusion.svm_tol;
  return o;
}

MultinomialOptions ExperimentConfig::MakeMultinomialOptions() const {
  MultinomialOptions o;
  o.partition = fusion.multinomial_partition;
  return o;
}

LinearFusionOptions ExperimentConfig::MakeLinearFusionOptions() const {
  LinearFusionOptions o;
  o.prior = fusion.linear_prior;
  return o;
}

BandGrid ExperimentConfig::MakeGrid() const {
  return BandGrid::Uniform(grid.lo, grid.hi, grid.points, grid.min_width);
}

SynthSpec SynthSpecFromJson(const json &j) {
  SynthSpec spec;
  Section top(j, "synth");
  top.Get("n_bona", &spec.n_bona);
  top.Get("duration_s", &spec.duration_s);
  top.Get("sample_rate", &spec.sample_rate);
  top.Get("seed", &spec.seed);
  top.Get("level_rms", &spec.level_rms);
  if (const json *attacks = top.Child("attacks")) {
    if (!attacks->is_array()) throw ConfigError("synth.attacks: expected an array");
    for (const auto &a : *attacks) {
      Section s(a, "synth.attacks[]");
      AttackSpec at;
      s.Get("id", &at.id);
      s.Get("count", &at.count);
      s.Get("f_lo", &at.f_lo);
      s.Get("f_hi", &at.f_hi);
      std::string type = "band-noise";
      s.Get("type", &type);
      if (type == "band-noise")
        at.type = ArtefactType::kBandNoise;
      else if (type == "band-notch")
        at.type = ArtefactType::kBandNotch;
      else
        throw ConfigError("synth.attacks[].type: expected 'band-noise' or 'band-notch'");
      if (const json *snr = s.Child("snr_db")) at.snr_db = ParseSnr(*snr);
      s.Finish();
      spec.attacks.push_back(at);
    }
  }
  top.Finish();
  spec.Validate();
  return spec;
}

json SynthSpecToJson(const SynthSpec &spec) {
  json attacks = json::array();
  for (const auto &a : spec.attacks) {
    json snr;
    if (std::isinf(a.snr_db))
      snr = a.snr_db < 0 ? "-inf" : "inf";
    else
      snr = a.snr_db;
    attacks.push_back({{"id", a.id},
                       {"count", a.count},
                       {"f_lo", a.f_lo},
                       {"f_hi", a.f_hi},
                       {"type", a.type == ArtefactType::kBandNoise ? "band-noise" : "band-notch"},
                       {"snr_db", snr}});
  }
  return json{{"n_bona", spec.n_bona},       {"duration_s", spec.duration_s},
              {"sample_rate", spec.sample_rate}, {"seed", spec.seed},
              {"level_rms", spec.level_rms}, {"attacks", attacks}};
}

ScenarioSpec ScenarioSpecFromJson(const json &j) {
  ScenarioSpec spec;
  Section top(j, "scenario");
  top.Get("seed", &spec.seed);
  if (const json *clusters = top.Child("clusters")) {
    if (!clusters->is_array()) throw ConfigError("scenario.clusters: expected an array");
    for (const auto &c : *clusters) {
      Section s(c, "scenario.clusters[]");
      ClusterSpec cl;
      s.Get("attack_id", &cl.attack_id);
      s.Get("count", &cl.count);
      const json *mean = s.Child("mean");
      const json *cov = s.Child("cov");
      s.Finish();
      if (!mean || !cov) throw ConfigError("scenario.clusters[]: mean and cov are required");
      cl.mean = JsonVector(*mean, "scenario.clusters[].mean");
      if (!cov->is_array()) throw ConfigError("scenario.clusters[].cov: expected rows");
      cl.cov.resize(static_cast<Eigen::Index>(cov->size()), cl.mean.size());
      for (size_t r = 0; r < cov->size(); ++r) {
        const Vector row = JsonVector((*cov)[r], "scenario.clusters[].cov");
        if (row.size() != cl.mean.size()) throw ConfigError("scenario.clusters[].cov: wrong shape");
        cl.cov.row(static_cast<Eigen::Index>(r)) = row.transpose();
      }
      spec.clusters.push_back(std::move(cl));
    }
  } else {
    const uint64_t seed = spec.seed;
    spec = ScenarioSpec::Default();
    spec.seed = seed;
  }
  top.Finish();
  spec.Validate();
  return spec;
}

json ScenarioSpecToJson(const ScenarioSpec &spec) {
  json clusters = json::array();
  for (const auto &c : spec.clusters) {
    json cov = json::array();
    for (Eigen::Index r = 0; r < c.cov.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index k = 0; k < c.cov.cols(); ++k) row.push_back(c.cov(r, k));
      cov.push_back(row);
    }
    json mean = json::array();
    for (Eigen::Index k = 0; k < c.mean.size(); ++k) mean.push_back(c.mean[k]);
    clusters.push_back({{"attack_id", c.attack_id}, {"count", c.count}, {"mean", mean}, {"cov", cov}});
  }
  return json{{"seed", spec.seed}, {"clusters", clusters}};
}

}  // namespace sbcm
