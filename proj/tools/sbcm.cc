// tools/sbcm.cc

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

// Command-line driver for sub-band countermeasure experiments.
//
//   sbcm synth      --spec synth.json --out-dir corpus/
//   sbcm extract    --protocol p.txt --audio-dir wav/ --cache-dir feats/ [--com com.txt]
//   sbcm train      --protocol p.txt --cache-dir feats/ --out cm.txt
//   sbcm score      --cm cm.txt --protocol p.txt --cache-dir feats/ --out scores.txt
//   sbcm sweep      --filters 20,30,50,70 --out sweep.tsv
//   sbcm heatmap    --attack A01 --out heatmap.tsv
//   sbcm com        --heatmap heatmap.tsv --out com.txt
//   sbcm fuse-train --kind gmm --scores a.txt --scores b.txt --protocol p.txt --out fusion.txt
//   sbcm fuse-apply --model fusion.txt --scores a.txt --scores b.txt --out fused.txt
//   sbcm evaluate   --scores fused.txt --protocol p.txt
//   sbcm scenario   --out-dir scenario/
//
// Every command accepts --config, --seed and --jobs. Each output file gets a
// sidecar "<output>.config.json" holding the resolved settings and their
// hash. Exit status: 0 success, 1 usage or configuration error, 2 any other
// failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbcm/config.h"
#include "sbcm/corpus.h"
#include "sbcm/feature_cache.h"
#include "sbcm/frontend.h"
#include "sbcm/fusion.h"
#include "sbcm/gmm.h"
#include "sbcm/metrics.h"
#include "sbcm/subband.h"
#include "sbcm/wav.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sbcm {
namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  int jobs = 1;
};

ExperimentConfig ResolveConfig(const GlobalOptions &g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::Load(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  cfg.Validate();
  return cfg;
}

// Writes the resolved settings next to an output. Deterministic: no clocks,
// no absolute paths beyond what the caller passed in.
void WriteSidecar(const std::string &output, const std::string &command, json settings) {
  json doc;
  doc["command"] = command;
  doc["settings"] = std::move(settings);
  doc["config_hash"] = HexHash(Fnv1a64(doc["settings"].dump()));
  const std::string path = output + ".config.json";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << doc.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

std::string CachePath(const std::string &dir, const std::string &utt) {
  return (fs::path(dir) / (utt + ".feat")).string();
}

void EnsureParent(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<Matrix> LoadCached(const std::vector<Trial> &trials, const std::string &cache_dir,
                               const std::string &want_hash, int jobs) {
  std::vector<Matrix> out(trials.size());
  ParallelFor(trials.size(), jobs, [&](size_t i) {
    CachedFeatures c = ReadFeatureCache(CachePath(cache_dir, trials[i].utterance_id));
    if (c.config_hash != want_hash)
      throw ConfigError("feature cache for " + trials[i].utterance_id +
                        " was extracted with a different front-end configuration");
    out[i] = std::move(c.feats);
  });
  return out;
}

// Front-end settings of the cache, as recorded by `extract`.
FrontendConfig CacheFrontend(const std::string &cache_dir) {
  const json doc = LoadJsonFile((fs::path(cache_dir) / "cache.config.json").string());
  return ExperimentConfig::FromJson(doc.at("settings")).frontend;
}

// ---------------------------------------------------------------- commands

int CmdSynth(const GlobalOptions &g, const std::string &spec_path, const std::string &out_dir) {
  SynthSpec spec = SynthSpecFromJson(LoadJsonFile(spec_path));
  if (g.seed) spec.seed = *g.seed;
  const SynthResult r = SynthCorpus(spec, out_dir, g.jobs);
  WriteSidecar((fs::path(out_dir) / "corpus").string(), "synth", SynthSpecToJson(spec));
  std::cerr << "synth: wrote " << r.trials.size() << " utterances to " << out_dir << '\n';
  return 0;
}

// "lo,hi" in Hz.
std::pair<double, double> ParseBand(const std::string &s) {
  double lo = 0, hi = 0;
  char comma = 0;
  std::istringstream is(s);
  if (!(is >> lo >> comma >> hi) || comma != ',' || !(is >> std::ws).eof())
    throw ConfigError("--band: expected LO,HI in Hz, got '" + s + "'");
  return {lo, hi};
}

int CmdExtract(const GlobalOptions &g, const std::string &protocol, const std::string &audio_dir,
               const std::string &cache_dir, const std::string &com_path, const std::string &band) {
  ExperimentConfig cfg = ResolveConfig(g);
  const auto trials = ReadProtocol(protocol);
  if (trials.empty()) throw DataError("extract: empty protocol " + protocol);
  // The extractor depends on the sample rate, so build it from the first file.
  const Waveform first = ReadWav((fs::path(audio_dir) / (trials.front().utterance_id + ".wav")).string());
  if (!com_path.empty()) {
    const ComResult com = ComResult::Read(com_path);
    cfg.frontend = CellConfig(cfg.frontend, com.f_min_band, com.f_max_band, first.sample_rate);
  } else if (!band.empty()) {
    const auto [lo, hi] = ParseBand(band);
    cfg.frontend = CellConfig(cfg.frontend, lo, hi, first.sample_rate);
  }
  fs::create_directories(cache_dir);
  const std::string hash = cfg.frontend.Hash();
  std::optional<LfccExtractor> ex;
  cfg.frontend.Validate(first.sample_rate);
  ex.emplace(cfg.frontend, first.sample_rate);
  ParallelFor(trials.size(), g.jobs, [&](size_t i) {
    const Waveform w = ReadWav((fs::path(audio_dir) / (trials[i].utterance_id + ".wav")).string());
    if (w.sample_rate != first.sample_rate)
      throw ConfigError("extract: mixed sample rates in " + audio_dir);
    WriteFeatureCache(CachePath(cache_dir, trials[i].utterance_id), ex->Extract(w), hash);
  });
  WriteSidecar((fs::path(cache_dir) / "cache").string(), "extract", cfg.ToJson());
  std::cerr << "extract: " << trials.size() << " utterances, " << cfg.frontend.Dims()
            << " dims, front-end " << hash << '\n';
  return 0;
}

int CmdTrain(const GlobalOptions &g, const std::string &protocol, const std::string &cache_dir,
             const std::string &attack, const std::string &out) {
  ExperimentConfig cfg = ResolveConfig(g);
  cfg.frontend = CacheFrontend(cache_dir);
  const auto trials = ReadProtocol(protocol);
  std::vector<Trial> bona, spoof;
  for (const auto &t : trials) {
    if (t.bonafide)
      bona.push_back(t);
    else if (attack.empty() || t.attack_id == attack)
      spoof.push_back(t);
  }
  if (bona.empty() || spoof.empty()) throw DataError("train: need both bona fide and spoof trials");
  const std::string hash = cfg.frontend.Hash();
  const CmOptions opts = cfg.MakeCmOptions(g.jobs);
  const CmPair cm = TrainCmPair(LoadCached(bona, cache_dir, hash, g.jobs),
                                LoadCached(spoof, cache_dir, hash, g.jobs), opts.num_components,
                                opts.em, hash);
  EnsureParent(out);
  cm.Write(out);
  json settings = cfg.ToJson();
  settings["attack"] = attack;
  WriteSidecar(out, "train", settings);
  return 0;
}

int CmdScore(const GlobalOptions &g, const std::string &cm_path, const std::string &protocol,
             const std::string &cache_dir, const std::string &out) {
  const CmPair cm = CmPair::Read(cm_path);
  const auto trials = ReadProtocol(protocol);
  const auto feats = LoadCached(trials, cache_dir, cm.config_hash, g.jobs);
  std::vector<ScoreRecord> scores(trials.size());
  ParallelFor(trials.size(), g.jobs, [&](size_t i) {
    scores[i] = {trials[i].utterance_id, trials[i].attack_id, trials[i].bonafide,
                 LlrScore(cm, feats[i])};
  });
  EnsureParent(out);
  WriteScores(out, scores);
  WriteSidecar(out, "score", {{"cm", cm_path}, {"frontend_hash", cm.config_hash}});
  return 0;
}

std::pair<std::vector<Utterance>, std::vector<Utterance>> LoadTrainEval(const ExperimentConfig &cfg,
                                                                        int jobs) {
  const auto &p = cfg.paths;
  if (p.train_protocol.empty() || p.train_audio.empty() || p.eval_protocol.empty() ||
      p.eval_audio.empty())
    throw ConfigError("paths.train_protocol/train_audio/eval_protocol/eval_audio must be set");
  return {LoadUtterances(ReadProtocol(p.train_protocol), p.train_audio, jobs),
          LoadUtterances(ReadProtocol(p.eval_protocol), p.eval_audio, jobs)};
}

int CmdSweep(const GlobalOptions &g, const std::vector<int> &filters, const std::string &out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  if (filters.empty()) throw ConfigError("sweep: --filters is empty");
  const auto [train, eval] = LoadTrainEval(cfg, g.jobs);
  const auto rows = ResolutionSweep(filters, train, eval, cfg.frontend, cfg.MakeCmOptions(g.jobs));
  EnsureParent(out);
  WriteSweepTsv(out, rows);
  json settings = cfg.ToJson();
  settings["filters"] = filters;
  WriteSidecar(out, "sweep", settings);
  int failed = 0;
  for (const auto &r : rows)
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "sweep: N=" << r.n_filters << " failed: " << r.error << '\n';
    }
  return failed == static_cast<int>(rows.size()) ? 2 : 0;
}

int CmdHeatmap(const GlobalOptions &g, const std::string &attack, const std::string &out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  const BandGrid grid = cfg.MakeGrid();
  grid.Validate();
  const auto [train, eval] = LoadTrainEval(cfg, g.jobs);
  const SpectralSet train_set = SpectralSet::Compute(train, cfg.frontend, g.jobs);
  const SpectralSet eval_set = SpectralSet::Compute(eval, cfg.frontend, g.jobs);
  const HeatMap hm =
      BuildHeatMap(grid, attack, train_set, eval_set, cfg.frontend, cfg.MakeCmOptions(g.jobs));
  for (const auto &[cell, why] : hm.failed)
    std::cerr << "heatmap: cell [" << cell.first << ", " << cell.second << "] failed: " << why << '\n';
  if (hm.cells.empty()) throw DataError("heatmap: every cell failed");
  EnsureParent(out);
  hm.WriteTsv(out);
  json settings = cfg.ToJson();
  settings["attack"] = attack;
  WriteSidecar(out, "heatmap", settings);
  const HeatCell &best = hm.MinCell();
  std::cerr << "heatmap: " << hm.cells.size() << " cells, best [" << best.f_min << ", "
            << best.f_max << "] min t-DCF " << best.value << '\n';
  return 0;
}

int CmdCom(const GlobalOptions &g, const std::string &heatmap, std::optional<double> epsilon,
           int sample_rate, const std::string &out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  const double eps = epsilon.value_or(cfg.grid.epsilon);
  const HeatMap hm = HeatMap::ReadTsv(heatmap);
  const ComResult r = CenterOfMass(hm, eps, sample_rate, cfg.frontend.n_fft);
  EnsureParent(out);
  r.Write(out);
  WriteSidecar(out, "com", {{"heatmap", heatmap},
                                  {"epsilon", eps},
                                  {"sample_rate", sample_rate},
                                  {"n_fft", cfg.frontend.n_fft}});
  std::cout << "band\t" << FormatDouble(r.f_min_band) << '\t' << FormatDouble(r.f_max_band) << '\n';
  return 0;
}

ScoreVectorSet LoadScoreSet(const std::vector<std::string> &paths) {
  std::vector<std::vector<ScoreRecord>> files;
  for (const auto &p : paths) files.push_back(ReadScores(p));
  return AlignScoreFiles(files);
}

// Replaces labels with the protocol's and checks that the two agree.
void CheckAgainstProtocol(const ScoreVectorSet &set, const std::vector<Trial> &protocol) {
  std::map<std::string, const Trial *> by_id;
  for (const auto &t : protocol) by_id[t.utterance_id] = &t;
  if (by_id.size() != set.size())
    throw DataError("score files cover " + std::to_string(set.size()) + " trials, protocol has " +
                    std::to_string(by_id.size()));
  for (const auto &e : set.trials) {
    auto it = by_id.find(e.utterance_id);
    if (it == by_id.end()) throw DataError("utterance " + e.utterance_id + " is not in the protocol");
    if (it->second->bonafide != e.bonafide || it->second->attack_id != e.attack_id)
      throw DataError("utterance " + e.utterance_id + ": score file and protocol labels differ");
  }
}

int CmdFuseTrain(const GlobalOptions &g, const std::string &kind_name,
                 const std::vector<std::string> &score_paths, const std::string &protocol,
                 const std::string &out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  const FusionKind kind = ParseFusionKind(kind_name);
  const ScoreVectorSet set = LoadScoreSet(score_paths);
  if (!protocol.empty()) CheckAgainstProtocol(set, ReadProtocol(protocol));
  std::optional<FusionModel> model;
  switch (kind) {
    case FusionKind::kLinear: model = TrainLinearFusion(set, cfg.MakeLinearFusionOptions()); break;
    case FusionKind::kMultinomial:
      model = TrainMultinomialFusion(set, cfg.MakeMultinomialOptions());
      break;
    case FusionKind::kGmm: model = TrainGmmFusion(set, cfg.MakeGmmFusionOptions()); break;
    case FusionKind::kSvmPoly: model = TrainSvmFusion(set, cfg.MakeSvmFusionOptions()); break;
  }
  EnsureParent(out);
  model->Write(out);
  json settings = cfg.ToJson();
  settings["kind"] = FusionKindName(kind);
  settings["scores"] = score_paths;
  WriteSidecar(out, "fuse-train", settings);
  return 0;
}

int CmdFuseApply(const GlobalOptions &, const std::string &model_path,
                 const std::vector<std::string> &score_paths, const std::string &out) {
  const FusionModel model = FusionModel::Read(model_path);
  const ScoreVectorSet set = LoadScoreSet(score_paths);
  if (set.Dim() != model.Dim())
    throw DimensionError("fuse-apply: model expects " + std::to_string(model.Dim()) +
                         " score files, got " + std::to_string(set.Dim()));
  EnsureParent(out);
  WriteScores(out, model.Fuse(set));
  WriteSidecar(out, "fuse-apply", {{"model", model_path}, {"scores", score_paths}});
  return 0;
}

int CmdEvaluate(const GlobalOptions &g, const std::string &scores_path, const std::string &protocol,
                std::optional<double> c1, std::optional<double> c2, const std::string &out) {
  const ExperimentConfig cfg = ResolveConfig(g);
  TdcfCosts costs = cfg.costs;
  if (c1) costs.c1 = *c1;
  if (c2) costs.c2 = *c2;
  costs.Validate();
  auto scores = ReadScores(scores_path);
  if (!protocol.empty()) {
    ScoreVectorSet one = AlignScoreFiles({scores});
    CheckAgainstProtocol(one, ReadProtocol(protocol));
  }
  std::set<std::string> attacks;
  for (const auto &r : scores)
    if (!r.bonafide) attacks.insert(r.attack_id);

  std::ostringstream report;
  report << "subset\tn_bona\tn_spoof\teer_percent\tmin_tdcf\tthreshold\n";
  auto row = [&](const std::string &name, const LabeledScores &ls) {
    const TdcfResult t = MinTdcf(ls, costs);
    report << name << '\t' << ls.bona.size() << '\t' << ls.spoof.size() << '\t'
           << FormatDouble(100.0 * Eer(ls)) << '\t' << FormatDouble(t.value) << '\t'
           << FormatDouble(t.threshold) << '\n';
  };
  row("pooled", ToLabeled(scores));
  // Bona fide trials are shared by every per-attack row.
  for (const auto &a : attacks) row(a, ToLabeled(scores, a));

  std::cout << report.str();
  if (!out.empty()) {
    EnsureParent(out);
    std::ofstream os(out);
    if (!os) throw IoError("cannot write " + out);
    os << report.str();
    if (!os) throw IoError("write failed: " + out);
    WriteSidecar(out, "evaluate", {{"scores", scores_path}, {"c1", costs.c1}, {"c2", costs.c2}});
  }
  return 0;
}

int CmdScenario(const GlobalOptions &g, const std::string &spec_path, const std::string &out_dir) {
  ScenarioSpec spec =
      spec_path.empty() ? ScenarioSpec::Default() : ScenarioSpecFromJson(LoadJsonFile(spec_path));
  if (g.seed) spec.seed = *g.seed;
  spec.Validate();
  const ScoreVectorSet set = SynthScenario(spec);
  fs::create_directories(out_dir);
  std::vector<Trial> protocol;
  for (const auto &e : set.trials)
    protocol.push_back({"SCN", e.utterance_id, e.attack_id, e.bonafide});
  WriteProtocol((fs::path(out_dir) / "protocol.txt").string(), protocol);
  for (int k = 0; k < set.Dim(); ++k) {
    std::vector<ScoreRecord> recs;
    for (const auto &e : set.trials) recs.push_back({e.utterance_id, e.attack_id, e.bonafide, e.scores[k]});
    WriteScores((fs::path(out_dir) / ("cm" + std::to_string(k + 1) + ".txt")).string(), recs);
  }
  WriteSidecar((fs::path(out_dir) / "scenario").string(), "scenario", ScenarioSpecToJson(spec));
  return 0;
}

std::vector<int> ParseIntList(const std::string &s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception &) {
      throw ConfigError("not an integer list: " + s);
    }
  }
  return out;
}

int Main(int argc, char **argv) {
  CLI::App app{"Sub-band countermeasure experiments"};
  app.require_subcommand(1);
  GlobalOptions g;
  uint64_t seed = 0;
  app.add_option("--config", g.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  auto *seed_opt = app.add_option("--seed", seed, "top-level seed (overrides the config)");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string spec, out_dir, protocol, audio_dir, cache_dir, out, attack, cm, heatmap, kind, model,
      scores, filters, com_file, band;
  std::vector<std::string> score_list;
  std::optional<double> epsilon, c1, c2;
  int sample_rate = 16000;

  auto *synth = app.add_subcommand("synth", "generate a synthetic audio corpus");
  synth->add_option("--spec", spec, "synthesis spec (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out-dir", out_dir)->required();

  auto *extract = app.add_subcommand("extract", "compute and cache LFCC features");
  extract->add_option("--protocol", protocol)->required()->check(CLI::ExistingFile);
  extract->add_option("--audio-dir", audio_dir)->required()->check(CLI::ExistingDirectory);
  extract->add_option("--cache-dir", cache_dir)->required();
  auto *com_opt = extract->add_option("--com", com_file, "restrict the filterbank to a CoM report's band")
                      ->check(CLI::ExistingFile);
  extract->add_option("--band", band, "restrict the filterbank to LO,HI Hz")->excludes(com_opt);

  auto *train = app.add_subcommand("train", "train a bona fide / spoof GMM pair");
  train->add_option("--protocol", protocol)->required()->check(CLI::ExistingFile);
  train->add_option("--cache-dir", cache_dir)->required()->check(CLI::ExistingDirectory);
  train->add_option("--attack", attack, "train the spoof model on this attack only");
  train->add_option("--out", out)->required();

  auto *score = app.add_subcommand("score", "score trials with a trained countermeasure");
  score->add_option("--cm", cm)->required()->check(CLI::ExistingFile);
  score->add_option("--protocol", protocol)->required()->check(CLI::ExistingFile);
  score->add_option("--cache-dir", cache_dir)->required()->check(CLI::ExistingDirectory);
  score->add_option("--out", out)->required();

  auto *sweep = app.add_subcommand("sweep", "full-band CMs over several filter counts");
  sweep->add_option("--filters", filters, "comma-separated filter counts")->required();
  sweep->add_option("--out", out)->required();

  auto *hmap = app.add_subcommand("heatmap", "min t-DCF over a grid of sub-bands");
  hmap->add_option("--attack", attack, "attack id; empty pools all attacks")->required();
  hmap->add_option("--out", out)->required();

  auto *com = app.add_subcommand("com", "centre of mass of a heat-map");
  com->add_option("--heatmap", heatmap)->required()->check(CLI::ExistingFile);
  com->add_option("--epsilon", epsilon);
  com->add_option("--sample-rate", sample_rate, "for snapping the band to FFT bins");
  com->add_option("--out", out)->required();

  auto *ftrain = app.add_subcommand("fuse-train", "train a score fusion model");
  ftrain->add_option("--kind", kind, "linear, multinomial, gmm or svm-poly")->required();
  ftrain->add_option("--scores", score_list, "score files, one per subsystem")->required();
  ftrain->add_option("--protocol", protocol)->check(CLI::ExistingFile);
  ftrain->add_option("--out", out)->required();

  auto *fapply = app.add_subcommand("fuse-apply", "fuse score files with a trained model");
  fapply->add_option("--model", model)->required()->check(CLI::ExistingFile);
  fapply->add_option("--scores", score_list)->required();
  fapply->add_option("--out", out)->required();

  auto *evaluate = app.add_subcommand("evaluate", "EER and min t-DCF, pooled and per attack");
  evaluate->add_option("--scores", scores)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--protocol", protocol)->check(CLI::ExistingFile);
  evaluate->add_option("--c1", c1);
  evaluate->add_option("--c2", c2);
  evaluate->add_option("--out", out);

  auto *scenario = app.add_subcommand("scenario", "two-CM score clusters for fusion studies");
  scenario->add_option("--spec", spec, "scenario spec (JSON); default layout if omitted")
      ->check(CLI::ExistingFile);
  scenario->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*synth) return CmdSynth(g, spec, out_dir);
    if (*extract) return CmdExtract(g, protocol, audio_dir, cache_dir, com_file, band);
    if (*train) return CmdTrain(g, protocol, cache_dir, attack, out);
    if (*score) return CmdScore(g, cm, protocol, cache_dir, out);
    if (*sweep) return CmdSweep(g, ParseIntList(filters), out);
    if (*hmap) return CmdHeatmap(g, attack, out);
    if (*com) return CmdCom(g, heatmap, epsilon, sample_rate, out);
    if (*ftrain) return CmdFuseTrain(g, kind, score_list, protocol, out);
    if (*fapply) return CmdFuseApply(g, model, score_list, out);
    if (*evaluate) return CmdEvaluate(g, scores, protocol, c1, c2, out);
    if (*scenario) return CmdScenario(g, spec, out_dir);
  } catch (const ConfigError &e) {
    std::cerr << "sbcm: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "sbcm: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace
}  // namespace sbcm

int main(int argc, char **argv) { return sbcm::Main(argc, argv); }
