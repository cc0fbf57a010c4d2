// sbcm/subband.cc

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

#include "sbcm/subband.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace sbcm {

namespace {

constexpr int kMinCellFilters = 10;

std::vector<Matrix> Features(const SpectralSet &set, const LfccExtractor &ex,
                             const std::vector<size_t> &which) {
  std::vector<Matrix> out;
  out.reserve(which.size());
  for (size_t i : which) out.push_back(ex.FromPowerSpectrum(set.spectra[i]));
  return out;
}

double ParseNumber(const std::string &tok, const std::string &where) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != tok.size()) throw IoError(where + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

BandGrid BandGrid::Uniform(double lo, double hi, int n, double min_width) {
  if (n < 1 || !(hi >= lo)) throw ConfigError("band grid: need n >= 1 and hi >= lo");
  BandGrid g;
  g.min_width = min_width;
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    g.cut_in.push_back(f);
    g.cut_off.push_back(f);
  }
  return g;
}

void BandGrid::Validate() const {
  if (cut_in.empty() || cut_off.empty()) throw ConfigError("band grid: empty candidate list");
  if (!std::is_sorted(cut_in.begin(), cut_in.end()) ||
      !std::is_sorted(cut_off.begin(), cut_off.end()))
    throw ConfigError("band grid: candidates must be ascending");
  if (!(min_width > 0.0)) throw ConfigError("band grid: minimum width must be positive");
  if (cut_off.back() - cut_in.front() < min_width)
    throw ConfigError("band grid: no cell is as wide as the minimum width");
}

std::vector<std::pair<double, double>> BandGrid::ValidCells() const {
  std::vector<std::pair<double, double>> cells;
  for (double lo : cut_in)
    for (double hi : cut_off)
      if (IsValid(lo, hi)) cells.emplace_back(lo, hi);
  return cells;
}

const HeatCell &HeatMap::MinCell() const {
  if (cells.empty()) throw DataError("heat-map: no evaluated cells");
  return *std::min_element(cells.begin(), cells.end(),
                           [](const HeatCell &a, const HeatCell &b) { return a.value < b.value; });
}

void HeatMap::WriteTsv(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "f_min\tf_max\tmin_tdcf\n";
  for (const auto &c : cells)
    os << FormatDouble(c.f_min) << '\t' << FormatDouble(c.f_max) << '\t' << FormatDouble(c.value)
       << '\n';
  if (!os) throw IoError("write failed: " + path);
}

HeatMap HeatMap::ReadTsv(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != "f_min\tf_max\tmin_tdcf")
    throw IoError(path + ": missing heat-map header");
  HeatMap hm;
  std::set<double> lo, hi;
  for (int line_no = 2; std::getline(is, line); ++line_no) {
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::istringstream ls(line);
    std::string a, b, c, extra;
    if (!(ls >> a >> b >> c) || (ls >> extra)) throw IoError(where + ": expected 3 fields");
    HeatCell cell{ParseNumber(a, where), ParseNumber(b, where), ParseNumber(c, where)};
    if (!(cell.value >= 0.0)) throw IoError(where + ": negative min t-DCF");
    hm.cells.push_back(cell);
    lo.insert(cell.f_min);
    hi.insert(cell.f_max);
  }
  hm.grid.cut_in.assign(lo.begin(), lo.end());
  hm.grid.cut_off.assign(hi.begin(), hi.end());
  double width = std::numeric_limits<double>::infinity();
  for (const auto &c : hm.cells) width = std::min(width, c.f_max - c.f_min);
  hm.grid.min_width = hm.cells.empty() ? 0.0 : width;
  return hm;
}

void ComResult::Write(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "f_min_com " << FormatDouble(f_min_band) << '\n'
     << "f_max_com " << FormatDouble(f_max_band) << '\n'
     << "f_min_unsnapped " << FormatDouble(f_min_com) << '\n'
     << "f_max_unsnapped " << FormatDouble(f_max_com) << '\n'
     << "epsilon " << FormatDouble(epsilon) << '\n'
     << "M " << FormatDouble(total_mass) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

ComResult ComResult::Read(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::map<std::string, double> kv;
  std::string key, value;
  while (is >> key >> value) kv[key] = ParseNumber(value, path);
  auto get = [&](const char *k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw IoError(path + ": missing key " + k);
    return it->second;
  };
  return {get("f_min_unsnapped"), get("f_max_unsnapped"), get("f_min_com"), get("f_max_com"),
          get("M"), get("epsilon")};
}

ComResult CenterOfMass(const HeatMap &hm, double epsilon, int sample_rate, int n_fft) {
  if (hm.cells.empty()) throw DataError("centre of mass: empty heat-map");
  if (!(epsilon > 0.0)) throw ConfigError("centre of mass: epsilon must be positive");
  double mass = 0.0, lo = 0.0, hi = 0.0;
  for (const auto &c : hm.cells) {
    const double m = 1.0 / std::max(c.value, epsilon);
    mass += m;
    lo += m * c.f_min;
    hi += m * c.f_max;
  }
  ComResult r;
  r.f_min_com = lo / mass;
  r.f_max_com = hi / mass;
  r.f_min_band = SnapToBin(r.f_min_com, sample_rate, n_fft);
  r.f_max_band = SnapToBin(r.f_max_com, sample_rate, n_fft);
  r.total_mass = mass;
  r.epsilon = epsilon;
  return r;
}

std::pair<double, double> ComplementaryBand(double f_min, double f_max, double lo, double hi) {
  if (f_min - lo >= hi - f_max) return {lo, f_min};
  return {f_max, hi};
}

std::vector<Utterance> LoadUtterances(const std::vector<Trial> &trials, const std::string &audio_dir,
                                      int jobs) {
  std::vector<Utterance> out(trials.size());
  ParallelFor(trials.size(), jobs, [&](size_t i) {
    out[i].trial = trials[i];
    out[i].wave =
        ReadWav((std::filesystem::path(audio_dir) / (trials[i].utterance_id + ".wav")).string());
  });
  return out;
}

SpectralSet SpectralSet::Compute(const std::vector<Utterance> &utts, const FrontendConfig &cfg,
                                 int jobs) {
  if (utts.empty()) throw DataError("spectral set: no utterances");
  SpectralSet set;
  set.sample_rate = utts.front().wave.sample_rate;
  cfg.Validate(set.sample_rate);
  set.window_ms = cfg.window_ms;
  set.hop_ms = cfg.hop_ms;
  set.n_fft = cfg.n_fft;
  set.trials.resize(utts.size());
  set.spectra.resize(utts.size());
  ParallelFor(utts.size(), jobs, [&](size_t i) {
    if (utts[i].wave.sample_rate != set.sample_rate)
      throw ConfigError("spectral set: mixed sample rates");
    set.trials[i] = utts[i].trial;
    set.spectra[i] = PowerSpectrum(FrameSignal(utts[i].wave, cfg), cfg.n_fft);
  });
  return set;
}

FrontendConfig CellConfig(const FrontendConfig &tmpl, double f_min, double f_max, int sample_rate) {
  FrontendConfig cfg = tmpl;
  cfg.f_min = f_min;
  cfg.f_max = f_max;
  const double full = tmpl.f_max - tmpl.f_min;
  const double share = (f_max - f_min) / full;
  cfg.n_filters = std::max(kMinCellFilters, static_cast<int>(std::lround(tmpl.n_filters * share)));
  if (share >= 1.0) cfg.n_filters = tmpl.n_filters;
  cfg.n_ceps = std::min(tmpl.n_ceps, cfg.n_filters);
  cfg.Validate(sample_rate);
  return cfg;
}

CmPair TrainCm(const SpectralSet &train, const FrontendConfig &cfg, const CmOptions &opts,
               const std::optional<std::string> &attack_id) {
  if (!train.Compatible(cfg)) throw ConfigError("train cm: spectra were computed with other framing");
  const LfccExtractor ex(cfg, train.sample_rate);
  std::vector<size_t> bona, spoof;
  for (size_t i = 0; i < train.trials.size(); ++i) {
    const Trial &t = train.trials[i];
    if (t.bonafide)
      bona.push_back(i);
    else if (!attack_id || attack_id->empty() || t.attack_id == *attack_id)
      spoof.push_back(i);
  }
  if (bona.empty()) throw DataError("train cm: no bona fide training trials");
  if (spoof.empty())
    throw DataError("train cm: no spoof training trials" +
                    (attack_id && !attack_id->empty() ? " for attack " + *attack_id : std::string()));
  return TrainCmPair(Features(train, ex, bona), Features(train, ex, spoof), opts.num_components,
                     opts.em, cfg.Hash());
}

std::vector<ScoreRecord> ScoreCm(const CmPair &cm, const SpectralSet &set, const FrontendConfig &cfg) {
  if (cm.config_hash != cfg.Hash())
    throw ConfigError("score cm: model was trained with a different front-end configuration");
  if (!set.Compatible(cfg)) throw ConfigError("score cm: spectra were computed with other framing");
  const LfccExtractor ex(cfg, set.sample_rate);
  std::vector<ScoreRecord> out;
  out.reserve(set.trials.size());
  for (size_t i = 0; i < set.trials.size(); ++i) {
    const Trial &t = set.trials[i];
    out.push_back({t.utterance_id, t.attack_id, t.bonafide,
                   LlrScore(cm, ex.FromPowerSpectrum(set.spectra[i]))});
  }
  return out;
}

double EvaluateBand(const SpectralSet &train, const SpectralSet &eval, const FrontendConfig &cfg,
                    const std::string &attack_id, const CmOptions &opts) {
  const CmPair cm = TrainCm(train, cfg, opts, attack_id);
  const auto scores = ScoreCm(cm, eval, cfg);
  const LabeledScores labeled = attack_id.empty() ? ToLabeled(scores) : ToLabeled(scores, attack_id);
  return MinTdcf(labeled, opts.costs).value;
}

HeatMap BuildHeatMap(const BandGrid &grid, const std::string &attack_id, const SpectralSet &train,
                     const SpectralSet &eval, const FrontendConfig &tmpl, const CmOptions &opts) {
  grid.Validate();
  const auto cells = grid.ValidCells();
  std::vector<std::optional<double>> values(cells.size());
  std::vector<std::string> errors(cells.size());
  CmOptions cell_opts = opts;
  cell_opts.em.jobs = 1;
  ParallelFor(cells.size(), opts.jobs, [&](size_t i) {
    try {
      const FrontendConfig cfg = CellConfig(tmpl, cells[i].first, cells[i].second, train.sample_rate);
      values[i] = EvaluateBand(train, eval, cfg, attack_id, cell_opts);
    } catch (const Error &e) {
      errors[i] = e.what();
    }
  });
  HeatMap hm;
  hm.grid = grid;
  hm.attack_id = attack_id;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (values[i])
      hm.cells.push_back({cells[i].first, cells[i].second, *values[i]});
    else
      hm.failed.push_back({cells[i], errors[i]});
  }
  return hm;
}

std::vector<SweepRow> ResolutionSweep(const std::vector<int> &filter_counts,
                                      const std::vector<Utterance> &train,
                                      const std::vector<Utterance> &dev, const FrontendConfig &tmpl,
                                      const CmOptions &opts) {
  const SpectralSet train_set = SpectralSet::Compute(train, tmpl, opts.jobs);
  const SpectralSet dev_set = SpectralSet::Compute(dev, tmpl, opts.jobs);
  std::vector<SweepRow> rows(filter_counts.size());
  CmOptions row_opts = opts;
  row_opts.em.jobs = 1;
  ParallelFor(filter_counts.size(), opts.jobs, [&](size_t i) {
    SweepRow &row = rows[i];
    row.n_filters = filter_counts[i];
    try {
      FrontendConfig cfg = tmpl;
      cfg.n_filters = filter_counts[i];
      cfg.n_ceps = std::min(tmpl.n_ceps, cfg.n_filters);
      const CmPair cm = TrainCm(train_set, cfg, row_opts);
      const LabeledScores labeled = ToLabeled(ScoreCm(cm, dev_set, cfg));
      row.min_tdcf = MinTdcf(labeled, opts.costs).value;
      row.eer = Eer(labeled);
      row.gaussians = FitScoreGaussians(labeled);
      row.bhattacharyya = Bhattacharyya(row.gaussians.mu_b, row.gaussians.sigma_b,
                                        row.gaussians.mu_s, row.gaussians.sigma_s);
    } catch (const Error &e) {
      row.error = e.what();
    }
  });
  return rows;
}

void WriteSweepTsv(const std::string &path, const std::vector<SweepRow> &rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "n_filters\tmin_tdcf\teer_percent\tbhattacharyya\tmu_b\tsigma_b\tmu_s\tsigma_s\terror\n";
  for (const auto &r : rows) {
    if (!r.error.empty()) {
      os << r.n_filters << "\tnan\tnan\tnan\tnan\tnan\tnan\tnan\t" << r.error << '\n';
      continue;
    }
    os << r.n_filters << '\t' << FormatDouble(r.min_tdcf) << '\t' << FormatDouble(100.0 * r.eer)
       << '\t' << FormatDouble(r.bhattacharyya) << '\t' << FormatDouble(r.gaussians.mu_b) << '\t'
       << FormatDouble(r.gaussians.sigma_b) << '\t' << FormatDouble(r.gaussians.mu_s) << '\t'
       << FormatDouble(r.gaussians.sigma_s) << "\t-\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace sbcm
