// sbcm/corpus.cc

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

#include "sbcm/corpus.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <unsupported/Eigen/FFT>

namespace sbcm {

namespace {

std::vector<std::string> SplitWs(const std::string &line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool IsBlank(const std::string &line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

bool ParseKey(const std::string &key, bool *bonafide) {
  if (key == kBonafideKey) {
    *bonafide = true;
    return true;
  }
  if (key == kSpoofKey) {
    *bonafide = false;
    return true;
  }
  return false;
}

const char *KeyName(bool bonafide) { return bonafide ? kBonafideKey : kSpoofKey; }

void CheckKeyAttack(bool bonafide, const std::string &attack, const std::string &where) {
  if (bonafide != (attack == kNoAttack))
    throw IoError(where + ": key '" + KeyName(bonafide) + "' is inconsistent with attack '" +
                  attack + "'");
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return is;
}

}  // namespace

std::vector<Trial> ParseProtocol(std::istream &is, const std::string &what) {
  std::vector<Trial> out;
  std::string line;
  for (int line_no = 1; std::getline(is, line); ++line_no) {
    if (IsBlank(line)) continue;
    const std::string where = what + ":" + std::to_string(line_no);
    const auto f = SplitWs(line);
    if (f.size() != 5) throw IoError(where + ": expected 5 fields, got " + std::to_string(f.size()));
    if (f[2] != "-") throw IoError(where + ": third field must be '-'");
    Trial t;
    t.speaker_id = f[0];
    t.utterance_id = f[1];
    t.attack_id = f[3];
    if (!ParseKey(f[4], &t.bonafide)) throw IoError(where + ": unknown key '" + f[4] + "'");
    CheckKeyAttack(t.bonafide, t.attack_id, where);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trial> ReadProtocol(const std::string &path) {
  auto is = OpenIn(path);
  return ParseProtocol(is, path);
}

void WriteProtocol(std::ostream &os, const std::vector<Trial> &trials) {
  for (const auto &t : trials) {
    CheckKeyAttack(t.bonafide, t.attack_id, "protocol entry " + t.utterance_id);
    os << t.speaker_id << ' ' << t.utterance_id << " - " << t.attack_id << ' '
       << KeyName(t.bonafide) << '\n';
  }
}

void WriteProtocol(const std::string &path, const std::vector<Trial> &trials) {
  auto os = OpenOut(path);
  WriteProtocol(os, trials);
}

std::vector<ScoreRecord> ParseScores(std::istream &is, const std::string &what) {
  std::vector<ScoreRecord> out;
  std::string line;
  for (int line_no = 1; std::getline(is, line); ++line_no) {
    if (IsBlank(line)) continue;
    const std::string where = what + ":" + std::to_string(line_no);
    const auto f = SplitWs(line);
    if (f.size() != 4) throw IoError(where + ": expected 4 fields, got " + std::to_string(f.size()));
    ScoreRecord r;
    r.utterance_id = f[0];
    r.attack_id = f[1];
    if (!ParseKey(f[2], &r.bonafide)) throw IoError(where + ": unknown key '" + f[2] + "'");
    CheckKeyAttack(r.bonafide, r.attack_id, where);
    size_t used = 0;
    try {
      r.score = std::stod(f[3], &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != f[3].size() || !std::isfinite(r.score))
      throw IoError(where + ": bad score '" + f[3] + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScoreRecord> ReadScores(const std::string &path) {
  auto is = OpenIn(path);
  return ParseScores(is, path);
}

void WriteScores(std::ostream &os, const std::vector<ScoreRecord> &records) {
  for (const auto &r : records)
    os << r.utterance_id << ' ' << r.attack_id << ' ' << KeyName(r.bonafide) << ' '
       << FormatDouble(r.score) << '\n';
}

void WriteScores(const std::string &path, const std::vector<ScoreRecord> &records) {
  auto os = OpenOut(path);
  WriteScores(os, records);
}

LabeledScores ToLabeled(const std::vector<ScoreRecord> &records) {
  LabeledScores out;
  for (const auto &r : records) (r.bonafide ? out.bona : out.spoof).push_back(r.score);
  return out;
}

LabeledScores ToLabeled(const std::vector<ScoreRecord> &records, const std::string &attack_id) {
  LabeledScores out;
  for (const auto &r : records) {
    if (r.bonafide)
      out.bona.push_back(r.score);
    else if (r.attack_id == attack_id)
      out.spoof.push_back(r.score);
  }
  return out;
}

void ScoreVectorSet::Validate() const {
  const int d = Dim();
  for (const auto &t : trials) {
    if (t.scores.size() != d || d == 0) throw DimensionError("score vectors: non-uniform dimension");
    if (!t.scores.allFinite()) throw DataError("score vectors: non-finite score for " + t.utterance_id);
    if (t.bonafide != (t.attack_id == kNoAttack))
      throw DataError("score vectors: key/attack mismatch for " + t.utterance_id);
  }
}

void ScoreVectorSet::ValidateForTraining() const {
  Validate();
  bool bona = false, spoof = false;
  for (const auto &t : trials) (t.bonafide ? bona : spoof) = true;
  if (!bona || !spoof) throw DataError("score vectors: training needs both bona fide and spoof trials");
}

Matrix ScoreVectorSet::AsMatrix() const {
  Matrix m(static_cast<Eigen::Index>(trials.size()), Dim());
  for (size_t i = 0; i < trials.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = trials[i].scores.transpose();
  return m;
}

ScoreVectorSet AlignScoreFiles(const std::vector<std::vector<ScoreRecord>> &files) {
  if (files.empty()) throw IoError("align: no score files");
  const auto &first = files.front();
  const Eigen::Index d = static_cast<Eigen::Index>(files.size());
  std::unordered_map<std::string, size_t> index;
  ScoreVectorSet out;
  out.trials.reserve(first.size());
  for (const auto &r : first) {
    if (!index.emplace(r.utterance_id, out.trials.size()).second)
      throw IoError("align: duplicate utterance " + r.utterance_id + " in score file 1");
    ScoreVectorSet::Entry e{r.utterance_id, r.attack_id, r.bonafide, Vector::Zero(d)};
    e.scores[0] = r.score;
    out.trials.push_back(std::move(e));
  }
  for (size_t f = 1; f < files.size(); ++f) {
    std::vector<bool> seen(out.trials.size(), false);
    for (const auto &r : files[f]) {
      auto it = index.find(r.utterance_id);
      if (it == index.end())
        throw IoError("align: utterance " + r.utterance_id + " of score file " +
                      std::to_string(f + 1) + " is missing from score file 1");
      if (seen[it->second])
        throw IoError("align: duplicate utterance " + r.utterance_id + " in score file " +
                      std::to_string(f + 1));
      auto &e = out.trials[it->second];
      if (e.bonafide != r.bonafide || e.attack_id != r.attack_id)
        throw IoError("align: labels of " + r.utterance_id + " differ between score files");
      seen[it->second] = true;
      e.scores[static_cast<Eigen::Index>(f)] = r.score;
    }
    for (size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw IoError("align: utterance " + out.trials[i].utterance_id + " is missing from score file " +
                      std::to_string(f + 1));
  }
  return out;
}

void WriteManifest(const std::string &path, const std::vector<ManifestEntry> &entries) {
  auto os = OpenOut(path);
  os << "utterance_id\tpath\tattack_id\tkey\n";
  for (const auto &e : entries)
    os << e.utterance_id << '\t' << e.path << '\t' << e.attack_id << '\t' << KeyName(e.bonafide)
       << '\n';
}

std::vector<ManifestEntry> ReadManifest(const std::string &path) {
  auto is = OpenIn(path);
  std::string line;
  if (!std::getline(is, line) || line != "utterance_id\tpath\tattack_id\tkey")
    throw IoError(path + ": missing manifest header");
  std::vector<ManifestEntry> out;
  for (int line_no = 2; std::getline(is, line); ++line_no) {
    if (IsBlank(line)) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, '\t');) f.push_back(tok);
    if (f.size() != 4) throw IoError(where + ": expected 4 tab-separated fields");
    ManifestEntry e{f[0], f[1], f[2], true};
    if (!ParseKey(f[3], &e.bonafide)) throw IoError(where + ": unknown key '" + f[3] + "'");
    CheckKeyAttack(e.bonafide, e.attack_id, where);
    out.push_back(std::move(e));
  }
  return out;
}

void SynthSpec::Validate() const {
  auto fail = [](const std::string &m) { throw ConfigError("synth spec: " + m); };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (!(duration_s > 0.0)) fail("duration_s must be positive");
  if (n_bona <= 0) fail("n_bona must be positive");
  if (!(level_rms > 0.0) || level_rms > 0.2) fail("level_rms must be in (0, 0.2]");
  std::set<std::string> ids;
  for (const auto &a : attacks) {
    if (a.id.empty() || a.id == kNoAttack) fail("attack id must be a non-empty token other than '-'");
    if (!ids.insert(a.id).second) fail("duplicate attack id " + a.id);
    if (a.count <= 0) fail("attack " + a.id + ": count must be positive");
    if (!(a.f_lo >= 0.0) || !(a.f_lo < a.f_hi) || a.f_hi > sample_rate / 2.0)
      fail("attack " + a.id + ": band must satisfy 0 <= f_lo < f_hi <= sample_rate/2");
    if (std::isnan(a.snr_db)) fail("attack " + a.id + ": snr_db is NaN");
  }
}

double CarrierEnvelope(double hz) {
  // Pink-ish tilt with two broad resonances.
  const double tilt = 1.0 / (1.0 + hz / 500.0);
  const double r1 = std::exp(-std::pow((hz - 700.0) / 400.0, 2.0));
  const double r2 = 0.5 * std::exp(-std::pow((hz - 2500.0) / 700.0, 2.0));
  return std::sqrt(tilt * (1.0 + 2.0 * r1 + r2) + 1e-3);
}

Waveform SynthesizeUtterance(const SynthSpec &spec, const AttackSpec *attack,
                             const std::string &utterance_id) {
  const int n = static_cast<int>(std::lround(spec.duration_s * spec.sample_rate));
  if (n < 2) throw ConfigError("synth: utterance shorter than two samples");
  const int half = n / 2;
  const double bin_hz = static_cast<double>(spec.sample_rate) / n;
  std::mt19937_64 rng(DeriveSeed(spec.seed, "utt:" + utterance_id));
  std::normal_distribution<double> normal(0.0, 1.0);

  // One-sided spectrum, bins 1..half (DC left at zero).
  std::vector<double> env(half + 1, 0.0);
  double env_power = 0.0;
  for (int k = 1; k <= half; ++k) {
    env[k] = CarrierEnvelope(k * bin_hz);
    env_power += env[k] * env[k];
  }
  // Unit-variance complex bins of amplitude a give time-domain variance
  // ~ 2 a^2 / n^2 per bin; choose the gain so the expected RMS is level_rms.
  const double gain = spec.level_rms * n / std::sqrt(2.0 * env_power);

  std::vector<std::complex<double>> spec_bins(n, {0.0, 0.0});
  auto draw = [&]() {
    const double re = normal(rng), im = normal(rng);
    return std::complex<double>(re, im) / std::sqrt(2.0);
  };
  for (int k = 1; k <= half; ++k) spec_bins[k] = gain * env[k] * draw();

  if (attack && !(std::isinf(attack->snr_db) && attack->snr_db < 0.0)) {
    std::vector<int> band;
    double carrier_in_band = 0.0;
    for (int k = 1; k <= half; ++k) {
      const double f = k * bin_hz;
      if (f >= attack->f_lo && f <= attack->f_hi) {
        band.push_back(k);
        carrier_in_band += gain * gain * env[k] * env[k];
      }
    }
    const double ratio = std::pow(10.0, -attack->snr_db / 10.0);
    if (!band.empty()) {
      if (attack->type == ArtefactType::kBandNoise) {
        const double amp = std::sqrt(carrier_in_band * ratio / static_cast<double>(band.size()));
        for (int k : band) spec_bins[k] += amp * draw();
      } else {
        const double keep = std::sqrt(std::max(0.0, 1.0 - ratio));
        for (int k : band) spec_bins[k] *= keep;
      }
    }
  }
  // Hermitian completion; the Nyquist bin must be real.
  if (n % 2 == 0) spec_bins[half] = {spec_bins[half].real() * std::sqrt(2.0), 0.0};
  for (int k = 1; k < (n + 1) / 2; ++k) spec_bins[n - k] = std::conj(spec_bins[k]);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> time;
  fft.inv(time, spec_bins);

  Waveform wave;
  wave.sample_rate = spec.sample_rate;
  wave.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = time[i].real();  // inverse FFT already scaled by 1/n
    if (!(std::abs(v) < 1.0))
      throw DataError("synth: utterance " + utterance_id + " would clip");
    wave.samples[i] = v;
  }
  return wave;
}

SynthResult SynthCorpus(const SynthSpec &spec, const std::string &out_dir, int jobs) {
  spec.Validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  struct Item {
    Trial trial;
    const AttackSpec *attack;
  };
  std::vector<Item> items;
  for (int i = 0; i < spec.n_bona; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "bona_%05d", i);
    items.push_back({Trial{"SYN", buf, kNoAttack, true}, nullptr});
  }
  for (const auto &a : spec.attacks)
    for (int i = 0; i < a.count; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_%05d", i);
      items.push_back({Trial{"SYN", a.id + buf, a.id, false}, &a});
    }

  SynthResult res;
  res.trials.resize(items.size());
  res.manifest.resize(items.size());
  ParallelFor(items.size(), jobs, [&](size_t i) {
    const auto &it = items[i];
    const std::string rel = "wav/" + it.trial.utterance_id + ".wav";
    WriteWav((fs::path(out_dir) / rel).string(),
             SynthesizeUtterance(spec, it.attack, it.trial.utterance_id));
    res.trials[i] = it.trial;
    res.manifest[i] = {it.trial.utterance_id, rel, it.trial.attack_id, it.trial.bonafide};
  });
  WriteProtocol((fs::path(out_dir) / "protocol.txt").string(), res.trials);
  WriteManifest((fs::path(out_dir) / "manifest.tsv").string(), res.manifest);
  return res;
}

ScenarioSpec ScenarioSpec::Default(int per_cluster, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  const Matrix cov = 0.36 * Matrix::Identity(2, 2);
  auto add = [&](const char *id, double x, double y) {
    Vector m(2);
    m << x, y;
    spec.clusters.push_back({id, per_cluster, m, cov});
  };
  add(kNoAttack, 2.0, 2.0);
  add("A1", -2.0, 6.0);
  add("A2", 6.0, -2.0);
  add("A3", -2.0, -2.0);
  return spec;
}

void ScenarioSpec::Validate() const {
  auto fail = [](const std::string &m) { throw ConfigError("scenario spec: " + m); };
  if (clusters.empty()) fail("no clusters");
  const Eigen::Index d = clusters.front().mean.size();
  if (d < 1) fail("zero-dimensional cluster mean");
  bool bona = false, spoof = false;
  for (const auto &c : clusters) {
    if (c.count <= 0) fail("cluster counts must be positive");
    if (c.mean.size() != d || c.cov.rows() != d || c.cov.cols() != d) fail("inconsistent dimensions");
    if (!c.mean.allFinite() || !c.cov.allFinite()) fail("non-finite cluster parameter");
    if ((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail("covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.cov);
    if (es.eigenvalues().minCoeff() < -1e-12) fail("covariance not positive semi-definite");
    (c.attack_id == kNoAttack ? bona : spoof) = true;
  }
  if (!bona || !spoof) fail("need bona fide and attack clusters");
}

ScoreVectorSet SynthScenario(const ScenarioSpec &spec) {
  spec.Validate();
  ScoreVectorSet out;
  std::mt19937_64 rng(DeriveSeed(spec.seed, "scenario"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::map<std::string, int> next_index;
  for (const auto &c : spec.clusters) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.cov);
    const Matrix root =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const std::string prefix = c.attack_id == kNoAttack ? "bona" : c.attack_id;
    for (int i = 0; i < c.count; ++i) {
      Vector z(c.mean.size());
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = normal(rng);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_%05d", next_index[prefix]++);
      out.trials.push_back({prefix + buf, c.attack_id, c.attack_id == kNoAttack,
                            c.cov.isZero(0.0) ? c.mean : Vector(c.mean + root * z)});
    }
  }
  return out;
}

}  // namespace sbcm
