// sbcm/corpus.h

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

#ifndef SBCM_CORPUS_H_
#define SBCM_CORPUS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "sbcm/common.h"
#include "sbcm/metrics.h"
#include "sbcm/wav.h"

namespace sbcm {

inline constexpr const char *kBonafideKey = "bonafide";
inline constexpr const char *kSpoofKey = "spoof";
inline constexpr const char *kNoAttack = "-";

/// One protocol line. key == bonafide exactly when attack_id == "-".
struct Trial {
  std::string speaker_id;
  std::string utterance_id;
  std::string attack_id = kNoAttack;
  bool bonafide = true;

  bool operator==(const Trial &) const = default;
};

/// Parses `speaker utterance - attack key` lines (blank lines skipped).
/// Throws IoError naming the offending line.
std::vector<Trial> ParseProtocol(std::istream &is, const std::string &what = "protocol");
std::vector<Trial> ReadProtocol(const std::string &path);
void WriteProtocol(std::ostream &os, const std::vector<Trial> &trials);
void WriteProtocol(const std::string &path, const std::vector<Trial> &trials);

/// Line of a score file: `utterance attack key score`.
struct ScoreRecord {
  std::string utterance_id;
  std::string attack_id = kNoAttack;
  bool bonafide = true;
  double score = 0.0;

  bool operator==(const ScoreRecord &) const = default;
};

std::vector<ScoreRecord> ParseScores(std::istream &is, const std::string &what = "scores");
std::vector<ScoreRecord> ReadScores(const std::string &path);
void WriteScores(std::ostream &os, const std::vector<ScoreRecord> &records);
void WriteScores(const std::string &path, const std::vector<ScoreRecord> &records);

/// Pooled split of score records into bona fide / spoof.
LabeledScores ToLabeled(const std::vector<ScoreRecord> &records);
/// Bona fide records plus spoof records of one attack.
LabeledScores ToLabeled(const std::vector<ScoreRecord> &records, const std::string &attack_id);

/// Per-trial score vectors from D component countermeasures.
struct ScoreVectorSet {
  struct Entry {
    std::string utterance_id;
    std::string attack_id = kNoAttack;
    bool bonafide = true;
    Vector scores;
  };
  std::vector<Entry> trials;

  int Dim() const { return trials.empty() ? 0 : static_cast<int>(trials.front().scores.size()); }
  size_t size() const { return trials.size(); }
  /// Uniform dimension, finite entries, key/attack consistency.
  void Validate() const;
  /// Additionally requires both keys present.
  void ValidateForTraining() const;
  /// Trials as rows.
  Matrix AsMatrix() const;
};

/// Aligns D score files by utterance id (order of the first file). Any
/// utterance missing from, or extra in, another file, or any key/attack
/// disagreement, is an IoError.
ScoreVectorSet AlignScoreFiles(const std::vector<std::vector<ScoreRecord>> &files);

struct ManifestEntry {
  std::string utterance_id;
  std::string path;
  std::string attack_id;
  bool bonafide;
};
void WriteManifest(const std::string &path, const std::vector<ManifestEntry> &entries);
std::vector<ManifestEntry> ReadManifest(const std::string &path);

enum class ArtefactType { kBandNoise, kBandNotch };

struct AttackSpec {
  std::string id;
  int count = 0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  ArtefactType type = ArtefactType::kBandNoise;
  /// In-band carrier-to-artefact ratio. -inf disables the artefact.
  double snr_db = 10.0;
};

struct SynthSpec {
  int n_bona = 0;
  std::vector<AttackSpec> attacks;
  double duration_s = 1.0;
  int sample_rate = 16000;
  uint64_t seed = 0;
  /// Expected RMS level of the carrier.
  double level_rms = 0.05;

  void Validate() const;
};

/// Waveform of one synthetic utterance. Bona fide when attack is null.
/// Deterministic in (spec.seed, utterance_id).
Waveform SynthesizeUtterance(const SynthSpec &spec, const AttackSpec *attack,
                             const std::string &utterance_id);

/// Spectral envelope (amplitude) of the bona fide carrier at frequency f.
double CarrierEnvelope(double hz);

struct SynthResult {
  std::vector<Trial> trials;
  std::vector<ManifestEntry> manifest;
};

/// Writes <out_dir>/wav/<utt>.wav, <out_dir>/protocol.txt and
/// <out_dir>/manifest.tsv. Bona fide utterances come first, then each
/// attack in spec order.
SynthResult SynthCorpus(const SynthSpec &spec, const std::string &out_dir, int jobs = 1);

/// Gaussian cluster in CM-score space.
struct ClusterSpec {
  std::string attack_id = kNoAttack;  // "-" for bona fide
  int count = 0;
  Vector mean;
  Matrix cov;
};

struct ScenarioSpec {
  std::vector<ClusterSpec> clusters;
  uint64_t seed = 0;

  /// Two CMs; bona fide high/high, A1 low/high, A2 high/low, A3 low/low.
  static ScenarioSpec Default(int per_cluster = 250, uint64_t seed = 1);
  /// Consistent dims, symmetric positive semi-definite covariances, counts
  /// > 0, at least one bona fide and one attack cluster.
  void Validate() const;
};

/// Draws every cluster; utterance ids are "<attack or bona>_<index>".
ScoreVectorSet SynthScenario(const ScenarioSpec &spec);

}  // namespace sbcm

#endif  // SBCM_CORPUS_H_
