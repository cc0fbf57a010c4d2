// sbcm/subband.h

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

#ifndef SBCM_SUBBAND_H_
#define SBCM_SUBBAND_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbcm/corpus.h"
#include "sbcm/frontend.h"
#include "sbcm/gmm.h"
#include "sbcm/metrics.h"

namespace sbcm {

/// Candidate band edges. A cell (cut_in[i], cut_off[j]) exists only when
/// cut_off - cut_in >= min_width, giving the upper-triangular layout.
struct BandGrid {
  std::vector<double> cut_in;
  std::vector<double> cut_off;
  double min_width = 0.0;

  /// n evenly spaced candidates over [lo, hi] for both axes.
  static BandGrid Uniform(double lo, double hi, int n, double min_width);

  void Validate() const;
  bool IsValid(double f_min, double f_max) const { return f_max - f_min >= min_width; }
  /// Valid (f_min, f_max) pairs, cut-in major.
  std::vector<std::pair<double, double>> ValidCells() const;
};

struct HeatCell {
  double f_min;
  double f_max;
  double value;  // min t-DCF
};

struct HeatMap {
  BandGrid grid;
  std::string attack_id;
  std::vector<HeatCell> cells;  // valid, successfully evaluated cells
  std::vector<std::pair<std::pair<double, double>, std::string>> failed;  // cell, reason

  /// Lowest-valued cell; ties resolved by cell order. Throws DataError if
  /// the map is empty.
  const HeatCell &MinCell() const;

  /// Header `f_min\tf_max\tmin_tdcf`, one row per evaluated cell.
  void WriteTsv(const std::string &path) const;
  static HeatMap ReadTsv(const std::string &path);
};

struct ComResult {
  double f_min_com;   // unsnapped weighted mean
  double f_max_com;
  double f_min_band;  // snapped to FFT bin centres
  double f_max_band;
  double total_mass;
  double epsilon;

  /// Key-value lines `name value`.
  void Write(const std::string &path) const;
  static ComResult Read(const std::string &path);
};

/// R = sum(m_i r_i) / M with m_i = 1 / max(min t-DCF_i, epsilon). The band
/// edges are then snapped to the bin grid of (sample_rate, n_fft).
ComResult CenterOfMass(const HeatMap &hm, double epsilon, int sample_rate = 16000,
                       int n_fft = 1024);

/// The wider of [lo, f_min] and [f_max, hi].
std::pair<double, double> ComplementaryBand(double f_min, double f_max, double lo, double hi);

struct Utterance {
  Trial trial;
  Waveform wave;
};

/// Loads <audio_dir>/<utterance>.wav for every trial.
std::vector<Utterance> LoadUtterances(const std::vector<Trial> &trials, const std::string &audio_dir,
                                      int jobs = 1);

/// Power spectra for every utterance, computed once with a config's framing
/// and FFT size so that many band settings can reuse them.
struct SpectralSet {
  std::vector<Trial> trials;
  std::vector<Matrix> spectra;
  int sample_rate = 0;
  double window_ms = 0.0;
  double hop_ms = 0.0;
  int n_fft = 0;

  static SpectralSet Compute(const std::vector<Utterance> &utts, const FrontendConfig &cfg,
                             int jobs = 1);
  bool Compatible(const FrontendConfig &cfg) const {
    return window_ms == cfg.window_ms && hop_ms == cfg.hop_ms && n_fft == cfg.n_fft;
  }
};

struct CmOptions {
  int num_components = 16;
  EmOptions em;
  TdcfCosts costs;
  /// Parallel cells / sweep rows. EM inside a cell runs single-threaded.
  int jobs = 1;
};

/// Band-specific config: f_min/f_max replaced, filter count scaled with
/// bandwidth from the template (floor 10), cepstra clamped to the filters.
FrontendConfig CellConfig(const FrontendConfig &tmpl, double f_min, double f_max, int sample_rate);

/// Trains a bona/spoof pair on the set's features. When attack_id is set,
/// only that attack's spoof trials are used for the spoof model.
CmPair TrainCm(const SpectralSet &train, const FrontendConfig &cfg, const CmOptions &opts,
               const std::optional<std::string> &attack_id = std::nullopt);

/// LLR score for every trial of the set.
std::vector<ScoreRecord> ScoreCm(const CmPair &cm, const SpectralSet &set, const FrontendConfig &cfg);

/// Train on `train`, score `eval`, return the min t-DCF on bona fide trials
/// pooled with trials of attack_id (all spoof trials when attack_id is "").
double EvaluateBand(const SpectralSet &train, const SpectralSet &eval, const FrontendConfig &cfg,
                    const std::string &attack_id, const CmOptions &opts);

/// One CM per valid grid cell; cells that throw are recorded in `failed`.
/// The assembled map does not depend on completion order.
HeatMap BuildHeatMap(const BandGrid &grid, const std::string &attack_id, const SpectralSet &train,
                     const SpectralSet &eval, const FrontendConfig &tmpl, const CmOptions &opts);

struct SweepRow {
  int n_filters = 0;
  double min_tdcf = 0.0;
  double eer = 0.0;
  double bhattacharyya = 0.0;
  ScoreGaussians gaussians{};
  std::string error;  // non-empty when this row failed
};

/// Full-band CMs at each filter count, evaluated on pooled dev trials.
std::vector<SweepRow> ResolutionSweep(const std::vector<int> &filter_counts,
                                      const std::vector<Utterance> &train,
                                      const std::vector<Utterance> &dev, const FrontendConfig &tmpl,
                                      const CmOptions &opts);

void WriteSweepTsv(const std::string &path, const std::vector<SweepRow> &rows);

}  // namespace sbcm

#endif  // SBCM_SUBBAND_H_
