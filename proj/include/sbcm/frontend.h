// sbcm/frontend.h

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

#ifndef SBCM_FRONTEND_H_
#define SBCM_FRONTEND_H_

#include <string>

#include "sbcm/common.h"
#include "sbcm/wav.h"

namespace sbcm {

/// Settings of the sub-band LFCC front-end. The band [f_min, f_max] is
/// snapped to FFT bin centres before the filterbank is laid out.
struct FrontendConfig {
  double window_ms = 30.0;
  double hop_ms = 15.0;
  int n_fft = 1024;
  int n_filters = 70;
  double f_min = 0.0;
  double f_max = 8000.0;
  int n_ceps = 20;
  int delta_context = 2;

  /// 20 ms / 10 ms framing, 20 filters, 20 cepstra (60 dims with deltas).
  static FrontendConfig Baseline();
  /// 30 ms / 15 ms framing, 1024-point FFT, 70 filters.
  static FrontendConfig HighResolution();

  int WindowSamples(int sample_rate) const;
  int HopSamples(int sample_rate) const;
  int Dims() const { return 3 * n_ceps; }
  double BinWidth(int sample_rate) const {
    return static_cast<double>(sample_rate) / n_fft;
  }

  /// Throws ConfigError on any violated invariant for this sample rate.
  void Validate(int sample_rate) const;

  /// Canonical "key=value;..." form used for hashing.
  std::string Canonical() const;
  /// Hex FNV-1a hash of Canonical(); ties features and models together.
  std::string Hash() const;

  bool operator==(const FrontendConfig &) const = default;
};

/// Nearest FFT bin centre to `hz`.
double SnapToBin(double hz, int sample_rate, int n_fft);

/// Frames x window-samples matrix, each row multiplied by a Hamming window.
/// Frame count is floor((len - win) / hop) + 1. Throws TooShortError when
/// the waveform holds less than one window.
Matrix FrameSignal(const Waveform &wave, const FrontendConfig &cfg);

/// Frames x (n_fft/2 + 1) squared DFT magnitudes; rows are zero-padded to
/// n_fft. Throws ConfigError if n_fft is shorter than a frame.
Matrix PowerSpectrum(const Matrix &frames, int n_fft);

/// n_filters x (n_fft/2 + 1) triangular filters with centres equally spaced
/// on a linear scale inside the snapped band.
Matrix LinearFilterbank(const FrontendConfig &cfg, int sample_rate);

/// n x n orthonormal DCT-II matrix (row k = basis function k).
Matrix DctMatrix(int n);

/// Regression deltas over +-context frames with edge frames replicated.
Matrix ComputeDeltas(const Matrix &feats, int context);

/// Filterbank and DCT prepared once for a (config, sample rate) pair.
class LfccExtractor {
 public:
  LfccExtractor(const FrontendConfig &cfg, int sample_rate);

  const FrontendConfig &config() const { return cfg_; }
  const Matrix &filterbank() const { return filterbank_; }

  /// Static + delta + delta-delta stack from a power spectrogram computed
  /// with this config's framing and FFT size.
  Matrix FromPowerSpectrum(const Matrix &spectrum) const;
  Matrix Extract(const Waveform &wave) const;

 private:
  FrontendConfig cfg_;
  int sample_rate_;
  Matrix filterbank_;
  Matrix dct_;  // n_ceps x n_filters
};

Matrix ExtractLfcc(const Waveform &wave, const FrontendConfig &cfg);

}  // namespace sbcm

#endif  // SBCM_FRONTEND_H_
