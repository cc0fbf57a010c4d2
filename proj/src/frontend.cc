// sbcm/frontend.cc

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

#include "sbcm/frontend.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace sbcm {

namespace {

constexpr double kLogFloor = 1e-30;

}  // namespace

FrontendConfig FrontendConfig::Baseline() {
  FrontendConfig cfg;
  cfg.window_ms = 20.0;
  cfg.hop_ms = 10.0;
  cfg.n_fft = 512;
  cfg.n_filters = 20;
  cfg.n_ceps = 20;
  return cfg;
}

FrontendConfig FrontendConfig::HighResolution() { return FrontendConfig{}; }

int FrontendConfig::WindowSamples(int sample_rate) const {
  return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int FrontendConfig::HopSamples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

void FrontendConfig::Validate(int sample_rate) const {
  auto fail = [](const std::string &msg) { throw ConfigError("frontend: " + msg); };
  if (sample_rate <= 0) fail("sample rate must be positive");
  if (!(hop_ms > 0.0) || !(hop_ms <= window_ms)) fail("need 0 < hop_ms <= window_ms");
  if (HopSamples(sample_rate) < 1) fail("hop shorter than one sample");
  if (n_fft < WindowSamples(sample_rate))
    fail("n_fft (" + std::to_string(n_fft) + ") shorter than the window (" +
         std::to_string(WindowSamples(sample_rate)) + " samples)");
  if (!(f_min >= 0.0) || !(f_min < f_max) || f_max > sample_rate / 2.0)
    fail("need 0 <= f_min < f_max <= sample_rate/2");
  if (n_filters < 1) fail("n_filters must be >= 1");
  if (n_ceps < 1 || n_ceps > n_filters) fail("need 1 <= n_ceps <= n_filters");
  if (delta_context < 1) fail("delta_context must be >= 1");
}

std::string FrontendConfig::Canonical() const {
  std::ostringstream os;
  os << "window_ms=" << FormatDouble(window_ms) << ";hop_ms=" << FormatDouble(hop_ms)
     << ";n_fft=" << n_fft << ";n_filters=" << n_filters << ";f_min=" << FormatDouble(f_min)
     << ";f_max=" << FormatDouble(f_max) << ";n_ceps=" << n_ceps
     << ";delta_context=" << delta_context;
  return os.str();
}

std::string FrontendConfig::Hash() const { return HexHash(Fnv1a64(Canonical())); }

double SnapToBin(double hz, int sample_rate, int n_fft) {
  const double width = static_cast<double>(sample_rate) / n_fft;
  return std::round(hz / width) * width;
}

Matrix FrameSignal(const Waveform &wave, const FrontendConfig &cfg) {
  wave.Validate();
  cfg.Validate(wave.sample_rate);
  const int win = cfg.WindowSamples(wave.sample_rate);
  const int hop = cfg.HopSamples(wave.sample_rate);
  const auto len = static_cast<long>(wave.samples.size());
  if (len < win)
    throw TooShortError("utterance of " + std::to_string(len) +
                        " samples is shorter than one window (" + std::to_string(win) + ")");
  const long n_frames = (len - win) / hop + 1;

  Vector window(win);
  for (int i = 0; i < win; ++i)
    window[i] = win == 1 ? 1.0
                         : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (win - 1));

  Matrix frames(n_frames, win);
  for (long t = 0; t < n_frames; ++t)
    for (int i = 0; i < win; ++i)
      frames(t, i) = wave.samples[t * hop + i] * window[i];
  return frames;
}

Matrix PowerSpectrum(const Matrix &frames, int n_fft) {
  if (n_fft < frames.cols())
    throw ConfigError("power spectrum: n_fft (" + std::to_string(n_fft) +
                      ") shorter than frame length (" + std::to_string(frames.cols()) + ")");
  const int n_bins = n_fft / 2 + 1;
  Matrix spec(frames.rows(), n_bins);
  Eigen::FFT<double> fft;
  std::vector<double> buf(n_fft, 0.0);
  std::vector<std::complex<double>> out;
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (Eigen::Index i = 0; i < frames.cols(); ++i) buf[i] = frames(t, i);
    fft.fwd(out, buf);
    for (int k = 0; k < n_bins; ++k) spec(t, k) = std::norm(out[k]);
  }
  return spec;
}

Matrix LinearFilterbank(const FrontendConfig &cfg, int sample_rate) {
  cfg.Validate(sample_rate);
  const double lo = SnapToBin(cfg.f_min, sample_rate, cfg.n_fft);
  const double hi = SnapToBin(cfg.f_max, sample_rate, cfg.n_fft);
  const double bin_width = cfg.BinWidth(sample_rate);
  const int n = cfg.n_filters;
  const double spacing = (hi - lo) / (n + 1);
  if (!(hi > lo) || spacing < bin_width)
    throw ConfigError("filterbank: band " + FormatDouble(lo) + "-" + FormatDouble(hi) +
                      " Hz is too narrow for " + std::to_string(n) + " filters at " +
                      FormatDouble(bin_width) + " Hz resolution");

  const int n_bins = cfg.n_fft / 2 + 1;
  Matrix fb = Matrix::Zero(n, n_bins);
  for (int m = 0; m < n; ++m) {
    const double left = lo + m * spacing;
    const double centre = left + spacing;
    const double right = centre + spacing;
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_width;
      if (f > left && f < centre)
        fb(m, k) = (f - left) / spacing;
      else if (f >= centre && f < right)
        fb(m, k) = (right - f) / spacing;
    }
  }
  return fb;
}

Matrix DctMatrix(int n) {
  Matrix d(n, n);
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i)
      d(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
  }
  return d;
}

Matrix ComputeDeltas(const Matrix &feats, int context) {
  if (context < 1) throw ConfigError("deltas: context must be >= 1");
  const Eigen::Index frames = feats.rows();
  double denom = 0.0;
  for (int n = 1; n <= context; ++n) denom += 2.0 * n * n;
  Matrix out = Matrix::Zero(frames, feats.cols());
  auto clamp = [frames](Eigen::Index t) {
    return t < 0 ? Eigen::Index{0} : (t >= frames ? frames - 1 : t);
  };
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int n = 1; n <= context; ++n)
      out.row(t) += n * (feats.row(clamp(t + n)) - feats.row(clamp(t - n)));
    out.row(t) /= denom;
  }
  return out;
}

LfccExtractor::LfccExtractor(const FrontendConfig &cfg, int sample_rate)
    : cfg_(cfg), sample_rate_(sample_rate), filterbank_(LinearFilterbank(cfg, sample_rate)) {
  dct_ = DctMatrix(cfg.n_filters).topRows(cfg.n_ceps);
}

Matrix LfccExtractor::FromPowerSpectrum(const Matrix &spectrum) const {
  if (spectrum.cols() != filterbank_.cols())
    throw DimensionError("lfcc: spectrum has " + std::to_string(spectrum.cols()) +
                         " bins, filterbank expects " + std::to_string(filterbank_.cols()));
  Matrix energies = spectrum * filterbank_.transpose();
  energies = energies.array().max(kLogFloor).log().matrix();
  const Matrix ceps = energies * dct_.transpose();
  const Matrix d1 = ComputeDeltas(ceps, cfg_.delta_context);
  const Matrix d2 = ComputeDeltas(d1, cfg_.delta_context);
  Matrix out(ceps.rows(), 3 * cfg_.n_ceps);
  out << ceps, d1, d2;
  return out;
}

Matrix LfccExtractor::Extract(const Waveform &wave) const {
  if (wave.sample_rate != sample_rate_)
    throw ConfigError("lfcc: waveform sample rate " + std::to_string(wave.sample_rate) +
                      " differs from extractor rate " + std::to_string(sample_rate_));
  return FromPowerSpectrum(PowerSpectrum(FrameSignal(wave, cfg_), cfg_.n_fft));
}

Matrix ExtractLfcc(const Waveform &wave, const FrontendConfig &cfg) {
  return LfccExtractor(cfg, wave.sample_rate).Extract(wave);
}

}  // namespace sbcm
