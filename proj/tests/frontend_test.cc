// tests/frontend_test.cc

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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sbcm/feature_cache.h"
#include "sbcm/frontend.h"
#include "sbcm/wav.h"

using namespace sbcm;

namespace {

Waveform Noise(int n, uint64_t seed, double scale = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(n);
  for (auto &s : w.samples) s = std::clamp(g(rng), -1.0, 1.0);
  return w;
}

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("sbcm_frontend_" + name)).string();
}

}  // namespace

TEST_CASE("framing follows floor((len - win) / hop) + 1") {
  FrontendConfig cfg = FrontendConfig::HighResolution();
  CHECK(FrameSignal(Noise(16000, 1), cfg).rows() == 65);
  CHECK(FrameSignal(Noise(480, 1), cfg).rows() == 1);
  CHECK_THROWS_AS(FrameSignal(Noise(479, 1), cfg), TooShortError);

  for (int len = 480; len < 3000; len += 37) {
    for (double hop : {5.0, 10.0, 15.0, 30.0}) {
      cfg.hop_ms = hop;
      const int win = cfg.WindowSamples(16000), h = cfg.HopSamples(16000);
      CHECK(FrameSignal(Noise(len, 2), cfg).rows() == (len - win) / h + 1);
    }
  }
}

TEST_CASE("silence frames to zeros") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(4000, 0.0);
  const Matrix f = FrameSignal(w, FrontendConfig::Baseline());
  CHECK(f.cwiseAbs().maxCoeff() == 0.0);
  CHECK(PowerSpectrum(f, 512).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("power spectrum peaks and symmetries") {
  const int n = 480;
  Matrix sine(1, n);
  for (int i = 0; i < n; ++i) sine(0, i) = std::sin(2.0 * std::numbers::pi * 1000.0 * i / 16000.0);
  Eigen::Index peak;
  PowerSpectrum(sine, 1024).row(0).maxCoeff(&peak);
  CHECK(peak == 64);

  // DC-only frame with a rectangular window: all energy in bin 0.
  const Matrix q = PowerSpectrum(Matrix::Constant(1, 512, 0.3), 512);
  CHECK(q(0, 0) == doctest::Approx(std::pow(0.3 * 512, 2)));
  CHECK(q.row(0).tail(q.cols() - 1).cwiseAbs().maxCoeff() < 1e-20);

  CHECK_THROWS_AS(PowerSpectrum(Matrix::Zero(1, 600), 512), ConfigError);

  const Waveform w = Noise(8000, 3);
  Waveform neg = w, loud = w;
  for (auto &s : neg.samples) s = -s;
  for (auto &s : loud.samples) s *= 2.0;
  const FrontendConfig cfg = FrontendConfig::HighResolution();
  const Matrix a = PowerSpectrum(FrameSignal(w, cfg), 1024);
  CHECK((PowerSpectrum(FrameSignal(neg, cfg), 1024) - a).cwiseAbs().maxCoeff() <= 1e-12 * a.maxCoeff());
  CHECK((PowerSpectrum(FrameSignal(loud, cfg), 1024) - 4.0 * a).cwiseAbs().maxCoeff() <=
        1e-12 * a.maxCoeff());
  CHECK(a.minCoeff() >= 0.0);
}

TEST_CASE("linear filterbank geometry") {
  FrontendConfig cfg = FrontendConfig::Baseline();  // 20 filters, 512-pt FFT
  cfg.n_fft = 1024;
  const Matrix fb = LinearFilterbank(cfg, 16000);
  REQUIRE(fb.rows() == 20);
  const double spacing = 8000.0 / 21.0;
  CHECK(spacing == doctest::Approx(380.952).epsilon(1e-5));
  const double bw = 16000.0 / 1024;
  for (int m = 0; m < 20; ++m) {
    Eigen::Index k;
    fb.row(m).maxCoeff(&k);
    CHECK(std::abs(k * bw - (m + 1) * spacing) <= bw);
    CHECK(fb.row(m).minCoeff() >= 0.0);
    CHECK(fb.row(m).sum() > 0.0);
  }
  // Interior filters vanish outside their neighbours' centres.
  for (int m = 1; m < 19; ++m) {
    for (Eigen::Index k = 0; k < fb.cols(); ++k) {
      const double f = k * bw;
      if (f <= m * spacing || f >= (m + 2) * spacing) CHECK(fb(m, k) == 0.0);
    }
  }

  cfg.n_filters = 1;
  cfg.n_ceps = 1;
  const Matrix one = LinearFilterbank(cfg, 16000);
  Eigen::Index mid;
  one.row(0).maxCoeff(&mid);
  CHECK(mid == 256);

  cfg.n_filters = 20;
  cfg.n_ceps = 20;
  cfg.f_min = 2000;
  cfg.f_max = 2200;  // 200 Hz cannot host 20 filters 15.6 Hz apart
  CHECK_THROWS_AS(LinearFilterbank(cfg, 16000), ConfigError);
}

TEST_CASE("band edges snap to bin centres") {
  CHECK(SnapToBin(15.625, 16000, 1024) == 15.625);
  CHECK(SnapToBin(15.62, 16000, 1024) == 15.625);
  CHECK(SnapToBin(4806, 16000, 1024) == 4812.5);
  CHECK(SnapToBin(8000, 16000, 1024) == 8000.0);
}

TEST_CASE("DCT is orthonormal; constant input keeps only c0") {
  for (int n : {1, 2, 7, 20, 70}) {
    const Matrix d = DctMatrix(n);
    CHECK((d * d.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    const Vector x = Vector::Random(n);
    CHECK((d.transpose() * (d * x) - x).cwiseAbs().maxCoeff() < 1e-10);
    const Vector c = d * Vector::Constant(n, 2.5);
    CHECK(c[0] == doctest::Approx(2.5 * std::sqrt(double(n))));
    if (n > 1) CHECK(c.tail(n - 1).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("regression deltas") {
  const Matrix constant = Matrix::Constant(9, 4, 3.0);
  CHECK(ComputeDeltas(constant, 2).cwiseAbs().maxCoeff() == 0.0);
  const Matrix x = Matrix::Random(12, 5);
  CHECK((ComputeDeltas(3.5 * x, 2) - 3.5 * ComputeDeltas(x, 2)).cwiseAbs().maxCoeff() < 1e-12);
  // A ramp has slope 1 away from the replicated edges.
  Matrix ramp(10, 1);
  for (int t = 0; t < 10; ++t) ramp(t, 0) = t;
  const Matrix d = ComputeDeltas(ramp, 2);
  for (int t = 2; t < 8; ++t) CHECK(d(t, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ComputeDeltas(x, 0), ConfigError);
}

TEST_CASE("LFCC dimensions and stationary input") {
  const Waveform w = Noise(16000, 4);
  const Matrix base = ExtractLfcc(w, FrontendConfig::Baseline());
  CHECK(base.cols() == 60);
  CHECK(base.rows() == (16000 - 320) / 160 + 1);
  CHECK(base.allFinite());
  const Matrix hr = ExtractLfcc(w, FrontendConfig::HighResolution());
  CHECK(hr.cols() == 60);
  CHECK(hr.rows() == 65);

  // Identical spectra in every frame -> delta blocks vanish.
  const FrontendConfig cfg = FrontendConfig::HighResolution();
  const LfccExtractor ex(cfg, 16000);
  const Matrix one = PowerSpectrum(FrameSignal(Noise(480, 5), cfg), 1024);
  const Matrix rep = one.replicate(8, 1);
  const Matrix f = ex.FromPowerSpectrum(rep);
  CHECK(f.rightCols(40).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config validation and hashing") {
  FrontendConfig cfg;
  CHECK_NOTHROW(cfg.Validate(16000));
  FrontendConfig bad = cfg;
  bad.hop_ms = 40;
  CHECK_THROWS_AS(bad.Validate(16000), ConfigError);
  bad = cfg;
  bad.n_fft = 256;
  CHECK_THROWS_AS(bad.Validate(16000), ConfigError);
  bad = cfg;
  bad.f_max = 9000;
  CHECK_THROWS_AS(bad.Validate(16000), ConfigError);
  bad = cfg;
  bad.n_ceps = 71;
  CHECK_THROWS_AS(bad.Validate(16000), ConfigError);
  bad = cfg;
  bad.delta_context = 0;
  CHECK_THROWS_AS(bad.Validate(16000), ConfigError);

  CHECK(cfg.Hash() == FrontendConfig{}.Hash());
  FrontendConfig other = cfg;
  other.f_min = 15.625;
  CHECK(cfg.Hash() != other.Hash());
  CHECK(cfg.Hash().size() == 16);
}

TEST_CASE("wav and feature cache round trips") {
  Waveform w = Noise(1234, 6, 0.3);
  const std::string wav = TempPath("a.wav");
  WriteWav(wav, w);
  const Waveform r = ReadWav(wav);
  CHECK(r.sample_rate == 16000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) CHECK(std::abs(r.samples[i] - w.samples[i]) <= 0.5 / 32768 + 1e-12);
  // A second round trip is lossless.
  WriteWav(wav, r);
  CHECK(ReadWav(wav).samples == r.samples);

  const Matrix feats = ExtractLfcc(w, FrontendConfig::Baseline());
  const std::string cache = TempPath("a.feat");
  WriteFeatureCache(cache, feats, "0123456789abcdef");
  const CachedFeatures c = ReadFeatureCache(cache);
  CHECK(c.config_hash == "0123456789abcdef");
  REQUIRE(c.feats.rows() == feats.rows());
  CHECK((c.feats - feats.cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(ReadFeatureCache(TempPath("missing.feat")), IoError);
  std::filesystem::remove(wav);
  std::filesystem::remove(cache);
}
