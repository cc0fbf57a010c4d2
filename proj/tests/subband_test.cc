// tests/subband_test.cc

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
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "sbcm/subband.h"

using namespace sbcm;

namespace {

std::vector<Utterance> MakeSet(uint64_t seed, int per_class) {
  SynthSpec spec;
  spec.n_bona = per_class;
  spec.duration_s = 1.0;
  spec.seed = seed;
  spec.attacks.push_back({"A01", per_class, 2000, 4000, ArtefactType::kBandNoise, 0.0});
  spec.attacks.push_back({"A02", per_class, 5000, 7000, ArtefactType::kBandNoise, 0.0});
  std::vector<Utterance> out;
  for (int i = 0; i < per_class; ++i) {
    const std::string id = "bona_" + std::to_string(i);
    out.push_back({{"SYN", id, "-", true}, SynthesizeUtterance(spec, nullptr, id)});
  }
  for (const auto &a : spec.attacks)
    for (int i = 0; i < per_class; ++i) {
      const std::string id = a.id + "_" + std::to_string(i);
      out.push_back({{"SYN", id, a.id, false}, SynthesizeUtterance(spec, &a, id)});
    }
  return out;
}

CmOptions SmallCm() {
  CmOptions o;
  o.num_components = 2;
  o.em.seed = 17;
  return o;
}

}  // namespace

TEST_CASE("band grid layout") {
  const BandGrid g = BandGrid::Uniform(0, 8000, 11, 800);
  CHECK(g.cut_in.size() == 11);
  CHECK(g.cut_off.back() == 8000);
  CHECK(g.ValidCells().size() == 55);
  for (auto [lo, hi] : g.ValidCells()) CHECK(hi - lo >= 800);
  CHECK(BandGrid::Uniform(0, 8000, 21, 800).ValidCells().size() == 190);
  CHECK_THROWS_AS(BandGrid::Uniform(0, 8000, 2, 9000).Validate(), ConfigError);
}

TEST_CASE("centre of mass examples") {
  HeatMap hm;
  hm.cells = {{0, 8000, 0.5}, {4000, 8000, 0.5}};
  ComResult r = CenterOfMass(hm, 1e-3);
  CHECK(r.f_min_com == 2000);
  CHECK(r.f_max_com == 8000);

  hm.cells = {{0, 0, 1.0}, {4000, 8000, 1.0 / 3.0}};
  r = CenterOfMass(hm, 1e-3);
  CHECK(r.f_min_com == doctest::Approx(3000).epsilon(1e-15));
  CHECK(r.f_max_com == doctest::Approx(6000).epsilon(1e-15));
  CHECK(r.f_min_band == 3000);
  CHECK(r.f_max_band == 6000);
  CHECK(r.total_mass == doctest::Approx(4.0));

  hm.cells = {{1234.5, 6789.25, 0.3}};
  r = CenterOfMass(hm, 1e-3);
  CHECK(r.f_min_com == 1234.5);
  CHECK(r.f_max_com == 6789.25);
  CHECK(r.f_min_band == SnapToBin(1234.5, 16000, 1024));

  // Zero-cost cells are capped at mass 1 / epsilon.
  hm.cells = {{0, 4000, 0.0}, {4000, 8000, 1.0}};
  r = CenterOfMass(hm, 1e-3);
  CHECK(r.total_mass == doctest::Approx(1001.0));

  hm.cells.clear();
  CHECK_THROWS_AS(CenterOfMass(hm, 1e-3), DataError);
}

TEST_CASE("centre of mass matches brute force and is scale invariant") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 20;
    const BandGrid g = BandGrid::Uniform(0, 8000, n + 1, 400);
    HeatMap hm;
    for (auto [lo, hi] : g.ValidCells()) hm.cells.push_back({lo, hi, u(rng) < 0.1 ? 0.0 : u(rng)});
    if (hm.cells.empty()) continue;
    const ComResult r = CenterOfMass(hm, 1e-3);
    const auto [lo, hi] = oracle::BruteCom(hm.cells, 1e-3);
    CHECK(std::abs(r.f_min_com - lo) <= 1e-12 * std::max(1.0, lo));
    CHECK(std::abs(r.f_max_com - hi) <= 1e-12 * std::max(1.0, hi));

    HeatMap scaled = hm;
    for (auto &c : scaled.cells) c.value = c.value * 4.0 + 0.0;
    // Uniform scaling leaves R unchanged when no cell hits the clamp.
    bool clamped = false;
    for (const auto &c : hm.cells) clamped |= c.value < 1e-3;
    if (!clamped) {
      const ComResult s = CenterOfMass(scaled, 1e-3);
      CHECK(s.f_min_com == doctest::Approx(r.f_min_com).epsilon(1e-12));
      CHECK(s.f_max_com == doctest::Approx(r.f_max_com).epsilon(1e-12));
    }
  }
}

TEST_CASE("heat-map and CoM files round trip") {
  HeatMap hm;
  hm.cells = {{0, 800, 0.25}, {0, 1600, 0.125}, {800, 1600, 1.0 / 3.0}};
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "sbcm_hm.tsv").string();
  hm.WriteTsv(path);
  const HeatMap back = HeatMap::ReadTsv(path);
  REQUIRE(back.cells.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back.cells[i].f_min == hm.cells[i].f_min);
    CHECK(back.cells[i].f_max == hm.cells[i].f_max);
    CHECK(back.cells[i].value == hm.cells[i].value);
  }
  const ComResult r = CenterOfMass(hm, 1e-3);
  const std::string com = (dir / "sbcm_com.txt").string();
  r.Write(com);
  const ComResult rb = ComResult::Read(com);
  CHECK(rb.f_min_com == r.f_min_com);
  CHECK(rb.f_max_band == r.f_max_band);
  CHECK(rb.total_mass == r.total_mass);
  CHECK(rb.epsilon == r.epsilon);
  std::filesystem::remove(path);
  std::filesystem::remove(com);
}

TEST_CASE("per-cell front-end and complementary band") {
  const FrontendConfig t = FrontendConfig::HighResolution();
  CHECK(CellConfig(t, 0, 8000, 16000).n_filters == 70);
  CHECK(CellConfig(t, 0, 4000, 16000).n_filters == 35);
  CHECK(CellConfig(t, 2000, 2800, 16000).n_filters == 10);
  CHECK(CellConfig(t, 2000, 2800, 16000).n_ceps == 10);
  CHECK(CellConfig(t, 2000, 4000, 16000).n_ceps == 18);
  CHECK(ComplementaryBand(2000, 4000, 0, 8000) == std::pair<double, double>{4000, 8000});
  CHECK(ComplementaryBand(5000, 7000, 0, 8000) == std::pair<double, double>{0, 5000});
}

TEST_CASE("heat-map consistency with direct evaluation") {
  const auto train = SpectralSet::Compute(MakeSet(1, 10), FrontendConfig::HighResolution());
  const auto eval = SpectralSet::Compute(MakeSet(2, 10), FrontendConfig::HighResolution());
  const FrontendConfig tmpl = FrontendConfig::HighResolution();
  const CmOptions opts = SmallCm();

  // A grid whose only valid cell is the full band.
  BandGrid full;
  full.cut_in = {0};
  full.cut_off = {8000};
  full.min_width = 800;
  const HeatMap one = BuildHeatMap(full, "A01", train, eval, tmpl, opts);
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].value == EvaluateBand(train, eval, tmpl, "A01", opts));

  // Parallel and serial assembly agree bit for bit, and re-runs reproduce.
  const BandGrid grid = BandGrid::Uniform(0, 8000, 5, 2000);
  CmOptions par = opts;
  par.jobs = 3;
  const HeatMap a = BuildHeatMap(grid, "A01", train, eval, tmpl, opts);
  const HeatMap b = BuildHeatMap(grid, "A01", train, eval, tmpl, par);
  REQUIRE(a.cells.size() == b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].f_min == b.cells[i].f_min);
    CHECK(a.cells[i].value == b.cells[i].value);
    CHECK(a.cells[i].value >= 0.0);
  }

  // Attack-specific maps prefer different regions.
  const HeatCell best1 = a.MinCell();
  CHECK(best1.f_min < 4000);
  CHECK(best1.f_max > 2000);
  const HeatCell best2 = BuildHeatMap(grid, "A02", train, eval, tmpl, opts).MinCell();
  CHECK(best2.f_max > 5000);
}

TEST_CASE("failing cells are recorded, not zeroed") {
  const auto train = SpectralSet::Compute(MakeSet(1, 3), FrontendConfig::HighResolution());
  CmOptions opts = SmallCm();
  opts.num_components = 64;  // 3 utterances x 65 frames < 640 frames
  const HeatMap hm =
      BuildHeatMap(BandGrid::Uniform(0, 8000, 2, 800), "A01", train, train, FrontendConfig::HighResolution(), opts);
  CHECK(hm.cells.empty());
  CHECK(hm.failed.size() == 1);
  CHECK_THROWS_AS(hm.MinCell(), DataError);
}

TEST_CASE("resolution sweep rows") {
  const auto train = MakeSet(3, 8);
  const auto dev = MakeSet(4, 8);
  const auto rows = ResolutionSweep({20, 70, 600}, train, dev, FrontendConfig::HighResolution(), SmallCm());
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 2; ++i) {
    CHECK(rows[i].error.empty());
    CHECK(rows[i].bhattacharyya > 0.0);
    CHECK(rows[i].eer >= 0.0);
  }
  CHECK_FALSE(rows[2].error.empty());  // 600 filters cannot fit a 1024-point FFT
}
