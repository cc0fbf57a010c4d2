// tests/fusion_test.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "sbcm/fusion.h"
#include "sbcm/metrics.h"
#include "sbcm/svm.h"

using namespace sbcm;

namespace {

ScoreVectorSet Clusters(const std::vector<std::pair<std::string, Vector>> &centres, int per, double sd,
                        uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  ScoreVectorSet s;
  int id = 0;
  for (const auto &[attack, c] : centres)
    for (int i = 0; i < per; ++i) {
      Vector v = c;
      for (Eigen::Index d = 0; d < v.size(); ++d) v[d] += g(rng);
      s.trials.push_back({"u" + std::to_string(id++), attack, attack == "-", v});
    }
  return s;
}

Vector V(std::initializer_list<double> x) {
  Vector v(static_cast<Eigen::Index>(x.size()));
  std::copy(x.begin(), x.end(), v.data());
  return v;
}

ScoreVectorSet Xor(int per, uint64_t seed) {
  return Clusters({{"-", V({2, 2})}, {"A1", V({-2, 6})}, {"A2", V({6, -2})}, {"A3", V({-2, -2})}}, per,
                  0.6, seed);
}

LabeledScores Split(const ScoreVectorSet &s, const Vector &scores) {
  LabeledScores out;
  for (size_t i = 0; i < s.size(); ++i)
    (s.trials[i].bonafide ? out.bona : out.spoof).push_back(scores[static_cast<Eigen::Index>(i)]);
  return out;
}

double Correlation(const Vector &a, const Vector &b) {
  const Vector x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / (x.norm() * y.norm());
}

}  // namespace

TEST_CASE("linear fusion basics") {
  const ScoreVectorSet one = Clusters({{"-", V({1.0})}, {"A1", V({-1.0})}}, 100, 1.0, 1);
  const FusionModel m = TrainLinearFusion(one);
  CHECK(m.kind() == FusionKind::kLinear);
  const auto &p = std::get<LinearParams>(m.params());
  CHECK(p.weights[0] > 0.0);
  CHECK(m.Score(Matrix::Zero(1, 1))[0] == p.bias);

  // A duplicated column ranks trials exactly as the single column.
  ScoreVectorSet dup = one;
  for (auto &t : dup.trials) t.scores = V({t.scores[0], t.scores[0]});
  const Vector a = m.Score(one.AsMatrix()), b = TrainLinearFusion(dup).Score(dup.AsMatrix());
  CHECK(Correlation(a, b) > 1.0 - 1e-12);

  // Flipping labels and negating scores negates the fused output.
  ScoreVectorSet flip = one;
  for (auto &t : flip.trials) {
    t.bonafide = !t.bonafide;
    t.attack_id = t.bonafide ? "-" : "A1";
    t.scores = -t.scores;
  }
  const Vector c = TrainLinearFusion(flip).Score(flip.AsMatrix());
  CHECK((c + a).cwiseAbs().maxCoeff() < 1e-8);

  // Refit on affinely rescaled inputs keeps the ranking.
  const ScoreVectorSet two = Clusters({{"-", V({1.0, 0.5})}, {"A1", V({-1.0, 0.0})}}, 100, 1.0, 2);
  ScoreVectorSet scaled = two;
  for (auto &t : scaled.trials) t.scores = V({3.0 * t.scores[0] - 7.0, 0.25 * t.scores[1] + 2.0});
  const Vector r1 = TrainLinearFusion(two).Score(two.AsMatrix());
  const Vector r2 = TrainLinearFusion(scaled).Score(scaled.AsMatrix());
  CHECK(Correlation(r1, r2) > 1.0 - 1e-6);

  ScoreVectorSet bona_only = one;
  bona_only.trials.resize(100);
  CHECK_THROWS_AS(TrainLinearFusion(bona_only), DataError);
}

TEST_CASE("multinomial fusion") {
  const ScoreVectorSet two = Clusters({{"-", V({1.0, 0.5})}, {"A1", V({-1.0, 0.0})}}, 100, 1.0, 3);
  MultinomialOptions per;
  per.partition = ClassPartition::kPerAttack;
  const Vector lin = TrainLinearFusion(two).Score(two.AsMatrix());
  const Vector mn = TrainMultinomialFusion(two, per).Score(two.AsMatrix());
  CHECK(Correlation(lin, mn) > 1.0 - 1e-6);

  // Renaming spoof classes does not change the bona-vs-rest score.
  const ScoreVectorSet three =
      Clusters({{"-", V({3, 3})}, {"A1", V({-3, 3})}, {"A2", V({3, -3})}}, 60, 1.0, 4);
  ScoreVectorSet renamed = three;
  for (auto &t : renamed.trials)
    if (t.attack_id == "A1")
      t.attack_id = "A2";
    else if (t.attack_id == "A2")
      t.attack_id = "A1";
  const Vector s1 = TrainMultinomialFusion(three, per).Score(three.AsMatrix());
  const Vector s2 = TrainMultinomialFusion(renamed, per).Score(renamed.AsMatrix());
  CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-6);

  // Separable clusters are classified without error.
  const ScoreVectorSet sep = Clusters({{"-", V({4, 4})}, {"A1", V({-4, -4})}}, 80, 0.5, 5);
  for (auto partition : {ClassPartition::kBinary, ClassPartition::kPerAttack}) {
    MultinomialOptions o;
    o.partition = partition;
    const Vector s = TrainMultinomialFusion(sep, o).Score(sep.AsMatrix());
    for (size_t i = 0; i < sep.size(); ++i) CHECK((s[i] > 0.0) == sep.trials[i].bonafide);
  }
}

TEST_CASE("GMM fusion") {
  // K=1 equals the closed-form two-Gaussian LLR.
  const ScoreVectorSet d = Clusters({{"-", V({1.0, 2.0})}, {"A1", V({-1.0, 0.0})}}, 300, 1.3, 6);
  GmmFusionOptions o;
  o.num_components = 1;
  o.em.seed = 1;
  const FusionModel m = TrainGmmFusion(d, o);
  Matrix bona(300, 2), spoof(300, 2);
  for (int i = 0; i < 300; ++i) {
    bona.row(i) = d.trials[i].scores.transpose();
    spoof.row(i) = d.trials[300 + i].scores.transpose();
  }
  const Matrix probe = Matrix::Random(50, 2) * 4.0;
  const Vector got = m.Score(probe);
  for (Eigen::Index i = 0; i < probe.rows(); ++i) {
    const double want = oracle::GaussLogPdf(bona, probe.row(i)) - oracle::GaussLogPdf(spoof, probe.row(i));
    CHECK(std::abs(got[i] - want) <= 1e-8 * std::max(1.0, std::abs(want)));
  }

  // Swapping the class models negates every score.
  auto p = std::get<GmmFusionParams>(m.params());
  std::swap(p.bona, p.spoof);
  const FusionModel swapped(2, p);
  CHECK((swapped.Score(probe) + got).cwiseAbs().maxCoeff() < 1e-12);

  // Identical class data gives flat scores.
  ScoreVectorSet same = d;
  for (int i = 0; i < 300; ++i) same.trials[300 + i].scores = same.trials[i].scores;
  o.num_components = 4;
  const Vector flat = TrainGmmFusion(same, o).Score(same.AsMatrix());
  CHECK(flat.cwiseAbs().maxCoeff() < 1e-9);

  // Fig. 1 geometry: bona fide cluster positive, every attack cluster negative.
  const ScoreVectorSet train = Xor(250, 7), held = Xor(250, 8);
  const Vector s = TrainGmmFusion(train, o).Score(held.AsMatrix());
  int wrong = 0;
  for (size_t i = 0; i < held.size(); ++i) wrong += (s[i] > 0.0) != held.trials[i].bonafide;
  CHECK(wrong < 0.02 * held.size());

  GmmFusionOptions big;
  big.num_components = 64;
  CHECK_THROWS_AS(TrainGmmFusion(Clusters({{"-", V({1.0})}, {"A1", V({0.0})}}, 100, 1.0, 9), big), DataError);
}

TEST_CASE("SVM dual optimality") {
  const ScoreVectorSet sep = Clusters({{"-", V({3, 3})}, {"A1", V({-3, -3})}}, 60, 0.7, 10);
  SmoSolution sol;
  const FusionModel m = TrainSvmFusion(sep, {}, &sol);
  const Vector s = m.Score(sep.AsMatrix());
  for (size_t i = 0; i < sep.size(); ++i) CHECK((s[i] > 0.0) == sep.trials[i].bonafide);

  Vector y(static_cast<Eigen::Index>(sep.size()));
  for (size_t i = 0; i < sep.size(); ++i) y[i] = sep.trials[i].bonafide ? 1.0 : -1.0;
  CHECK(sol.alpha.minCoeff() >= 0.0);
  CHECK(sol.alpha.maxCoeff() <= 1.0);
  CHECK(std::abs(sol.alpha.dot(y)) <= 1e-8);
  CHECK(sol.kkt_gap <= 1e-3);

  // The same checks directly on the solver with a hand-built kernel.
  const Matrix x = Standardizer::Fit(sep.AsMatrix()).Apply(sep.AsMatrix());
  const PolyKernel k{7, 0.5, 1.0};
  const SmoSolution d = SolveSmo(x, y, k, {});
  CHECK(KktGap(x, y, k, d.alpha, 1.0) <= 1e-3);
  CHECK(std::abs(d.alpha.dot(y)) <= 1e-8);
}

TEST_CASE("non-linear fusers beat linear ones on the XOR layout") {
  const ScoreVectorSet train = Xor(250, 11);
  auto train_eer = [&](const FusionModel &m) { return Eer(Split(train, m.Score(train.AsMatrix()))); };
  const double lin = train_eer(TrainLinearFusion(train));
  const double svm = train_eer(TrainSvmFusion(train));
  const double mn = train_eer(TrainMultinomialFusion(train));
  GmmFusionOptions o;
  o.num_components = 4;
  const double gmm = train_eer(TrainGmmFusion(train, o));
  CHECK(svm < lin);
  CHECK(gmm < lin);
  CHECK(svm < mn);
  CHECK(gmm < mn);
}

TEST_CASE("model files round trip for every kind") {
  const ScoreVectorSet train = Xor(60, 12);
  MultinomialOptions per;
  per.partition = ClassPartition::kPerAttack;
  GmmFusionOptions g;
  g.num_components = 2;
  const std::vector<FusionModel> models{TrainLinearFusion(train), TrainMultinomialFusion(train, per),
                                        TrainGmmFusion(train, g), TrainSvmFusion(train)};
  const std::string path = (std::filesystem::temp_directory_path() / "sbcm_fusion.txt").string();
  for (const auto &m : models) {
    m.Write(path);
    const FusionModel back = FusionModel::Read(path);
    CHECK(back.kind() == m.kind());
    CHECK(back.Score(train.AsMatrix()) == m.Score(train.AsMatrix()));
    const auto fused = m.Fuse(train);
    CHECK(fused.size() == train.size());
    CHECK(fused[0].utterance_id == train.trials[0].utterance_id);
    CHECK_THROWS_AS(m.Score(Matrix::Zero(2, 3)), DimensionError);
    // High score means bona fide on the training data for every kind.
    CHECK(Eer(Split(train, m.Score(train.AsMatrix()))) < 0.5);
  }
  std::filesystem::remove(path);
  CHECK(ParseFusionKind("svm-poly") == FusionKind::kSvmPoly);
  CHECK(FusionKindName(FusionKind::kMultinomial) == "multinomial");
  CHECK_THROWS_AS(ParseFusionKind("rbf"), ConfigError);
}
