// tests/gmm_test.cc

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
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "sbcm/gmm.h"

using namespace sbcm;

namespace {

Matrix Gaussian(int n, const Eigen::RowVectorXd &mean, double sd, std::mt19937_64 &rng) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix x(n, mean.size());
  for (int t = 0; t < n; ++t)
    for (Eigen::Index d = 0; d < mean.size(); ++d) x(t, d) = mean[d] + g(rng);
  return x;
}

DiagGmm RandomGmm(int k, int d, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0), m(-3.0, 3.0);
  Vector w(k);
  Matrix mu(k, d), var(k, d);
  for (int i = 0; i < k; ++i) {
    w[i] = u(rng);
    for (int j = 0; j < d; ++j) {
      mu(i, j) = m(rng);
      var(i, j) = u(rng);
    }
  }
  w /= w.sum();
  return DiagGmm(w, mu, var);
}

}  // namespace

TEST_CASE("K=1 recovers the sample moments and weight 1") {
  std::mt19937_64 rng(1);
  Eigen::RowVectorXd mean(3);
  mean << 1.0, -2.0, 0.5;
  const Matrix x = Gaussian(4000, mean, 1.5, rng);
  EmOptions opts;
  opts.seed = 3;
  const DiagGmm g = TrainGmm(std::vector<Matrix>{x}, 1, opts);
  CHECK(g.weights()[0] == 1.0);
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::RowVectorXd var = (x.rowwise() - mu).array().square().colwise().mean();
  for (int d = 0; d < 3; ++d) {
    const double se_mean = std::sqrt(var[d] / 4000.0);
    const double se_var = var[d] * std::sqrt(2.0 / 4000.0);
    CHECK(std::abs(g.means()(0, d) - mu[d]) < 3 * se_mean);
    CHECK(std::abs(g.vars()(0, d) - var[d]) < 3 * se_var);
    CHECK(std::abs(g.means()(0, d) - mean[d]) < 3 * se_mean + 0.1);
  }
}

TEST_CASE("two separated clusters: EM means match k-means centroids") {
  std::mt19937_64 rng(2);
  Eigen::RowVectorXd a(2), b(2);
  a << -5.0, 0.0;
  b << 5.0, 1.0;
  Matrix x(2000, 2);
  x << Gaussian(1000, a, 0.7, rng), Gaussian(1000, b, 0.7, rng);
  EmOptions opts;
  opts.seed = 9;
  const DiagGmm g = TrainGmm(std::vector<Matrix>{x}, 2, opts);
  const Matrix centroids = KMeans(x, 2, 50, 9);
  for (int k = 0; k < 2; ++k) {
    double best = 1e9;
    for (int j = 0; j < 2; ++j) best = std::min(best, (g.means().row(k) - centroids.row(j)).norm());
    CHECK(best < 0.1);
  }
  CHECK(g.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-likelihood closed forms and naive oracle") {
  const int d = 5;
  const DiagGmm unit(Vector::Ones(1), Matrix::Zero(1, d), Matrix::Ones(1, d));
  CHECK(unit.LogLikelihood(Matrix::Zero(1, d)) == doctest::Approx(-0.5 * d * std::log(2 * M_PI)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 4, dims = 1 + trial % 8, n = 1 + trial % 50;
    const DiagGmm g = RandomGmm(k, dims, rng);
    Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(dims);
    const Matrix x = Gaussian(n, zero, 2.0, rng);
    const double want = oracle::NaiveGmmAvgLogLik(g.weights(), g.means(), g.vars(), x);
    CHECK(std::abs(g.LogLikelihood(x) - want) <= 1e-10 * std::max(1.0, std::abs(want)));

    Matrix twice(2 * n, dims);
    twice << x, x;
    CHECK(g.LogLikelihood(twice) == doctest::Approx(g.LogLikelihood(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(unit.LogLikelihood(Matrix::Zero(2, d + 1)), DimensionError);
}

TEST_CASE("EM trace is monotone and invariants hold every iteration") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 8, dims = 1 + trial % 12;
    std::vector<Matrix> data;
    for (int u = 0; u < 3; ++u) {
      Eigen::RowVectorXd c = Eigen::RowVectorXd::Random(dims) * 4.0;
      data.push_back(Gaussian(200, c, 1.0, rng));
    }
    EmOptions opts;
    opts.seed = 100 + trial;
    EmTrace trace;
    int observed = 0;
    bool invariants = true;
    const DiagGmm g = TrainGmm(data, k, opts, &trace, [&](int, const DiagGmm &m) {
      ++observed;
      invariants &= std::abs(m.weights().sum() - 1.0) <= 1e-10;
      invariants &= (m.weights().array() >= 0.0).all();
      for (Eigen::Index i = 0; i < m.vars().rows(); ++i)
        invariants &= (m.vars().row(i).array() >= trace.var_floor.transpose().array()).all();
    });
    CHECK(invariants);
    CHECK(observed >= 1);
    for (size_t i = 1; i < trace.avg_loglik.size(); ++i)
      CHECK(trace.avg_loglik[i] >= trace.avg_loglik[i - 1] - 1e-8 * std::abs(trace.avg_loglik[i - 1]));
    CHECK_NOTHROW(g.Validate(trace.var_floor));
  }
}

TEST_CASE("training is deterministic and thread-count independent") {
  std::mt19937_64 rng(5);
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(6);
  std::vector<Matrix> data{Gaussian(3000, c, 1.0, rng), Gaussian(2500, c.array() + 2.0, 0.5, rng)};
  EmOptions opts;
  opts.seed = 42;
  const DiagGmm a = TrainGmm(data, 4, opts);
  const DiagGmm b = TrainGmm(data, 4, opts);
  opts.jobs = 3;
  const DiagGmm c3 = TrainGmm(data, 4, opts);
  CHECK(a == b);
  CHECK(a == c3);
  opts.seed = 43;
  CHECK_FALSE(a == TrainGmm(data, 4, opts));
}

TEST_CASE("insufficient data and bad models") {
  std::vector<Matrix> small{Matrix::Random(39, 3)};
  CHECK_THROWS_AS(TrainGmm(small, 4, EmOptions{}), DataError);
  std::vector<Matrix> mixed{Matrix::Random(50, 3), Matrix::Random(50, 4)};
  CHECK_THROWS_AS(TrainGmm(mixed, 1, EmOptions{}), DimensionError);

  Vector w(2);
  w << 0.5, 0.6;
  CHECK_THROWS_AS(DiagGmm(w, Matrix::Zero(2, 2), Matrix::Ones(2, 2)), ConfigError);
  w << 0.5, 0.5;
  CHECK_THROWS_AS(DiagGmm(w, Matrix::Zero(2, 2), Matrix::Zero(2, 2)), ConfigError);
}

TEST_CASE("empty components are re-seeded") {
  // Many identical points plus a few outliers: k-means leaves duplicates of
  // the same centroid whose responsibilities collapse.
  Matrix x = Matrix::Zero(400, 2);
  x.bottomRows(5).setRandom();
  x.bottomRows(5) *= 50.0;
  EmOptions opts;
  opts.seed = 1;
  EmTrace trace;
  const DiagGmm g = TrainGmm(std::vector<Matrix>{x}, 8, opts, &trace);
  CHECK(g.NumComponents() == 8);
  CHECK_NOTHROW(g.Validate(trace.var_floor));
}

TEST_CASE("model text round trip is exact") {
  std::mt19937_64 rng(6);
  const DiagGmm g = RandomGmm(3, 4, rng);
  std::stringstream ss;
  g.Write(ss);
  CHECK(DiagGmm::Read(ss) == g);

  CmPair cm{g, RandomGmm(2, 4, rng), "feedfacefeedface"};
  const std::string path = (std::filesystem::temp_directory_path() / "sbcm_cm.txt").string();
  cm.Write(path);
  const CmPair back = CmPair::Read(path);
  CHECK(back.bona == cm.bona);
  CHECK(back.spoof == cm.spoof);
  CHECK(back.config_hash == cm.config_hash);
  std::filesystem::remove(path);
}

TEST_CASE("LLR scoring") {
  std::mt19937_64 rng(7);
  const DiagGmm a = RandomGmm(3, 4, rng);
  const DiagGmm b = RandomGmm(2, 4, rng);
  const Matrix x = Matrix::Random(30, 4);
  CHECK(LlrScore(CmPair{a, a, ""}, x) == 0.0);
  CHECK(LlrScore(CmPair{a, b, ""}, x) == -LlrScore(CmPair{b, a, ""}, x));

  // Frames drawn from the bona model of a well separated pair score positive.
  const DiagGmm bona(Vector::Ones(1), Matrix::Constant(1, 4, 2.0), Matrix::Ones(1, 4));
  const DiagGmm spoof(Vector::Ones(1), Matrix::Constant(1, 4, -2.0), Matrix::Ones(1, 4));
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Constant(4, 2.0);
  for (int i = 0; i < 20; ++i) CHECK(LlrScore(CmPair{bona, spoof, ""}, Gaussian(20, mu, 1.0, rng)) > 0.0);
  CHECK_THROWS_AS(LlrScore(CmPair{a, b, ""}, Matrix::Random(3, 5)), DimensionError);
}

TEST_CASE("variance floor") {
  Matrix x(4, 2);
  x << 0, 0, 2, 10, 0, 0, 2, 10;
  const Vector f = VarianceFloor(x, 1e-3);
  CHECK(f[0] == doctest::Approx(1e-3));
  CHECK(f[1] == doctest::Approx(25e-3));
  CHECK(VarianceFloor(Matrix::Zero(4, 1), 1e-3)[0] > 0.0);
}
