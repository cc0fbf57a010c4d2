// sbcm/gmm.cc

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

#include "sbcm/gmm.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace sbcm {

namespace {

constexpr double kAbsoluteVarFloor = 1e-10;
// A component whose soft count falls below this is treated as empty.
constexpr double kEmptyCount = 1e-6;
// Rows per E-step work item. Fixed so the reduction order never depends on
// the number of threads.
constexpr Eigen::Index kChunkRows = 2048;

std::string Fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string &tok) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception &) {
    throw IoError("gmm: bad number '" + tok + "'");
  }
  if (used != tok.size()) throw IoError("gmm: bad number '" + tok + "'");
  return v;
}

void Expect(std::istream &is, const std::string &word) {
  std::string tok;
  if (!(is >> tok) || tok != word)
    throw IoError("gmm: expected '" + word + "', got '" + tok + "'");
}

template <typename T>
T ReadValue(std::istream &is, const char *what) {
  T v{};
  if (!(is >> v)) throw IoError(std::string("gmm: cannot read ") + what);
  return v;
}

double LogSumExp(const Eigen::Ref<const Eigen::RowVectorXd> &row) {
  const double m = row.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((row.array() - m).exp().sum());
}

struct SuffStats {
  double loglik = 0.0;
  Vector occ;
  Matrix first;
  Matrix second;
  double worst_ll = std::numeric_limits<double>::infinity();
  Eigen::Index worst_row = 0;

  void Reset(int k, int d) {
    loglik = 0.0;
    occ = Vector::Zero(k);
    first = Matrix::Zero(k, d);
    second = Matrix::Zero(k, d);
    worst_ll = std::numeric_limits<double>::infinity();
    worst_row = 0;
  }
};

}  // namespace

DiagGmm::DiagGmm(Vector weights, Matrix means, Matrix vars)
    : weights_(std::move(weights)), means_(std::move(means)), vars_(std::move(vars)) {
  if (means_.rows() != weights_.size() || vars_.rows() != weights_.size() ||
      vars_.cols() != means_.cols())
    throw ConfigError("gmm: inconsistent parameter shapes");
  Validate();
  Precompute();
}

void DiagGmm::Validate(double var_floor) const {
  Validate(Vector::Constant(Dim(), var_floor));
}

void DiagGmm::Validate(const Vector &var_floor) const {
  if (weights_.size() == 0) throw ConfigError("gmm: no components");
  if (!weights_.allFinite() || !means_.allFinite() || !vars_.allFinite())
    throw ConfigError("gmm: non-finite parameter");
  if ((weights_.array() < 0.0).any()) throw ConfigError("gmm: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-10) throw ConfigError("gmm: weights do not sum to 1");
  for (int k = 0; k < NumComponents(); ++k)
    for (int d = 0; d < Dim(); ++d)
      if (!(vars_(k, d) > 0.0) || vars_(k, d) < var_floor[d])
        throw ConfigError("gmm: variance below floor");
}

void DiagGmm::Precompute() {
  const int d = Dim();
  inv_vars_ = vars_.cwiseInverse();
  means_inv_vars_ = means_.cwiseProduct(inv_vars_);
  gconsts_.resize(NumComponents());
  for (int k = 0; k < NumComponents(); ++k) {
    gconsts_[k] = std::log(weights_[k]) -
                  0.5 * (d * std::log(2.0 * std::numbers::pi) + vars_.row(k).array().log().sum() +
                         means_.row(k).dot(means_inv_vars_.row(k)));
  }
}

Matrix DiagGmm::ComponentLogLikelihoods(const Matrix &feats) const {
  if (feats.cols() != Dim())
    throw DimensionError("gmm: features have " + std::to_string(feats.cols()) +
                         " dims, model has " + std::to_string(Dim()));
  Matrix ll = feats * means_inv_vars_.transpose();
  ll.noalias() -= 0.5 * feats.cwiseAbs2() * inv_vars_.transpose();
  ll.rowwise() += gconsts_.transpose();
  return ll;
}

Vector DiagGmm::FrameLogLikelihoods(const Matrix &feats) const {
  const Matrix ll = ComponentLogLikelihoods(feats);
  Vector out(ll.rows());
  for (Eigen::Index t = 0; t < ll.rows(); ++t) out[t] = LogSumExp(ll.row(t));
  return out;
}

double DiagGmm::LogLikelihood(const Matrix &feats) const {
  if (feats.rows() == 0) throw DataError("gmm: no frames to score");
  return FrameLogLikelihoods(feats).mean();
}

void DiagGmm::Write(std::ostream &os) const {
  os << "sbcm-gmm 1\n";
  os << "components " << NumComponents() << " dims " << Dim() << "\n";
  os << "weights";
  for (int k = 0; k < NumComponents(); ++k) os << ' ' << Fmt17(weights_[k]);
  os << "\n";
  for (int k = 0; k < NumComponents(); ++k) {
    os << "mean";
    for (int d = 0; d < Dim(); ++d) os << ' ' << Fmt17(means_(k, d));
    os << "\nvar";
    for (int d = 0; d < Dim(); ++d) os << ' ' << Fmt17(vars_(k, d));
    os << "\n";
  }
}

DiagGmm DiagGmm::Read(std::istream &is) {
  Expect(is, "sbcm-gmm");
  if (ReadValue<int>(is, "version") != 1) throw IoError("gmm: unsupported version");
  Expect(is, "components");
  const int k = ReadValue<int>(is, "component count");
  Expect(is, "dims");
  const int d = ReadValue<int>(is, "dimension");
  if (k < 1 || d < 1) throw IoError("gmm: bad shape");
  Vector w(k);
  Matrix means(k, d), vars(k, d);
  Expect(is, "weights");
  for (int i = 0; i < k; ++i) w[i] = ParseDouble(ReadValue<std::string>(is, "weight"));
  for (int i = 0; i < k; ++i) {
    Expect(is, "mean");
    for (int j = 0; j < d; ++j) means(i, j) = ParseDouble(ReadValue<std::string>(is, "mean"));
    Expect(is, "var");
    for (int j = 0; j < d; ++j) vars(i, j) = ParseDouble(ReadValue<std::string>(is, "var"));
  }
  try {
    return DiagGmm(std::move(w), std::move(means), std::move(vars));
  } catch (const ConfigError &e) {
    throw IoError(std::string("gmm file: ") + e.what());
  }
}

Vector VarianceFloor(const Matrix &frames, double ratio) {
  const Eigen::RowVectorXd mean = frames.colwise().mean();
  const Eigen::RowVectorXd var =
      (frames.rowwise() - mean).cwiseAbs2().colwise().sum() / static_cast<double>(frames.rows());
  return (ratio * var.transpose()).cwiseMax(kAbsoluteVarFloor);
}

Matrix KMeans(const Matrix &frames, int k, int iters, uint64_t seed,
              std::vector<int> *assignment) {
  const Eigen::Index n = frames.rows();
  if (k < 1 || n < k) throw DataError("kmeans: need at least K frames");
  std::mt19937_64 rng(seed);
  Matrix centres(k, frames.cols());

  // k-means++ seeding.
  Vector dist2(n);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centres.row(0) = frames.row(pick(rng));
  dist2 = (frames.rowwise() - centres.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (chosen = 0; chosen + 1 < n; ++chosen) {
        r -= dist2[chosen];
        if (r < 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    centres.row(c) = frames.row(chosen);
    dist2 = dist2.cwiseMin((frames.rowwise() - centres.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(n, 0);
  for (int it = 0; it <= iters; ++it) {
    // Assignment.
    Vector best(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      Eigen::Index idx;
      best[t] = (centres.rowwise() - frames.row(t)).rowwise().squaredNorm().minCoeff(&idx);
      assign[t] = static_cast<int>(idx);
    }
    if (it == iters) break;
    // Update; empty clusters take the frame farthest from its centre.
    Matrix sums = Matrix::Zero(k, frames.cols());
    std::vector<Eigen::Index> counts(k, 0);
    for (Eigen::Index t = 0; t < n; ++t) {
      sums.row(assign[t]) += frames.row(t);
      ++counts[assign[t]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centres.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        Eigen::Index far;
        best.maxCoeff(&far);
        centres.row(c) = frames.row(far);
        best[far] = 0.0;
      }
    }
  }
  if (assignment) *assignment = std::move(assign);
  return centres;
}

DiagGmm TrainGmm(std::span<const Matrix> features, int num_components, const EmOptions &opts,
                 EmTrace *trace, const EmObserver &observer) {
  if (num_components < 1) throw ConfigError("gmm: need at least one component");
  if (features.empty()) throw DataError("gmm: no training features");
  const Eigen::Index dim = features.front().cols();
  Eigen::Index total = 0;
  for (const auto &f : features) {
    if (f.cols() != dim) throw DimensionError("gmm: inconsistent feature dimensions");
    total += f.rows();
  }
  if (total < 10 * static_cast<Eigen::Index>(num_components))
    throw DataError("gmm: " + std::to_string(total) + " frames is fewer than 10*K = " +
                    std::to_string(10 * num_components));
  if (dim < 1) throw DimensionError("gmm: zero-dimensional features");

  Matrix frames(total, dim);
  {
    Eigen::Index row = 0;
    for (const auto &f : features) {
      frames.middleRows(row, f.rows()) = f;
      row += f.rows();
    }
  }
  if (!frames.allFinite()) throw DataError("gmm: non-finite training features");
  const Matrix frames_sq = frames.cwiseAbs2();
  const int k = num_components;
  const Vector floor = VarianceFloor(frames, opts.var_floor_ratio);

  // Initialise from hard k-means clusters.
  std::vector<int> assign;
  const Matrix centres = KMeans(frames, k, opts.kmeans_iters, DeriveSeed(opts.seed, "kmeans"),
                                &assign);
  Vector w = Vector::Zero(k);
  Matrix means = centres;
  Matrix vars = Matrix::Zero(k, dim);
  for (Eigen::Index t = 0; t < total; ++t) {
    w[assign[t]] += 1.0;
    vars.row(assign[t]) += (frames.row(t) - centres.row(assign[t])).cwiseAbs2();
  }
  for (int c = 0; c < k; ++c) {
    if (w[c] > 0.0) vars.row(c) /= w[c];
    vars.row(c) = vars.row(c).cwiseMax(floor.transpose());
  }
  // Every k-means cluster is non-empty after the final assignment unless
  // frames coincide; give any empty one a small share.
  for (int c = 0; c < k; ++c)
    if (w[c] == 0.0) w[c] = 1.0;
  w /= w.sum();
  DiagGmm model(w, means, vars);

  EmTrace local;
  EmTrace &tr = trace ? *trace : local;
  tr = EmTrace{};
  tr.var_floor = floor;

  const Eigen::Index n_chunks = (total + kChunkRows - 1) / kChunkRows;
  std::vector<SuffStats> partial(n_chunks);
  double prev = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    ParallelFor(static_cast<size_t>(n_chunks), opts.jobs, [&](size_t c) {
      const Eigen::Index start = static_cast<Eigen::Index>(c) * kChunkRows;
      const Eigen::Index rows = std::min(kChunkRows, total - start);
      SuffStats &s = partial[c];
      s.Reset(k, static_cast<int>(dim));
      Matrix post = model.ComponentLogLikelihoods(frames.middleRows(start, rows));
      for (Eigen::Index t = 0; t < rows; ++t) {
        const double lse = LogSumExp(post.row(t));
        s.loglik += lse;
        if (lse < s.worst_ll) {
          s.worst_ll = lse;
          s.worst_row = start + t;
        }
        post.row(t) = (post.row(t).array() - lse).exp();
      }
      s.occ = post.colwise().sum().transpose();
      s.first.noalias() = post.transpose() * frames.middleRows(start, rows);
      s.second.noalias() = post.transpose() * frames_sq.middleRows(start, rows);
    });
    SuffStats acc;
    acc.Reset(k, static_cast<int>(dim));
    for (const auto &s : partial) {
      acc.loglik += s.loglik;
      acc.occ += s.occ;
      acc.first += s.first;
      acc.second += s.second;
      if (s.worst_ll < acc.worst_ll) {
        acc.worst_ll = s.worst_ll;
        acc.worst_row = s.worst_row;
      }
    }
    const double avg = acc.loglik / static_cast<double>(total);
    if (!std::isfinite(avg)) throw DataError("gmm: non-finite log-likelihood during EM");
    tr.avg_loglik.push_back(avg);
    if (iter > 0 && avg - prev < opts.tol * std::abs(prev)) {
      tr.converged = true;
      break;
    }
    prev = avg;

    // M-step.
    Vector new_w(k);
    Matrix new_means(k, dim), new_vars(k, dim);
    for (int c = 0; c < k; ++c) {
      const double occ = acc.occ[c];
      if (occ < kEmptyCount) {
        // Re-seed at the worst-explained frame with the pooled variance.
        new_means.row(c) = frames.row(acc.worst_row);
        new_vars.row(c) = (floor / opts.var_floor_ratio).transpose().cwiseMax(floor.transpose());
        new_w[c] = 1.0 / static_cast<double>(total);
        ++tr.reseeded_components;
        continue;
      }
      new_w[c] = occ / static_cast<double>(total);
      new_means.row(c) = acc.first.row(c) / occ;
      new_vars.row(c) = (acc.second.row(c) / occ - new_means.row(c).cwiseAbs2())
                            .cwiseMax(floor.transpose());
    }
    new_w /= new_w.sum();
    model = DiagGmm(std::move(new_w), std::move(new_means), std::move(new_vars));
    if (observer) observer(iter, model);
  }
  return model;
}

void CmPair::Write(const std::string &path) const {
  if (bona.Dim() != spoof.Dim()) throw DimensionError("cm: model dimensions differ");
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "sbcm-cm 1\nconfig_hash " << config_hash << "\nbona\n";
  bona.Write(os);
  os << "spoof\n";
  spoof.Write(os);
  if (!os) throw IoError("write failed: " + path);
}

CmPair CmPair::Read(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  CmPair cm;
  Expect(is, "sbcm-cm");
  if (ReadValue<int>(is, "version") != 1) throw IoError(path + ": unsupported version");
  Expect(is, "config_hash");
  cm.config_hash = ReadValue<std::string>(is, "config hash");
  Expect(is, "bona");
  cm.bona = DiagGmm::Read(is);
  Expect(is, "spoof");
  cm.spoof = DiagGmm::Read(is);
  if (cm.bona.Dim() != cm.spoof.Dim()) throw IoError(path + ": model dimensions differ");
  return cm;
}

CmPair TrainCmPair(std::span<const Matrix> bona, std::span<const Matrix> spoof, int num_components,
                   const EmOptions &opts, const std::string &config_hash) {
  CmPair cm;
  cm.config_hash = config_hash;
  EmOptions em = opts;
  em.seed = DeriveSeed(opts.seed, "cm-pair");
  cm.bona = TrainGmm(bona, num_components, em);
  cm.spoof = TrainGmm(spoof, num_components, em);
  return cm;
}

double LlrScore(const CmPair &cm, const Matrix &feats) {
  return cm.bona.LogLikelihood(feats) - cm.spoof.LogLikelihood(feats);
}

}  // namespace sbcm
