// sbcm/metrics.cc

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

#include "sbcm/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sbcm/common.h"

namespace sbcm {

namespace {

struct Labeled {
  double score;
  int is_bona;
};

std::vector<Labeled> SortedTrials(const LabeledScores &scores) {
  std::vector<Labeled> all;
  all.reserve(scores.bona.size() + scores.spoof.size());
  for (double s : scores.bona) all.push_back({s, 1});
  for (double s : scores.spoof) all.push_back({s, 0});
  // Callers consume tied scores as one group.
  std::sort(all.begin(), all.end(), [](const Labeled &a, const Labeled &b) {
    return a.score < b.score || (a.score == b.score && a.is_bona < b.is_bona);
  });
  return all;
}

}  // namespace

void LabeledScores::Validate() const {
  if (bona.empty()) throw DataError("scores: no bona fide trials");
  if (spoof.empty()) throw DataError("scores: no spoof trials");
  for (double s : bona)
    if (!std::isfinite(s)) throw DataError("scores: non-finite bona fide score");
  for (double s : spoof)
    if (!std::isfinite(s)) throw DataError("scores: non-finite spoof score");
}

void TdcfCosts::Validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2))
    throw ConfigError("t-DCF costs must be positive and finite");
}

std::vector<RocPoint> RocConvexHull(const LabeledScores &scores) {
  scores.Validate();
  const auto trials = SortedTrials(scores);

  // Pool adjacent violators: blocks of non-decreasing bona fide rate.
  // Ties in score are forced into one block first.
  struct Block {
    double bona;
    double total;
  };
  std::vector<Block> blocks;
  for (size_t i = 0; i < trials.size();) {
    size_t j = i;
    Block b{0.0, 0.0};
    while (j < trials.size() && trials[j].score == trials[i].score) {
      b.bona += trials[j].is_bona;
      b.total += 1.0;
      ++j;
    }
    blocks.push_back(b);
    while (blocks.size() > 1) {
      const Block &last = blocks[blocks.size() - 1];
      const Block &prev = blocks[blocks.size() - 2];
      // Merge while the previous block's rate is >= the last one's.
      if (prev.bona * last.total >= last.bona * prev.total) {
        Block merged{prev.bona + last.bona, prev.total + last.total};
        blocks.pop_back();
        blocks.back() = merged;
      } else {
        break;
      }
    }
    i = j;
  }

  // Each block boundary is a hull vertex. Threshold below everything:
  // every trial accepted -> p_miss = 0, p_fa = 1.
  const double n_bona = static_cast<double>(scores.bona.size());
  const double n_spoof = static_cast<double>(scores.spoof.size());
  std::vector<RocPoint> hull;
  hull.push_back({1.0, 0.0});
  double miss = 0.0, fa = n_spoof;
  for (const Block &b : blocks) {
    miss += b.bona;
    fa -= b.total - b.bona;
    hull.push_back({fa / n_spoof, miss / n_bona});
  }
  return hull;
}

double Eer(const LabeledScores &scores) {
  const auto hull = RocConvexHull(scores);
  double eer = 0.0;
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    const RocPoint a = hull[i], b = hull[i + 1];
    // p_fa decreases and p_miss increases along the hull.
    const double da = a.p_fa - a.p_miss;
    const double db = b.p_fa - b.p_miss;
    double candidate;
    if (da == 0.0 || db == 0.0) {
      candidate = da == 0.0 ? a.p_fa : b.p_fa;
    } else {
      // Line through a and b written as sx * p_fa + sy * p_miss = 1; it meets
      // the diagonal at 1 / (sx + sy). Edges lying on an axis pass through
      // the origin (det == 0) and contribute 0.
      const double det = a.p_fa * b.p_miss - a.p_miss * b.p_fa;
      if (det == 0.0) {
        candidate = 0.0;
      } else {
        const double sx = (b.p_miss - a.p_miss) / det;
        const double sy = (a.p_fa - b.p_fa) / det;
        candidate = 1.0 / (sx + sy);
      }
    }
    eer = std::max(eer, candidate);
  }
  return eer;
}

std::vector<RocPoint> RocPoints(const LabeledScores &scores) {
  scores.Validate();
  const auto trials = SortedTrials(scores);
  const double n_bona = static_cast<double>(scores.bona.size());
  const double n_spoof = static_cast<double>(scores.spoof.size());
  std::vector<RocPoint> out;
  out.push_back({1.0, 0.0});
  double miss = 0.0, fa = n_spoof;
  for (size_t i = 0; i < trials.size();) {
    size_t j = i;
    while (j < trials.size() && trials[j].score == trials[i].score) {
      if (trials[j].is_bona)
        miss += 1.0;
      else
        fa -= 1.0;
      ++j;
    }
    out.push_back({fa / n_spoof, miss / n_bona});
    i = j;
  }
  return out;
}

TdcfResult MinTdcf(const LabeledScores &scores, const TdcfCosts &costs) {
  scores.Validate();
  costs.Validate();
  const auto trials = SortedTrials(scores);
  const double n_bona = static_cast<double>(scores.bona.size());
  const double n_spoof = static_cast<double>(scores.spoof.size());
  const double norm = std::min(costs.c1, costs.c2);
  auto cost = [&](double miss, double fa) {
    return (costs.c1 * (miss / n_bona) + costs.c2 * (fa / n_spoof)) / norm;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Threshold -inf: accept everything.
  TdcfResult best{cost(0.0, n_spoof), -kInf};
  double miss = 0.0, fa = n_spoof;
  for (size_t i = 0; i < trials.size();) {
    size_t j = i;
    while (j < trials.size() && trials[j].score == trials[i].score) {
      if (trials[j].is_bona)
        miss += 1.0;
      else
        fa -= 1.0;
      ++j;
    }
    const double threshold =
        j < trials.size() ? 0.5 * (trials[i].score + trials[j].score) : kInf;
    const double c = cost(miss, fa);
    if (c <= best.value) best = {c, threshold};
    i = j;
  }
  return best;
}

double Bhattacharyya(double mu_b, double sigma_b, double mu_s, double sigma_s) {
  if (!(sigma_b > 0.0) || !(sigma_s > 0.0))
    throw DataError("bhattacharyya: standard deviations must be positive");
  const double vb = sigma_b * sigma_b;
  const double vs = sigma_s * sigma_s;
  const double diff = mu_b - mu_s;
  return 0.25 * std::log(0.25 * (vb / vs + vs / vb + 2.0)) + 0.25 * (diff * diff / (vb + vs));
}

ScoreGaussians FitScoreGaussians(const LabeledScores &scores) {
  scores.Validate();
  auto fit = [](const std::vector<double> &x, const char *what) {
    if (x.size() < 2)
      throw DataError(std::string("score gaussians: need >= 2 ") + what + " scores");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    if (!(sd > 0.0))
      throw DataError(std::string("score gaussians: ") + what + " scores are constant");
    return std::pair{mean, sd};
  };
  const auto [mb, sb] = fit(scores.bona, "bona fide");
  const auto [ms, ss] = fit(scores.spoof, "spoof");
  return {mb, sb, ms, ss};
}

}  // namespace sbcm
