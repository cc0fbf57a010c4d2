// sbcm/metrics.h

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

#ifndef SBCM_METRICS_H_
#define SBCM_METRICS_H_

#include <vector>

namespace sbcm {

/// CM scores split by ground truth. Higher scores mean "more bona fide".
struct LabeledScores {
  std::vector<double> bona;
  std::vector<double> spoof;

  /// Throws DataError if a class is empty or a score is not finite.
  void Validate() const;
};

/// CM miss and false-alarm weights of the normalised t-DCF, already folded
/// with the ASV operating point and cost model.
struct TdcfCosts {
  double c1 = 1.0;
  double c2 = 10.0;

  void Validate() const;
};

struct RocPoint {
  double p_fa;
  double p_miss;
};

/// Vertices of the ROC convex hull, ordered from (p_fa=1, p_miss=0) to
/// (p_fa=0, p_miss=1). Computed with pool-adjacent-violators on the
/// score-sorted labels.
std::vector<RocPoint> RocConvexHull(const LabeledScores &scores);

/// Equal error rate on the ROC convex hull, in [0, 0.5].
double Eer(const LabeledScores &scores);

/// Every (p_fa, p_miss) operating point of the empirical ROC, one per
/// distinct threshold plus both extremes. Used for DET-style TSV output.
std::vector<RocPoint> RocPoints(const LabeledScores &scores);

struct TdcfResult {
  double value;
  double threshold;  // may be +-infinity
};

/// min over thresholds of (c1 P_miss + c2 P_fa) / min(c1, c2). A trial is
/// accepted as bona fide when its score is >= the threshold; thresholds are
/// every midpoint between adjacent distinct scores plus +-infinity.
TdcfResult MinTdcf(const LabeledScores &scores, const TdcfCosts &costs);

/// Bhattacharyya distance between two univariate Gaussians given by mean
/// and standard deviation. Throws DataError for non-positive deviations.
double Bhattacharyya(double mu_b, double sigma_b, double mu_s, double sigma_s);

struct ScoreGaussians {
  double mu_b, sigma_b, mu_s, sigma_s;
};

/// Per-class sample mean and unbiased standard deviation. Needs >= 2 scores
/// per class; a constant class (sigma = 0) is a DataError.
ScoreGaussians FitScoreGaussians(const LabeledScores &scores);

}  // namespace sbcm

#endif  // SBCM_METRICS_H_
