// sbcm/svm.h

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

#ifndef SBCM_SVM_H_
#define SBCM_SVM_H_

#include "sbcm/common.h"

namespace sbcm {

/// k(x, y) = (gamma * <x, y> + coef0)^degree
struct PolyKernel {
  int degree = 7;
  double gamma = 1.0;
  double coef0 = 1.0;

  double operator()(const Eigen::Ref<const Eigen::RowVectorXd> &a,
                    const Eigen::Ref<const Eigen::RowVectorXd> &b) const;
};

struct SmoOptions {
  double c = 1.0;
  /// Stop when the maximal violating pair gap m(alpha) - M(alpha) <= tol.
  double tol = 1e-3;
  long max_iters = 10000000;
};

struct SmoSolution {
  Vector alpha;
  /// Decision function: sum_i alpha_i y_i k(x_i, x) - rho.
  double rho = 0.0;
  long iterations = 0;
  /// Final maximal KKT violation m(alpha) - M(alpha).
  double kkt_gap = 0.0;
};

/// Soft-margin C-SVM dual solved by SMO with second-order working-set
/// selection. Labels must be +1/-1 with both present. Kernel rows are
/// computed on demand. Throws ConvergenceError when max_iters is exhausted.
SmoSolution SolveSmo(const Matrix &x, const Vector &y, const PolyKernel &kernel,
                     const SmoOptions &opts);

/// Maximal violating pair gap for a candidate dual solution.
double KktGap(const Matrix &x, const Vector &y, const PolyKernel &kernel, const Vector &alpha,
              double c);

}  // namespace sbcm

#endif  // SBCM_SVM_H_
