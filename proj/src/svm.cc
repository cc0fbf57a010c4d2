// sbcm/svm.cc

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

#include "sbcm/svm.h"

#include <cmath>
#include <limits>

namespace sbcm {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double IntPow(double base, int exp) {
  double r = 1.0;
  while (exp > 0) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

// Row of Q_ij = y_i y_j k(x_i, x_j).
void QRow(const Matrix &x, const Vector &y, const PolyKernel &kernel, Eigen::Index i, Vector *row) {
  const Eigen::Index n = x.rows();
  row->resize(n);
  for (Eigen::Index t = 0; t < n; ++t) (*row)[t] = y[i] * y[t] * kernel(x.row(i), x.row(t));
}

struct Bounds {
  const Vector &alpha;
  double c;
  bool Upper(Eigen::Index t) const { return alpha[t] >= c; }
  bool Lower(Eigen::Index t) const { return alpha[t] <= 0.0; }
};

// Max of -y_t G_t over I_up and min over I_low, as m and M.
std::pair<double, double> ViolationRange(const Vector &y, const Vector &grad, const Bounds &b) {
  double m = -kInf, big_m = kInf;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    const double v = -y[t] * grad[t];
    const bool up = y[t] > 0 ? !b.Upper(t) : !b.Lower(t);
    const bool low = y[t] > 0 ? !b.Lower(t) : !b.Upper(t);
    if (up) m = std::max(m, v);
    if (low) big_m = std::min(big_m, v);
  }
  return {m, big_m};
}

}  // namespace

double PolyKernel::operator()(const Eigen::Ref<const Eigen::RowVectorXd> &a,
                              const Eigen::Ref<const Eigen::RowVectorXd> &b) const {
  return IntPow(gamma * a.dot(b) + coef0, degree);
}

double KktGap(const Matrix &x, const Vector &y, const PolyKernel &kernel, const Vector &alpha,
              double c) {
  const Eigen::Index n = x.rows();
  Vector grad = -Vector::Ones(n);
  Vector row;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    QRow(x, y, kernel, i, &row);
    grad += alpha[i] * row;
  }
  const auto [m, big_m] = ViolationRange(y, grad, Bounds{alpha, c});
  return m - big_m;
}

SmoSolution SolveSmo(const Matrix &x, const Vector &y, const PolyKernel &kernel,
                     const SmoOptions &opts) {
  const Eigen::Index n = x.rows();
  if (y.size() != n) throw DimensionError("smo: label count differs from sample count");
  bool pos = false, neg = false;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (y[t] == 1.0)
      pos = true;
    else if (y[t] == -1.0)
      neg = true;
    else
      throw DataError("smo: labels must be +1 or -1");
  }
  if (!pos || !neg) throw DataError("smo: both classes are required");
  if (!(opts.c > 0.0)) throw ConfigError("smo: C must be positive");
  if (!(opts.tol > 0.0)) throw ConfigError("smo: tol must be positive");

  const double c = opts.c;
  SmoSolution sol;
  sol.alpha = Vector::Zero(n);
  Vector &alpha = sol.alpha;
  Vector grad = -Vector::Ones(n);
  Vector qd(n);
  for (Eigen::Index t = 0; t < n; ++t) qd[t] = kernel(x.row(t), x.row(t));
  const Bounds bounds{alpha, c};
  Vector qi, qj;

  for (;;) {
    // Working set: i maximises -y G over I_up; j minimises the second-order
    // objective decrease over I_low.
    double gmax = -kInf, gmax2 = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!bounds.Upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!bounds.Lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    Eigen::Index j = -1;
    if (i >= 0) {
      QRow(x, y, kernel, i, &qi);
      double best = kInf;
      for (Eigen::Index t = 0; t < n; ++t) {
        if (y[t] > 0) {
          if (bounds.Lower(t)) continue;
          const double diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
          if (diff > 0.0) {
            double quad = qd[i] + qd[t] - 2.0 * y[i] * qi[t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= best) {
              best = obj;
              j = t;
            }
          }
        } else {
          if (bounds.Upper(t)) continue;
          const double diff = gmax - grad[t];
          gmax2 = std::max(gmax2, -grad[t]);
          if (diff > 0.0) {
            double quad = qd[i] + qd[t] + 2.0 * y[i] * qi[t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= best) {
              best = obj;
              j = t;
            }
          }
        }
      }
    }
    sol.kkt_gap = gmax + gmax2;
    if (i < 0 || j < 0 || sol.kkt_gap <= opts.tol) break;
    if (sol.iterations >= opts.max_iters)
      throw ConvergenceError("smo: no convergence after " + std::to_string(opts.max_iters) +
                             " iterations (KKT gap " + FormatDouble(sol.kkt_gap) + ")");
    ++sol.iterations;

    QRow(x, y, kernel, j, &qj);
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = qd[i] + qd[j] + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = qd[i] + qd[j] - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    grad += di * qi + dj * qj;
  }

  // rho from free vectors, or the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (bounds.Upper(t)) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (bounds.Lower(t)) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  sol.rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  return sol;
}

}  // namespace sbcm
