// sbcm/fusion.cc

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

#include "sbcm/fusion.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace sbcm {

namespace {

std::string Fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix WithBiasColumn(const Matrix &x) {
  Matrix out(x.rows(), x.cols() + 1);
  out << x, Vector::Ones(x.rows());
  return out;
}

// f(theta), filling gradient and Hessian when requested.
using Objective = std::function<double(const Vector &, Vector *, Matrix *)>;

// Damped Newton iterations with backtracking on the objective.
Vector NewtonMinimize(Vector theta, const Objective &objective, int max_iters, double tol) {
  Vector grad;
  Matrix hess;
  double f = objective(theta, &grad, &hess);
  for (int it = 0; it < max_iters; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < tol) break;
    const Vector step = hess.ldlt().solve(-grad);
    double t = 1.0;
    Vector next;
    double f_next = f;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      next = theta + t * step;
      f_next = objective(next, nullptr, nullptr);
      if (f_next <= f + 1e-4 * t * grad.dot(step)) {
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const bool stalled = f - f_next <= 1e-15 * std::max(1.0, std::abs(f));
    theta = std::move(next);
    f = objective(theta, &grad, &hess);
    if (stalled) break;
  }
  return theta;
}

double LogSumExp(const Eigen::Ref<const Eigen::RowVectorXd> &row) {
  const double m = row.maxCoeff();
  return m + std::log((row.array() - m).exp().sum());
}

void WriteVector(std::ostream &os, const char *name, const Vector &v) {
  os << name;
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << Fmt17(v[i]);
  os << '\n';
}

std::string Token(std::istream &is, const std::string &what) {
  std::string tok;
  if (!(is >> tok)) throw IoError("fusion model: missing " + what);
  return tok;
}

void Expect(std::istream &is, const std::string &word) {
  const std::string tok = Token(is, "'" + word + "'");
  if (tok != word) throw IoError("fusion model: expected '" + word + "', got '" + tok + "'");
}

double Number(std::istream &is, const std::string &what) {
  const std::string tok = Token(is, what);
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != tok.size()) throw IoError("fusion model: bad number '" + tok + "' for " + what);
  return v;
}

int Integer(std::istream &is, const std::string &what) {
  const double v = Number(is, what);
  if (v != std::floor(v) || v < 0 || v > 1e9) throw IoError("fusion model: bad integer for " + what);
  return static_cast<int>(v);
}

Vector ReadVector(std::istream &is, const std::string &name, Eigen::Index n) {
  Expect(is, name);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Number(is, name);
  return v;
}

}  // namespace

std::string FusionKindName(FusionKind kind) {
  switch (kind) {
    case FusionKind::kLinear:
      return "linear";
    case FusionKind::kMultinomial:
      return "multinomial";
    case FusionKind::kGmm:
      return "gmm";
    case FusionKind::kSvmPoly:
      return "svm-poly";
  }
  return "?";
}

FusionKind ParseFusionKind(const std::string &name) {
  for (auto k : {FusionKind::kLinear, FusionKind::kMultinomial, FusionKind::kGmm, FusionKind::kSvmPoly})
    if (FusionKindName(k) == name) return k;
  throw ConfigError("unknown fusion kind '" + name + "' (linear, multinomial, gmm, svm-poly)");
}

Standardizer Standardizer::Fit(const Matrix &x) {
  if (x.rows() == 0) throw DataError("standardizer: no data");
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale = ((x.rowwise() - s.mean.transpose()).cwiseAbs2().colwise().sum() /
             static_cast<double>(x.rows()))
                .cwiseSqrt()
                .transpose();
  for (Eigen::Index d = 0; d < s.scale.size(); ++d)
    if (!(s.scale[d] > 0.0)) s.scale[d] = 1.0;
  return s;
}

Matrix Standardizer::Apply(const Matrix &x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

FusionModel::FusionModel(int dim, Params params) : dim_(dim), params_(std::move(params)) {
  if (dim_ < 1) throw ConfigError("fusion model: dimension must be >= 1");
  std::visit(
      [&](const auto &p) {
        using T = std::decay_t<decltype(p)>;
        bool ok = true;
        if constexpr (std::is_same_v<T, LinearParams>) {
          ok = p.weights.size() == dim_;
        } else if constexpr (std::is_same_v<T, MultinomialParams>) {
          ok = p.classes.size() >= 2 && p.weights.rows() == static_cast<Eigen::Index>(p.classes.size()) &&
               p.weights.cols() == dim_ && p.bias.size() == p.weights.rows();
        } else if constexpr (std::is_same_v<T, GmmFusionParams>) {
          ok = p.bona.Dim() == dim_ && p.spoof.Dim() == dim_ && p.standardizer.mean.size() == dim_ &&
               p.standardizer.scale.size() == dim_;
        } else {
          ok = p.support.cols() == dim_ && p.coef.size() == p.support.rows() &&
               p.standardizer.mean.size() == dim_ && p.standardizer.scale.size() == dim_;
        }
        if (!ok) throw ConfigError("fusion model: parameter shapes inconsistent with dimension");
      },
      params_);
}

FusionKind FusionModel::kind() const {
  return static_cast<FusionKind>(params_.index());
}

Vector FusionModel::Score(const Matrix &x) const {
  if (x.cols() != dim_)
    throw DimensionError("fusion: score vectors have dimension " + std::to_string(x.cols()) +
                         ", model expects " + std::to_string(dim_));
  return std::visit(
      [&](const auto &p) -> Vector {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          return (x * p.weights).array() + p.bias;
        } else if constexpr (std::is_same_v<T, MultinomialParams>) {
          Matrix logits = x * p.weights.transpose();
          logits.rowwise() += p.bias.transpose();
          Vector out(x.rows());
          for (Eigen::Index t = 0; t < x.rows(); ++t)
            out[t] = logits(t, 0) - LogSumExp(logits.row(t).tail(logits.cols() - 1));
          return out;
        } else if constexpr (std::is_same_v<T, GmmFusionParams>) {
          const Matrix z = p.standardizer.Apply(x);
          return p.bona.FrameLogLikelihoods(z) - p.spoof.FrameLogLikelihoods(z);
        } else {
          const Matrix z = p.standardizer.Apply(x);
          Vector out(x.rows());
          for (Eigen::Index t = 0; t < x.rows(); ++t) {
            double f = -p.rho;
            for (Eigen::Index s = 0; s < p.support.rows(); ++s)
              f += p.coef[s] * p.kernel(p.support.row(s), z.row(t));
            out[t] = f;
          }
          return out;
        }
      },
      params_);
}

std::vector<ScoreRecord> FusionModel::Fuse(const ScoreVectorSet &set) const {
  set.Validate();
  if (set.size() > 0 && set.Dim() != dim_)
    throw DimensionError("fusion: score vectors have dimension " + std::to_string(set.Dim()) +
                         ", model expects " + std::to_string(dim_));
  const Vector fused = set.size() > 0 ? Score(set.AsMatrix()) : Vector();
  std::vector<ScoreRecord> out;
  out.reserve(set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    const auto &t = set.trials[i];
    out.push_back({t.utterance_id, t.attack_id, t.bonafide, fused[static_cast<Eigen::Index>(i)]});
  }
  return out;
}

void FusionModel::Write(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "sbcm-fusion 1\nkind " << FusionKindName(kind()) << "\ndim " << dim_ << '\n';
  std::visit(
      [&](const auto &p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          WriteVector(os, "weights", p.weights);
          os << "bias " << Fmt17(p.bias) << '\n';
        } else if constexpr (std::is_same_v<T, MultinomialParams>) {
          os << "classes " << p.classes.size();
          for (const auto &c : p.classes) os << ' ' << c;
          os << '\n';
          for (Eigen::Index k = 0; k < p.weights.rows(); ++k) {
            os << "bias " << Fmt17(p.bias[k]) << '\n';
            WriteVector(os, "weights", p.weights.row(k).transpose());
          }
        } else if constexpr (std::is_same_v<T, GmmFusionParams>) {
          WriteVector(os, "mean", p.standardizer.mean);
          WriteVector(os, "scale", p.standardizer.scale);
          os << "bona\n";
          p.bona.Write(os);
          os << "spoof\n";
          p.spoof.Write(os);
        } else {
          WriteVector(os, "mean", p.standardizer.mean);
          WriteVector(os, "scale", p.standardizer.scale);
          os << "degree " << p.kernel.degree << "\ngamma " << Fmt17(p.kernel.gamma) << "\ncoef0 "
             << Fmt17(p.kernel.coef0) << "\nrho " << Fmt17(p.rho) << "\nsupport "
             << p.support.rows() << '\n';
          for (Eigen::Index s = 0; s < p.support.rows(); ++s) {
            os << "sv " << Fmt17(p.coef[s]);
            for (Eigen::Index d = 0; d < p.support.cols(); ++d) os << ' ' << Fmt17(p.support(s, d));
            os << '\n';
          }
        }
      },
      params_);
  if (!os) throw IoError("write failed: " + path);
}

FusionModel FusionModel::Read(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  Expect(is, "sbcm-fusion");
  if (Integer(is, "version") != 1) throw IoError(path + ": unsupported fusion model version");
  Expect(is, "kind");
  FusionKind kind;
  try {
    kind = ParseFusionKind(Token(is, "kind"));
  } catch (const ConfigError &e) {
    throw IoError(path + ": " + e.what());
  }
  Expect(is, "dim");
  const int dim = Integer(is, "dim");
  if (dim < 1) throw IoError(path + ": bad dimension");
  try {
    switch (kind) {
      case FusionKind::kLinear: {
        LinearParams p;
        p.weights = ReadVector(is, "weights", dim);
        Expect(is, "bias");
        p.bias = Number(is, "bias");
        return FusionModel(dim, p);
      }
      case FusionKind::kMultinomial: {
        MultinomialParams p;
        Expect(is, "classes");
        const int c = Integer(is, "class count");
        for (int k = 0; k < c; ++k) p.classes.push_back(Token(is, "class name"));
        p.weights.resize(c, dim);
        p.bias.resize(c);
        for (int k = 0; k < c; ++k) {
          Expect(is, "bias");
          p.bias[k] = Number(is, "bias");
          p.weights.row(k) = ReadVector(is, "weights", dim).transpose();
        }
        return FusionModel(dim, p);
      }
      case FusionKind::kGmm: {
        GmmFusionParams p;
        p.standardizer.mean = ReadVector(is, "mean", dim);
        p.standardizer.scale = ReadVector(is, "scale", dim);
        Expect(is, "bona");
        p.bona = DiagGmm::Read(is);
        Expect(is, "spoof");
        p.spoof = DiagGmm::Read(is);
        return FusionModel(dim, p);
      }
      case FusionKind::kSvmPoly: {
        SvmParams p;
        p.standardizer.mean = ReadVector(is, "mean", dim);
        p.standardizer.scale = ReadVector(is, "scale", dim);
        Expect(is, "degree");
        p.kernel.degree = Integer(is, "degree");
        Expect(is, "gamma");
        p.kernel.gamma = Number(is, "gamma");
        Expect(is, "coef0");
        p.kernel.coef0 = Number(is, "coef0");
        Expect(is, "rho");
        p.rho = Number(is, "rho");
        Expect(is, "support");
        const int s = Integer(is, "support count");
        p.support.resize(s, dim);
        p.coef.resize(s);
        for (int i = 0; i < s; ++i) {
          Expect(is, "sv");
          p.coef[i] = Number(is, "coefficient");
          for (int d = 0; d < dim; ++d) p.support(i, d) = Number(is, "support vector");
        }
        return FusionModel(dim, p);
      }
    }
  } catch (const ConfigError &e) {
    throw IoError(path + ": " + e.what());
  }
  throw IoError(path + ": unreachable fusion kind");
}

FusionModel TrainLinearFusion(const ScoreVectorSet &train, const LinearFusionOptions &opts) {
  train.ValidateForTraining();
  if (!(opts.prior > 0.0 && opts.prior < 1.0)) throw ConfigError("linear fusion: prior must be in (0, 1)");
  const Matrix x = WithBiasColumn(train.AsMatrix());
  const Eigen::Index n = x.rows(), p = x.cols();
  double n_bona = 0.0;
  for (const auto &t : train.trials) n_bona += t.bonafide ? 1.0 : 0.0;
  const double n_spoof = static_cast<double>(n) - n_bona;
  Vector target(n), weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool bona = train.trials[static_cast<size_t>(i)].bonafide;
    target[i] = bona ? 1.0 : 0.0;
    weight[i] = bona ? opts.prior / n_bona : (1.0 - opts.prior) / n_spoof;
  }
  const double offset = std::log(opts.prior / (1.0 - opts.prior));

  const Objective objective = [&](const Vector &theta, Vector *grad, Matrix *hess) {
    const Vector z = (x * theta).array() + offset;
    double f = 0.5 * opts.ridge * theta.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i)
      f += weight[i] * (target[i] > 0.5 ? Softplus(-z[i]) : Softplus(z[i]));
    if (grad) {
      Vector r(n), h(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = Sigmoid(z[i]);
        r[i] = weight[i] * (s - target[i]);
        h[i] = weight[i] * s * (1.0 - s);
      }
      *grad = x.transpose() * r + opts.ridge * theta;
      *hess = x.transpose() * h.asDiagonal() * x;
      hess->diagonal().array() += opts.ridge;
    }
    return f;
  };
  const Vector theta = NewtonMinimize(Vector::Zero(p), objective, opts.max_iters, opts.tol);
  LinearParams params;
  params.weights = theta.head(p - 1);
  params.bias = theta[p - 1];
  return FusionModel(static_cast<int>(p - 1), params);
}

FusionModel TrainMultinomialFusion(const ScoreVectorSet &train, const MultinomialOptions &opts) {
  train.ValidateForTraining();
  std::vector<std::string> classes{kBonafideKey};
  if (opts.partition == ClassPartition::kBinary) {
    classes.push_back(kSpoofKey);
  } else {
    std::set<std::string> attacks;
    for (const auto &t : train.trials)
      if (!t.bonafide) attacks.insert(t.attack_id);
    classes.insert(classes.end(), attacks.begin(), attacks.end());
  }
  std::map<std::string, int> class_of;
  for (size_t k = 0; k < classes.size(); ++k) class_of[classes[k]] = static_cast<int>(k);

  const Matrix x = WithBiasColumn(train.AsMatrix());
  const Eigen::Index n = x.rows(), p = x.cols();
  const int c = static_cast<int>(classes.size());
  std::vector<int> label(n);
  std::vector<double> count(c, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &t = train.trials[static_cast<size_t>(i)];
    label[i] = t.bonafide ? 0 : (opts.partition == ClassPartition::kBinary ? 1 : class_of.at(t.attack_id));
    count[label[i]] += 1.0;
  }
  for (int k = 0; k < c; ++k)
    if (count[k] == 0.0) throw DataError("multinomial fusion: class " + classes[k] + " is empty");
  Vector weight(n);
  for (Eigen::Index i = 0; i < n; ++i) weight[i] = 1.0 / (c * count[label[i]]);

  // theta stacks the C rows of [W | b].
  const Objective objective = [&](const Vector &theta, Vector *grad, Matrix *hess) {
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
        theta.data(), c, p);
    const Matrix logits = x * w.transpose();
    double f = 0.5 * opts.ridge * theta.squaredNorm();
    if (grad) {
      grad->setZero(c * p);
      hess->setZero(c * p, c * p);
    }
    Vector prob(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lse = LogSumExp(logits.row(i));
      f -= weight[i] * (logits(i, label[i]) - lse);
      if (!grad) continue;
      prob = (logits.row(i).array() - lse).exp().transpose();
      const Eigen::RowVectorXd xi = x.row(i);
      const Matrix outer = xi.transpose() * xi;
      for (int k = 0; k < c; ++k) {
        grad->segment(k * p, p) += weight[i] * (prob[k] - (label[i] == k ? 1.0 : 0.0)) * xi.transpose();
        for (int m = 0; m < c; ++m)
          hess->block(k * p, m * p, p, p) +=
              weight[i] * prob[k] * ((k == m ? 1.0 : 0.0) - prob[m]) * outer;
      }
    }
    if (grad) {
      *grad += opts.ridge * theta;
      hess->diagonal().array() += opts.ridge;
    }
    return f;
  };
  const Vector theta = NewtonMinimize(Vector::Zero(c * p), objective, opts.max_iters, opts.tol);
  MultinomialParams params;
  params.classes = classes;
  params.weights.resize(c, p - 1);
  params.bias.resize(c);
  for (int k = 0; k < c; ++k) {
    params.weights.row(k) = theta.segment(k * p, p - 1).transpose();
    params.bias[k] = theta[k * p + p - 1];
  }
  return FusionModel(static_cast<int>(p - 1), params);
}

FusionModel TrainGmmFusion(const ScoreVectorSet &train, const GmmFusionOptions &opts) {
  train.ValidateForTraining();
  const Matrix x = train.AsMatrix();
  GmmFusionParams params;
  params.standardizer = Standardizer::Fit(x);
  const Matrix z = params.standardizer.Apply(x);
  std::vector<Eigen::Index> bona, spoof;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    (train.trials[static_cast<size_t>(i)].bonafide ? bona : spoof).push_back(i);
  auto rows = [&](const std::vector<Eigen::Index> &idx) {
    Matrix m(static_cast<Eigen::Index>(idx.size()), z.cols());
    for (size_t r = 0; r < idx.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = z.row(idx[r]);
    return m;
  };
  // Both classes share one seed so that identical data gives identical models.
  EmOptions em = opts.em;
  em.seed = DeriveSeed(opts.em.seed, "fusion-gmm");
  const Matrix zb = rows(bona), zs = rows(spoof);
  params.bona = TrainGmm(std::span<const Matrix>(&zb, 1), opts.num_components, em);
  params.spoof = TrainGmm(std::span<const Matrix>(&zs, 1), opts.num_components, em);
  return FusionModel(static_cast<int>(x.cols()), params);
}

FusionModel TrainSvmFusion(const ScoreVectorSet &train, const SvmFusionOptions &opts,
                           SmoSolution *solution) {
  train.ValidateForTraining();
  if (opts.degree < 1) throw ConfigError("svm fusion: degree must be >= 1");
  const Matrix x = train.AsMatrix();
  SvmParams params;
  params.standardizer = Standardizer::Fit(x);
  const Matrix z = params.standardizer.Apply(x);
  params.kernel.degree = opts.degree;
  params.kernel.gamma = opts.gamma > 0.0 ? opts.gamma : 1.0 / static_cast<double>(x.cols());
  params.kernel.coef0 = opts.coef0;
  Vector y(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    y[i] = train.trials[static_cast<size_t>(i)].bonafide ? 1.0 : -1.0;
  const SmoSolution sol = SolveSmo(z, y, params.kernel, {opts.c, opts.tol, opts.max_iters});
  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    if (sol.alpha[i] > 0.0) sv.push_back(i);
  params.support.resize(static_cast<Eigen::Index>(sv.size()), z.cols());
  params.coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (size_t s = 0; s < sv.size(); ++s) {
    params.support.row(static_cast<Eigen::Index>(s)) = z.row(sv[s]);
    params.coef[static_cast<Eigen::Index>(s)] = sol.alpha[sv[s]] * y[sv[s]];
  }
  params.rho = sol.rho;
  if (solution) *solution = sol;
  return FusionModel(static_cast<int>(x.cols()), params);
}

}  // namespace sbcm
