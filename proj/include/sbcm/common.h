// sbcm/common.h

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

#ifndef SBCM_COMMON_H_
#define SBCM_COMMON_H_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sbcm {

// Frames (or trials) are rows, coefficients (or CM scores) are columns.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments that fail a documented invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input signal shorter than a single analysis window.
class TooShortError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot support the requested computation (empty class,
/// too few frames for K components, degenerate distribution, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed files and unreadable/unwritable paths.
class IoError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// 64-bit FNV-1a over a byte string. Stable across platforms.
uint64_t Fnv1a64(std::string_view bytes, uint64_t basis = 14695981039346656037ULL);

uint64_t SplitMix64(uint64_t x);

/// Child seed for a named pipeline stage: hash of (seed, stage).
uint64_t DeriveSeed(uint64_t seed, std::string_view stage);

std::string HexHash(uint64_t h);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Work assignment is
/// dynamic, so body must write only to slot i of its output. The first
/// exception (lowest index) is rethrown after all workers join.
void ParallelFor(size_t n, int jobs, const std::function<void(size_t)> &body);

/// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double v);

}  // namespace sbcm

#endif  // SBCM_COMMON_H_
