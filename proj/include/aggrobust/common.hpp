// Copyright 2026 The aggrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aggrobust {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row i holds player i's strategy x_i (N x n).
using StrategyProfile = Eigen::MatrixXd;

/// Bad input: dimensions, ranges, schema. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative or LP machinery failed to produce a certified answer. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A per-sample solve did not converge; carries the failing sample index.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::size_t index)
      : NumericalError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

/// Euclidean projection onto the nonnegative orthant.
inline Matrix project_nonneg(const Matrix& m) { return m.cwiseMax(0.0); }

}  // namespace aggrobust
