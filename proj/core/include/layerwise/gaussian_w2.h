// Copyright 2026 The Layerwise Authors. All Rights Reserved.
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

#ifndef LAYERWISE_GAUSSIAN_W2_H_
#define LAYERWISE_GAUSSIAN_W2_H_

#include <Eigen/Dense>

#include "layerwise/gaussian_summary.h"

namespace layerwise {

// Tolerances shared by the PSD routines.
inline constexpr double kSymmetryTolerance = 1e-9;      // absolute
inline constexpr double kNegativeEigenTolerance = 1e-8;  // relative to λmax
inline constexpr double kEigenFloor = 1e-12;             // relative to λmax
inline constexpr double kBuresClampTolerance = 1e-8;     // relative to trace
inline constexpr double kRadicandClampTolerance = 1e-10;  // absolute

// Principal square root of a symmetric PSD matrix by symmetric
// eigendecomposition. Eigenvalues below 1e-12·λmax are treated as 0.
// Throws NotSymmetricError or NotPsdError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

// trace(s1 + s2 - 2 (s2^½ s1 s2^½)^½), the unnormalized Bures metric.
double bures(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

// sqrt(|μ1 - μ2|² + bures(Σ1, Σ2)).
double w2(const GaussianSummary& g1, const GaussianSummary& g2);

// Covariance-side state prepared once for a fixed second argument, so that
// many bures(·, Σ2) evaluations share the factorization of Σ2.
//
// When Σ2 admits a Cholesky factor L (Σ2 = L Lᵀ), the inner matrix used is
// Lᵀ Σ1 L, which is similar to Σ2^½ Σ1 Σ2^½ and has the same spectrum, so
// the trace of its square root is unchanged. Singular Σ2 falls back to the
// eigendecomposition square root.
class BuresTarget {
 public:
  explicit BuresTarget(const Eigen::MatrixXd& sigma2);

  double bures_from(const Eigen::MatrixXd& sigma1) const;
  Eigen::Index dim() const { return sigma2_.rows(); }
  bool uses_cholesky() const { return cholesky_; }

 private:
  Eigen::MatrixXd sigma2_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor or symmetric root
  double trace2_ = 0.0;
  bool cholesky_ = false;
};

// w2(·, g2) for a fixed g2.
class W2Target {
 public:
  explicit W2Target(const GaussianSummary& g2);

  double distance_from(const GaussianSummary& g1) const;

 private:
  Eigen::VectorXd mean2_;
  BuresTarget bures_;
};

}  // namespace layerwise

#endif  // LAYERWISE_GAUSSIAN_W2_H_
