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

#include "layerwise/gaussian_w2.h"

#include <cmath>
#include <string>

#include "layerwise/errors.h"

namespace layerwise {
namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimError(std::string(what) + " is not square");
  }
  if (!m.allFinite()) {
    throw DataError(std::string(what) + " holds non-finite values");
  }
  if (m.size() == 0) return;
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw NotSymmetricError(std::string(what) + " is asymmetric by " +
                            std::to_string(asym));
  }
}

// Applies the PSD acceptance rule to a spectrum and returns the largest
// eigenvalue (or 0 for an all-zero spectrum).
double check_psd_spectrum(const Eigen::VectorXd& eigenvalues, const char* what) {
  const double lmax = std::max(eigenvalues.maxCoeff(), 0.0);
  const double lmin = eigenvalues.minCoeff();
  if (lmin < -kNegativeEigenTolerance * lmax || (lmax == 0.0 && lmin < 0.0)) {
    throw NotPsdError(std::string(what) + " has eigenvalue " +
                      std::to_string(lmin) + " below -1e-8 * " +
                      std::to_string(lmax));
  }
  return lmax;
}

double floored_sqrt(double lambda, double lmax) {
  return lambda > kEigenFloor * lmax ? std::sqrt(lambda) : 0.0;
}

void check_summary_shape(const GaussianSummary& g, const char* what) {
  if (g.covariance.rows() != g.mean.size() ||
      g.covariance.cols() != g.mean.size()) {
    throw DimError(std::string(what) + ": covariance shape does not match mean");
  }
  if (!g.mean.allFinite()) {
    throw DataError(std::string(what) + ": mean holds non-finite values");
  }
}

}  // namespace

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  check_symmetric(m, "matrix");
  if (m.size() == 0) return m;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition did not converge");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double lmax = check_psd_spectrum(values, "matrix");
  Eigen::VectorXd roots(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    roots(i) = floored_sqrt(values(i), lmax);
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::MatrixXd s = v * roots.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

BuresTarget::BuresTarget(const Eigen::MatrixXd& sigma2) : sigma2_(sigma2) {
  check_symmetric(sigma2_, "second covariance");
  trace2_ = sigma2_.trace();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma2_);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
    factor_ = llt.matrixL();
    cholesky_ = true;
  } else {
    factor_ = psd_sqrt(sigma2_);
  }
}

double BuresTarget::bures_from(const Eigen::MatrixXd& sigma1) const {
  if (sigma1.rows() != sigma2_.rows() || sigma1.cols() != sigma2_.cols()) {
    throw DimError("covariances have dims " + std::to_string(sigma1.rows()) +
                   " and " + std::to_string(sigma2_.rows()));
  }
  check_symmetric(sigma1, "first covariance");
  // Identical inputs: the distance is exactly zero, and the trace formula
  // would only return its cancellation residue.
  if (sigma1 == sigma2_) return 0.0;

  Eigen::MatrixXd inner;
  if (cholesky_) {
    const auto lower = factor_.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd right = sigma1 * lower;
    inner = lower.transpose() * right;
  } else {
    inner = factor_ * sigma1 * factor_;
  }
  inner = 0.5 * (inner + inner.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      inner, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition did not converge");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double lmax = check_psd_spectrum(values, "cross-covariance product");
  double trace_root = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    trace_root += floored_sqrt(values(i), lmax);
  }
  const double trace_sum = sigma1.trace() + trace2_;
  const double result = trace_sum - 2.0 * trace_root;
  if (result >= 0.0) return result;
  if (result >= -kBuresClampTolerance * trace_sum) return 0.0;
  throw NumericalError("Bures metric evaluated to " + std::to_string(result) +
                       " (trace sum " + std::to_string(trace_sum) + ")");
}

W2Target::W2Target(const GaussianSummary& g2)
    : mean2_((check_summary_shape(g2, "second summary"), g2.mean)),
      bures_(g2.covariance) {}

double W2Target::distance_from(const GaussianSummary& g1) const {
  check_summary_shape(g1, "first summary");
  if (g1.mean.size() != mean2_.size()) {
    throw DimError("summaries have dims " + std::to_string(g1.mean.size()) +
                   " and " + std::to_string(mean2_.size()));
  }
  const double mean_term = (g1.mean - mean2_).squaredNorm();
  const double radicand = mean_term + bures_.bures_from(g1.covariance);
  if (radicand >= 0.0) return std::sqrt(radicand);
  if (radicand >= -kRadicandClampTolerance) return 0.0;
  throw NumericalError("negative W2 radicand " + std::to_string(radicand));
}

double bures(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  if (s1.rows() != s2.rows() || s1.cols() != s2.cols()) {
    throw DimError("covariances have dims " + std::to_string(s1.rows()) +
                   " and " + std::to_string(s2.rows()));
  }
  return BuresTarget(s2).bures_from(s1);
}

double w2(const GaussianSummary& g1, const GaussianSummary& g2) {
  if (g1.mean.size() != g2.mean.size()) {
    throw DimError("summaries have dims " + std::to_string(g1.mean.size()) +
                   " and " + std::to_string(g2.mean.size()));
  }
  return W2Target(g2).distance_from(g1);
}

}  // namespace layerwise
