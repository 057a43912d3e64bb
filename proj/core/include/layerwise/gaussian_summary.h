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

#ifndef LAYERWISE_GAUSSIAN_SUMMARY_H_
#define LAYERWISE_GAUSSIAN_SUMMARY_H_

#include <cstdint>

#include <Eigen/Dense>

namespace layerwise {

// Fitted Gaussian for one (system-or-reference, layer) pair.
struct GaussianSummary {
  std::uint64_t count = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }

  // Checks count >= 2, consistent shapes, finite entries and symmetry to
  // absolute 1e-9. Throws DataError / DimError / NotSymmetricError.
  void validate() const;

  friend bool operator==(const GaussianSummary& a, const GaussianSummary& b) {
    return a.count == b.count && a.mean.size() == b.mean.size() &&
           a.covariance.rows() == b.covariance.rows() &&
           a.covariance.cols() == b.covariance.cols() && a.mean == b.mean &&
           a.covariance == b.covariance;
  }
};

}  // namespace layerwise

#endif  // LAYERWISE_GAUSSIAN_SUMMARY_H_
