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

#ifndef LAYERWISE_GAUSSIAN_STATS_H_
#define LAYERWISE_GAUSSIAN_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "layerwise/gaussian_summary.h"

namespace layerwise {

// Running mean and co-moment (sum of centered outer products) of a stream of
// D-dimensional frames. All arithmetic is f64.
//
// Each accumulate() call first reduces its chunk with an exact two-pass
// mean/co-moment, then folds it in with the pairwise (Chan et al.) update,
// which is also what merge() uses.
class StatsAccumulator {
 public:
  explicit StatsAccumulator(std::size_t dim);

  // `frames` is row-major n_frames x dim. Throws DimError when the size is
  // not a multiple of dim, DataError on non-finite input.
  void accumulate(std::span<const float> frames);
  void accumulate(const Eigen::Ref<const Eigen::MatrixXd>& rows);

  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  std::uint64_t count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& comoment() const { return comoment_; }

  // Throws InsufficientDataError when count < 2. Covariance uses the
  // unbiased (count - 1) denominator and is symmetrized.
  GaussianSummary finalize() const;

 private:
  friend StatsAccumulator merge(const StatsAccumulator& a,
                                const StatsAccumulator& b);

  void combine(std::uint64_t n_b, const Eigen::VectorXd& mean_b,
               const Eigen::MatrixXd& comoment_b);

  std::uint64_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd comoment_;
};

// Accumulator equivalent to having seen a's stream followed by b's.
// Throws DimError on mismatched dims.
StatsAccumulator merge(const StatsAccumulator& a, const StatsAccumulator& b);

// Pairwise reduction whose tree shape depends only on the number of pushed
// accumulators (a binary counter over push order), so results are
// reproducible for a fixed input order. Holds O(log n) partial results.
class MergeTree {
 public:
  explicit MergeTree(std::size_t dim) : dim_(dim) {}

  void push(StatsAccumulator acc);
  StatsAccumulator result() const;

 private:
  struct Node {
    std::size_t height;
    StatsAccumulator acc;
  };
  std::size_t dim_;
  std::vector<Node> stack_;
};

}  // namespace layerwise

#endif  // LAYERWISE_GAUSSIAN_STATS_H_
