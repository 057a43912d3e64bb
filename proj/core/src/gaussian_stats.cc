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

#include "layerwise/gaussian_stats.h"

#include <string>

#include "layerwise/errors.h"

namespace layerwise {
namespace {

using RowMajorF =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

StatsAccumulator::StatsAccumulator(std::size_t dim)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      comoment_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(dim))) {
  if (dim == 0) throw DimError("accumulator dim must be >= 1");
}

void StatsAccumulator::accumulate(std::span<const float> frames) {
  const std::size_t d = dim();
  if (frames.size() % d != 0) {
    throw DimError("frame buffer of " + std::to_string(frames.size()) +
                   " values is not a multiple of dim " + std::to_string(d));
  }
  const auto n = static_cast<Eigen::Index>(frames.size() / d);
  if (n == 0) return;
  const Eigen::Map<const RowMajorF> view(frames.data(), n,
                                         static_cast<Eigen::Index>(d));
  accumulate(view.cast<double>());
}

void StatsAccumulator::accumulate(
    const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.rows() == 0) return;
  if (static_cast<std::size_t>(rows.cols()) != dim()) {
    throw DimError("frames have dim " + std::to_string(rows.cols()) +
                   ", accumulator has dim " + std::to_string(dim()));
  }
  if (!rows.allFinite()) throw DataError("non-finite value in frames");

  const Eigen::VectorXd chunk_mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - chunk_mean.transpose();
  Eigen::MatrixXd chunk_comoment = Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
  chunk_comoment.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  chunk_comoment.triangularView<Eigen::StrictlyUpper>() =
      chunk_comoment.transpose();
  combine(static_cast<std::uint64_t>(rows.rows()), chunk_mean, chunk_comoment);
}

void StatsAccumulator::combine(std::uint64_t n_b, const Eigen::VectorXd& mean_b,
                               const Eigen::MatrixXd& comoment_b) {
  if (n_b == 0) return;
  if (count_ == 0) {
    count_ = n_b;
    mean_ = mean_b;
    comoment_ = comoment_b;
    return;
  }
  const double n_a = static_cast<double>(count_);
  const double nb = static_cast<double>(n_b);
  const double n = n_a + nb;
  const Eigen::VectorXd delta = mean_b - mean_;
  // delta * delta^T is exactly symmetric elementwise, so the co-moment stays
  // exactly symmetric.
  comoment_ += comoment_b;
  comoment_.noalias() += (n_a * nb / n) * (delta * delta.transpose());
  mean_ += delta * (nb / n);
  count_ += n_b;
}

GaussianSummary StatsAccumulator::finalize() const {
  if (count_ < 2) {
    throw InsufficientDataError("need at least 2 frames to fit a Gaussian, got " +
                                std::to_string(count_));
  }
  GaussianSummary summary;
  summary.count = count_;
  summary.mean = mean_;
  const Eigen::MatrixXd cov = comoment_ / static_cast<double>(count_ - 1);
  summary.covariance = 0.5 * (cov + cov.transpose());
  return summary;
}

StatsAccumulator merge(const StatsAccumulator& a, const StatsAccumulator& b) {
  if (a.dim() != b.dim()) {
    throw DimError("cannot merge accumulators of dim " +
                   std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  StatsAccumulator out = a;
  out.combine(b.count_, b.mean_, b.comoment_);
  return out;
}

void MergeTree::push(StatsAccumulator acc) {
  if (acc.dim() != dim_) {
    throw DimError("merge tree of dim " + std::to_string(dim_) +
                   " given accumulator of dim " + std::to_string(acc.dim()));
  }
  Node node{0, std::move(acc)};
  while (!stack_.empty() && stack_.back().height == node.height) {
    node.acc = merge(stack_.back().acc, node.acc);
    ++node.height;
    stack_.pop_back();
  }
  stack_.push_back(std::move(node));
}

StatsAccumulator MergeTree::result() const {
  if (stack_.empty()) return StatsAccumulator(dim_);
  StatsAccumulator acc = stack_.back().acc;
  for (auto it = stack_.rbegin() + 1; it != stack_.rend(); ++it) {
    acc = merge(it->acc, acc);
  }
  return acc;
}

}  // namespace layerwise
