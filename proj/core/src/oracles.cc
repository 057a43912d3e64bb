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

#include "layerwise/oracles.h"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "layerwise/errors.h"

namespace layerwise {
namespace {

std::vector<double> oracle_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t item = order[i];
    std::size_t j = i;
    while (j > 0 && v[order[j - 1]] > v[item]) {
      order[j] = order[j - 1];
      --j;
    }
    order[j] = item;
  }
  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && v[order[end]] == v[order[start]]) ++end;
    // Positions start..end-1 hold 1-based ranks start+1..end.
    const double shared = (static_cast<double>(start + 1) + end) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = shared;
    start = end;
  }
  return ranks;
}

}  // namespace

double oracle_w2_diagonal(std::span<const double> mean1,
                          std::span<const double> vars1,
                          std::span<const double> mean2,
                          std::span<const double> vars2) {
  const std::size_t n = mean1.size();
  if (vars1.size() != n || mean2.size() != n || vars2.size() != n) {
    throw DimError("oracle_w2_diagonal: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(vars1[i] >= 0.0) || !(vars2[i] >= 0.0) || !std::isfinite(vars1[i]) ||
        !std::isfinite(vars2[i])) {
      throw DataError("oracle_w2_diagonal: variance at index " +
                      std::to_string(i) + " is negative or non-finite");
    }
    if (!std::isfinite(mean1[i]) || !std::isfinite(mean2[i])) {
      throw DataError("oracle_w2_diagonal: non-finite mean");
    }
    const double dm = mean1[i] - mean2[i];
    const double ds = std::sqrt(vars1[i]) - std::sqrt(vars2[i]);
    sum += dm * dm + ds * ds;
  }
  return std::sqrt(sum);
}

double oracle_spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimError("oracle_spearman: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 3) throw InsufficientDataError("oracle_spearman: need n >= 3");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DataError("oracle_spearman: non-finite input");
    }
  }
  const std::vector<double> rx = oracle_ranks(x);
  const std::vector<double> ry = oracle_ranks(y);
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += rx[i];
    sy += ry[i];
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
    sxy += rx[i] * ry[i];
  }
  const double dn = static_cast<double>(n);
  const double vx = dn * sxx - sx * sx;
  const double vy = dn * syy - sy * sy;
  if (vx <= 0.0 || vy <= 0.0) {
    throw DegenerateError("oracle_spearman: constant input");
  }
  double r = (dn * sxy - sx * sy) / std::sqrt(vx * vy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

}  // namespace layerwise
