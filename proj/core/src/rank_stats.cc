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

#include "layerwise/rank_stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "layerwise/errors.h"

namespace layerwise {
namespace {

void check_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite value in correlation input");
  }
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimError("correlation inputs have lengths " +
                   std::to_string(x.size()) + " and " +
                   std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw InsufficientDataError("correlation needs at least 3 points, got " +
                                std::to_string(x.size()));
  }
  check_finite(x);
  check_finite(y);
}

// Sum of squared deviations and the centered vector.
std::vector<double> centered(std::span<const double> v, double& sum_sq) {
  const double mean =
      std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.size());
  sum_sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] - mean;
    sum_sq += out[i] * out[i];
  }
  return out;
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) ==
         v.end();
}

}  // namespace

std::string_view method_name(CorrelationMethod method) {
  return method == CorrelationMethod::kSpearman ? "spearman" : "pearson";
}

CorrelationMethod parse_method(std::string_view name) {
  if (name == "spearman") return CorrelationMethod::kSpearman;
  if (name == "pearson") return CorrelationMethod::kPearson;
  throw ValidationError("unknown correlation method '" + std::string(name) +
                        "' (expected spearman or pearson)");
}

std::vector<double> average_ranks(std::span<const double> values) {
  if (values.empty()) throw DimError("cannot rank an empty list");
  for (double v : values) {
    if (std::isnan(v)) throw DataError("NaN in rank input");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean((i+1)..j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  if (is_constant(x) || is_constant(y)) {
    throw DegenerateError("correlation undefined for a constant input");
  }
  double sxx = 0.0;
  double syy = 0.0;
  const std::vector<double> cx = centered(x, sxx);
  const std::vector<double> cy = centered(y, syy);
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateError("correlation undefined for a constant input");
  }
  double sxy = 0.0;
  for (std::size_t i = 0; i < cx.size(); ++i) sxy += cx[i] * cy[i];
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

double correlation(std::span<const double> x, std::span<const double> y,
                   CorrelationMethod method) {
  return method == CorrelationMethod::kSpearman ? spearman(x, y) : pearson(x, y);
}

double negated_correlation(std::span<const double> distances,
                           std::span<const double> ratings,
                           CorrelationMethod method) {
  return -correlation(distances, ratings, method);
}

}  // namespace layerwise
