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

#ifndef LAYERWISE_RANK_STATS_H_
#define LAYERWISE_RANK_STATS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace layerwise {

enum class CorrelationMethod { kSpearman, kPearson };

std::string_view method_name(CorrelationMethod method);
// Accepts "spearman" or "pearson"; anything else is a ValidationError.
CorrelationMethod parse_method(std::string_view name);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Both require equal lengths >= 3 (DimError / InsufficientDataError) and
// non-constant inputs (DegenerateError). Results are clamped to [-1, 1].
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

double correlation(std::span<const double> x, std::span<const double> y,
                   CorrelationMethod method);

// -correlation(distances, ratings): positive when low distance goes with
// high opinion scores.
double negated_correlation(std::span<const double> distances,
                           std::span<const double> ratings,
                           CorrelationMethod method);

}  // namespace layerwise

#endif  // LAYERWISE_RANK_STATS_H_
