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

#ifndef LAYERWISE_ORACLES_H_
#define LAYERWISE_ORACLES_H_

// Brute-force reference implementations for cross-checking the main code
// paths. They share nothing with gaussian_w2 or rank_stats beyond the error
// types.

#include <span>

namespace layerwise {

// W2 between N(mean1, diag(vars1)) and N(mean2, diag(vars2)) with plain
// scalar loops. DimError on length mismatch, DataError on a negative or
// non-finite input.
double oracle_w2_diagonal(std::span<const double> mean1,
                          std::span<const double> vars1,
                          std::span<const double> mean2,
                          std::span<const double> vars2);

// Spearman correlation: insertion-sorted ranks with tie averaging, then the
// definitional (nΣxy − ΣxΣy) / sqrt((nΣx² − (Σx)²)(nΣy² − (Σy)²)) sums.
// Quadratic in n; meant for short vectors.
double oracle_spearman(std::span<const double> x, std::span<const double> y);

}  // namespace layerwise

#endif  // LAYERWISE_ORACLES_H_
