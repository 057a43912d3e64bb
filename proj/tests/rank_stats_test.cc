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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "layerwise/errors.h"
#include "layerwise/oracles.h"

namespace layerwise {
namespace {

using V = std::vector<double>;

TEST(AverageRanks, Examples) {
  EXPECT_EQ(average_ranks(V{10, 20, 30}), (V{1, 2, 3}));
  EXPECT_EQ(average_ranks(V{1, 2, 2, 3}), (V{1, 2.5, 2.5, 4}));
  EXPECT_EQ(average_ranks(V{5, 5, 5}), (V{2, 2, 2}));
  EXPECT_EQ(average_ranks(V{3, 1, 2}), (V{3, 1, 2}));
  EXPECT_THROW(average_ranks(V{}), DimError);
  EXPECT_THROW(average_ranks(V{1, std::nan("")}), DataError);
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman(V{1, 2, 3, 4}, V{10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(V{1, 2, 3, 4}, V{4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman(V{1, 2, 2, 3}, V{1, 2, 3, 4}), 0.948683, 1e-6);
  EXPECT_NEAR(spearman(V{1, 2, 2, 3}, V{1, 2, 3, 4}), 4.5 / std::sqrt(22.5),
              1e-15);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(spearman(V{1, 2, 3}, V{1, 2}), DimError);
  EXPECT_THROW(spearman(V{1, 2}, V{1, 2}), InsufficientDataError);
  EXPECT_THROW(spearman(V{1, 1, 1}, V{1, 2, 3}), DegenerateError);
  EXPECT_THROW(spearman(V{1, 2, 3}, V{4, 4, 4}), DegenerateError);
  EXPECT_THROW(spearman(V{1, 2, std::numeric_limits<double>::infinity()},
                        V{1, 2, 3}),
               DataError);
}

TEST(Pearson, Examples) {
  EXPECT_NEAR(pearson(V{1, 2, 3, 4}, V{3, 5, 7, 9}), 1.0, 1e-15);
  EXPECT_NEAR(pearson(V{1, 2, 3, 4}, V{-1, -2, -3, -4}), -1.0, 1e-15);
  EXPECT_NEAR(pearson(V{0, 1, 2}, V{0, 1, 0}), 0.0, 1e-15);
  EXPECT_THROW(pearson(V{1, 1, 1}, V{1, 2, 3}), DegenerateError);
  EXPECT_THROW(pearson(V{1, 2}, V{1, 2}), InsufficientDataError);
}

TEST(NegatedCorrelation, Examples) {
  EXPECT_DOUBLE_EQ(
      negated_correlation(V{1, 2, 3}, V{5, 4, 3}, CorrelationMethod::kSpearman),
      1.0);
  EXPECT_DOUBLE_EQ(
      negated_correlation(V{1, 2, 3}, V{3, 4, 5}, CorrelationMethod::kSpearman),
      -1.0);
  EXPECT_DOUBLE_EQ(negated_correlation(V{3, 1, 2}, V{3.1, 4.9, 4.0},
                                       CorrelationMethod::kSpearman),
                   1.0);
}

TEST(Methods, Names) {
  EXPECT_EQ(parse_method("spearman"), CorrelationMethod::kSpearman);
  EXPECT_EQ(parse_method("pearson"), CorrelationMethod::kPearson);
  EXPECT_EQ(method_name(CorrelationMethod::kPearson), "pearson");
  EXPECT_THROW(parse_method("kendall"), ValidationError);
}

TEST(Spearman, Properties) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> small(0, 5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 500; ++trial) {
    V x(9), y(9);
    for (int i = 0; i < 9; ++i) {
      x[i] = small(rng);
      y[i] = normal(rng);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
      continue;
    }
    const double r = spearman(x, y);
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
    EXPECT_EQ(r, spearman(y, x));
    EXPECT_EQ(pearson(x, y), pearson(y, x));

    // Strictly increasing transforms leave ranks, and so the value, intact.
    V tx = x, ty = y;
    for (double& v : tx) v = std::exp(v) + 3 * v;
    for (double& v : ty) v = std::cbrt(v) * 7 - 1;
    EXPECT_EQ(spearman(tx, ty), r);

    // Reversing a tie-free ranking flips the sign.
    V reversed(9);
    for (int i = 0; i < 9; ++i) reversed[i] = -y[i];
    EXPECT_NEAR(
        negated_correlation(x, y, CorrelationMethod::kSpearman),
        -negated_correlation(x, reversed, CorrelationMethod::kSpearman), 1e-15);
  }
}

TEST(Spearman, AgreesWithOracle) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> small(0, 4);
  std::normal_distribution<double> normal;
  int compared = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    V x(8), y(8);
    for (int i = 0; i < 8; ++i) {
      x[i] = trial % 2 ? small(rng) : normal(rng);
      y[i] = small(rng);
    }
    double oracle = 0.0;
    try {
      oracle = oracle_spearman(x, y);
    } catch (const DegenerateError&) {
      EXPECT_THROW(spearman(x, y), DegenerateError);
      continue;
    }
    EXPECT_NEAR(spearman(x, y), oracle, 1e-12);
    ++compared;
  }
  EXPECT_GT(compared, 1900);
}

}  // namespace
}  // namespace layerwise
