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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
//   layerwise_acceptance [--only <criterion>] [--list]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "layerwise/embedding_store.h"
#include "layerwise/errors.h"
#include "layerwise/gaussian_stats.h"
#include "layerwise/gaussian_w2.h"
#include "layerwise/oracles.h"
#include "layerwise/rank_stats.h"
#include "layerwise/sweep.h"
#include "layerwise/synthetic.h"
#include "test_util.h"

namespace layerwise {
namespace {

using testing::random_matrix;
using testing::random_psd;
using testing::relative_frobenius;
using testing::TempDir;

// Tolerances and budgets.
constexpr double kSymmetryRel = 1e-8;
constexpr double kIdentityAbs = 1e-7;
constexpr double kTriangleSlack = 1e-7;
constexpr double kScaleRel = 1e-8;
constexpr double kAxiomBudgetSeconds = 30.0;
constexpr int kAxiomTriples = 1000;

constexpr double kOracleRel = 1e-9;
constexpr double kSqrtTenAbs = 1e-9;
constexpr double kBuresScalarAbs = 1e-12;

constexpr double kPsdSqrtRel = 1e-8;
constexpr double kPsdHandAbs = 1e-6;

constexpr double kStreamingRel = 1e-10;
constexpr int kStreamingFrames = 100000;

constexpr double kRankAbs = 1e-12;
constexpr int kRankVectors = 10000;
constexpr double kTieFixtureAbs = 1e-6;

constexpr double kPlantedBudgetSeconds = 60.0;

constexpr int kReferenceTrials = 20;
constexpr int kReferenceWinsNeeded = 19;  // 95%
constexpr double kMismatchOffset = 2.0;

constexpr double kSingleW2BudgetSeconds = 2.0;
constexpr double kSweepBudgetOneThread = 25.0 * 60.0;
constexpr double kSweepBudgetEightThreads = 5.0 * 60.0;
constexpr std::size_t kPerfDim = 1280;
constexpr std::size_t kPerfLayers = 33;
constexpr std::size_t kPerfSystems = 21;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string secs(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", v);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("'") + LAYERWISE_CLI_PATH + "' " + args +
                          " >'" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Random Gaussian with a spread of scales; about one in five covariances is
// rank deficient.
GaussianSummary random_gaussian(std::mt19937_64& rng, Eigen::Index dim) {
  std::uniform_real_distribution<double> exponent(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 4);
  GaussianSummary g;
  g.count = 1000;
  g.mean = std::pow(10.0, exponent(rng)) * random_matrix(rng, dim, 1).col(0);
  const Eigen::Index rank =
      pick(rng) == 0 ? std::max<Eigen::Index>(1, dim / 2) : dim + 2;
  g.covariance = std::pow(10.0, exponent(rng)) * random_psd(rng, dim, rank);
  return g;
}

Outcome metric_axioms() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> exponent(-1.0, 1.0);
  const std::vector<Eigen::Index> dims = {1, 2, 8, 64};
  double worst_sym = 0, worst_identity = 0, worst_triangle = -1e300,
         worst_scale = 0;
  int failures = 0;
  for (int t = 0; t < kAxiomTriples; ++t) {
    const Eigen::Index d = dims[t % dims.size()];
    const GaussianSummary a = random_gaussian(rng, d);
    const GaussianSummary b = random_gaussian(rng, d);
    const GaussianSummary c = random_gaussian(rng, d);
    const double ab = w2(a, b), ba = w2(b, a), bc = w2(b, c), ac = w2(a, c);
    if (ab < 0 || ba < 0 || bc < 0 || ac < 0) ++failures;

    const double sym = std::abs(ab - ba) / std::max(ab, 1.0);
    worst_sym = std::max(worst_sym, sym);
    if (sym >= kSymmetryRel) ++failures;

    const double identity = std::max(w2(a, a), w2(c, c));
    worst_identity = std::max(worst_identity, identity);
    if (identity >= kIdentityAbs) ++failures;

    const double excess = ac - (ab + bc);
    worst_triangle = std::max(worst_triangle, excess);
    if (excess > kTriangleSlack) ++failures;

    double scale = std::pow(10.0, exponent(rng));
    if (t % 2) scale = -scale;
    GaussianSummary sa = a, sb = b;
    sa.mean *= scale;
    sb.mean *= scale;
    sa.covariance *= scale * scale;
    sb.covariance *= scale * scale;
    const double expected = std::abs(scale) * ab;
    const double scale_err =
        std::abs(w2(sa, sb) - expected) / std::max(expected, 1e-300);
    if (expected > 0) worst_scale = std::max(worst_scale, scale_err);
    if (expected > 0 && scale_err >= kScaleRel) ++failures;
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = failures == 0 && elapsed < kAxiomBudgetSeconds;
  o.detail = std::to_string(kAxiomTriples) + " triples, D in {1,2,8,64}; " +
             "max symmetry rel " + sci(worst_sym) + ", max self-distance " +
             sci(worst_identity) + ", max triangle excess " +
             sci(worst_triangle) + ", max scale rel " + sci(worst_scale) +
             ", violations " + std::to_string(failures) + ", " + secs(elapsed);
  return o;
}

Outcome closed_form_oracles() {
  std::mt19937_64 rng(20260102);
  std::uniform_int_distribution<int> dim_pick(1, 64);
  std::uniform_real_distribution<double> var(0.0, 4.0);
  std::normal_distribution<double> normal;
  double worst = 0;
  constexpr int kPairs = 500;
  for (int t = 0; t < kPairs; ++t) {
    const int d = dim_pick(rng);
    std::vector<double> m1(d), v1(d), m2(d), v2(d);
    for (int i = 0; i < d; ++i) {
      m1[i] = normal(rng);
      m2[i] = normal(rng);
      v1[i] = var(rng);
      v2[i] = var(rng);
    }
    GaussianSummary a, b;
    a.count = b.count = 2;
    a.mean = Eigen::Map<Eigen::VectorXd>(m1.data(), d);
    b.mean = Eigen::Map<Eigen::VectorXd>(m2.data(), d);
    a.covariance = Eigen::Map<Eigen::VectorXd>(v1.data(), d).asDiagonal();
    b.covariance = Eigen::Map<Eigen::VectorXd>(v2.data(), d).asDiagonal();
    const double oracle = oracle_w2_diagonal(m1, v1, m2, v2);
    worst = std::max(worst, std::abs(w2(a, b) - oracle) / oracle);
  }

  GaussianSummary p, q;
  p.count = q.count = 2;
  p.mean = Eigen::VectorXd::Constant(1, 0.0);
  q.mean = Eigen::VectorXd::Constant(1, 3.0);
  p.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0);
  q.covariance = Eigen::MatrixXd::Constant(1, 1, 4.0);
  const double sqrt_ten_err = std::abs(w2(p, q) - std::sqrt(10.0));
  const double bures_err =
      std::abs(bures(Eigen::MatrixXd::Constant(1, 1, 4.0),
                     Eigen::MatrixXd::Constant(1, 1, 9.0)) -
               1.0);
  Outcome o;
  o.pass = worst < kOracleRel && sqrt_ten_err < kSqrtTenAbs &&
           bures_err < kBuresScalarAbs;
  o.detail = std::to_string(kPairs) + " diagonal pairs, max rel " + sci(worst) +
             "; sqrt(10) err " + sci(sqrt_ten_err) + "; Bures(4,9) err " +
             sci(bures_err);
  return o;
}

Outcome psd_sqrt_criterion() {
  std::mt19937_64 rng(20260103);
  double worst = 0;
  for (Eigen::Index d : {2, 16, 64, 256}) {
    for (double cond : {1.0, 1e2, 1e4, 1e6, 1e8}) {
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, d, d));
      const Eigen::MatrixXd q = qr.householderQ();
      Eigen::VectorXd lambda(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        lambda(i) = std::pow(cond, -static_cast<double>(i) /
                                       std::max<Eigen::Index>(d - 1, 1));
      }
      Eigen::MatrixXd m = q * lambda.asDiagonal() * q.transpose();
      m = 0.5 * (m + m.transpose()).eval();
      const Eigen::MatrixXd s = psd_sqrt(m);
      worst = std::max(worst, relative_frobenius(s * s, m));
    }
  }
  Eigen::MatrixXd hand(2, 2);
  hand << 2, 1, 1, 2;
  Eigen::MatrixXd expected(2, 2);
  expected << 1.366025, 0.366025, 0.366025, 1.366025;
  const double hand_err = (psd_sqrt(hand) - expected).cwiseAbs().maxCoeff();
  Outcome o;
  o.pass = worst < kPsdSqrtRel && hand_err < kPsdHandAbs;
  o.detail = "D in {2,16,64,256}, cond up to 1e8: max rel Frobenius " +
             sci(worst) + "; [[2,1],[1,2]] max err " + sci(hand_err);
  return o;
}

Outcome streaming_stats() {
  constexpr Eigen::Index kDim = 32;
  std::mt19937_64 rng(20260104);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> length(100, 400);
  // f32 frames with a large common offset, as produced by a model.
  std::vector<float> frames(static_cast<std::size_t>(kStreamingFrames) * kDim);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i] = static_cast<float>(50.0 + (1.0 + (i % kDim)) * normal(rng));
  }
  Eigen::MatrixXd batch(kStreamingFrames, kDim);
  for (Eigen::Index r = 0; r < kStreamingFrames; ++r) {
    for (Eigen::Index c = 0; c < kDim; ++c) batch(r, c) = frames[r * kDim + c];
  }
  const Eigen::MatrixXd oracle = testing::batch_covariance(batch);

  StatsAccumulator single(kDim);
  single.accumulate(frames);
  const double single_err = relative_frobenius(single.finalize().covariance, oracle);

  // Utterance-sized chunks, as the sweep engine sees them.
  std::vector<std::span<const float>> chunks;
  for (std::size_t pos = 0; pos < frames.size();) {
    const std::size_t n =
        std::min<std::size_t>(length(rng) * kDim, frames.size() - pos);
    chunks.emplace_back(frames.data() + pos, n);
    pos += n;
  }
  auto tree_result = [&](const std::vector<std::size_t>& order) {
    MergeTree tree(kDim);
    for (std::size_t i : order) {
      StatsAccumulator acc(kDim);
      acc.accumulate(chunks[i]);
      tree.push(std::move(acc));
    }
    return tree.result().finalize();
  };
  std::vector<std::size_t> order(chunks.size());
  std::iota(order.begin(), order.end(), 0);
  const GaussianSummary forward = tree_result(order);
  std::shuffle(order.begin(), order.end(), rng);
  const GaussianSummary shuffled = tree_result(order);
  const double tree_err = relative_frobenius(forward.covariance, oracle);
  const double drift = relative_frobenius(shuffled.covariance, forward.covariance);
  Outcome o;
  o.pass = single_err < kStreamingRel && tree_err < kStreamingRel &&
           drift < kStreamingRel;
  o.detail = std::to_string(kStreamingFrames) + " frames, D=32: streaming vs batch " +
             sci(single_err) + ", merge tree vs batch " + sci(tree_err) +
             ", reorder drift " + sci(drift) + " over " +
             std::to_string(chunks.size()) + " chunks";
  return o;
}

Outcome rank_stats_criterion() {
  std::mt19937_64 rng(20260105);
  std::uniform_int_distribution<int> small(0, 4);
  std::normal_distribution<double> normal;
  double worst = 0;
  int compared = 0, degenerate_agree = 0, mismatched = 0;
  for (int t = 0; t < kRankVectors; ++t) {
    std::vector<double> x(8), y(8);
    for (int i = 0; i < 8; ++i) {
      x[i] = t % 2 ? small(rng) : normal(rng);
      y[i] = t % 3 ? small(rng) : normal(rng);
    }
    bool oracle_degenerate = false, main_degenerate = false;
    double a = 0, b = 0;
    try {
      a = oracle_spearman(x, y);
    } catch (const DegenerateError&) {
      oracle_degenerate = true;
    }
    try {
      b = spearman(x, y);
    } catch (const DegenerateError&) {
      main_degenerate = true;
    }
    if (oracle_degenerate || main_degenerate) {
      if (oracle_degenerate == main_degenerate) {
        ++degenerate_agree;
      } else {
        ++mismatched;
      }
      continue;
    }
    worst = std::max(worst, std::abs(a - b));
    ++compared;
  }
  const std::vector<double> tx = {1, 2, 2, 3}, ty = {1, 2, 3, 4};
  const double tie_err = std::abs(spearman(tx, ty) - 0.948683);
  Outcome o;
  o.pass = worst < kRankAbs && mismatched == 0 && tie_err < kTieFixtureAbs;
  o.detail = std::to_string(compared) + " tied/untied vectors of length 8 (" +
             std::to_string(degenerate_agree) +
             " constant, flagged by both): max abs diff " + sci(worst) +
             "; tie fixture err " + sci(tie_err);
  return o;
}

constexpr const char* kPlantedBest =
    "{\n  \"naturalness\": {\"value\": 1.000000, \"groups\": \"1-2\"}\n}\n";

Outcome planted_recovery() {
  TempDir dir;
  const auto start = std::chrono::steady_clock::now();
  const std::string data = (dir / "data").string();
  const int synth_rc =
      run_cli("synth --systems 5 --layers 6 --dim 8 --signal-layers 1,2 "
              "--shift 1.0 --frames 250 --utterances 8 --out " + data,
              dir / "synth.log");
  const int sweep_rc = run_cli("sweep --manifest " + data + "/manifest.json --out " +
                                   (dir / "out").string(),
                               dir / "sweep.log");
  const double elapsed = seconds_since(start);
  const std::string best = slurp(dir / "out/best_layers.json");
  Outcome o;
  o.pass = synth_rc == 0 && sweep_rc == 0 && best == kPlantedBest &&
           elapsed < kPlantedBudgetSeconds;
  std::string shown = best;
  std::replace(shown.begin(), shown.end(), '\n', ' ');
  o.detail = "K=5 L=6 D=8 2000 frames/system: exit codes " +
             std::to_string(synth_rc) + "/" + std::to_string(sweep_rc) +
             ", best_layers " + shown + "in " + secs(elapsed);
  return o;
}

Outcome reference_study_criterion() {
  int wins = 0;
  double worst_gap = 1e300;
  for (int trial = 0; trial < kReferenceTrials; ++trial) {
    TempDir dir;
    PlantedSpec spec;
    spec.seed = 1000 + trial;
    const DatasetManifest m = gen_planted_dataset(spec, dir / "planted");
    ReferenceSpec mismatch;
    mismatch.seed = 5000 + trial;
    mismatch.offset = kMismatchOffset;
    mismatch.axis = 0;
    const DatasetManifest alt = gen_reference_set(mismatch, dir / "mismatched");
    const std::vector<LabeledReference> alts = {
        reference_from_manifest("mismatched", alt, m)};
    const ReferenceStudyResult r =
        reference_study(m, alts, "naturalness", CorrelationMethod::kSpearman,
                        SweepOptions{});
    bool dominates = true;
    for (std::uint32_t l : spec.signal_layers) {
      const auto& matched = r.curves[0].values[l];
      const auto& shifted = r.curves[1].values[l];
      if (!matched) {
        dominates = false;
        continue;
      }
      const double gap = *matched - shifted.value_or(-1.0);
      worst_gap = std::min(worst_gap, gap);
      if (gap <= 0) dominates = false;
    }
    if (dominates) ++wins;
  }
  Outcome o;
  o.pass = wins >= kReferenceWinsNeeded;
  o.detail = "matched vs reference shifted by " + sci(kMismatchOffset) +
             " on the signal axis, spearman: strict dominance at signal layers in " +
             std::to_string(wins) + "/" + std::to_string(kReferenceTrials) +
             " trials, smallest gap " + sci(worst_gap);
  return o;
}

Outcome determinism() {
  TempDir dir;
  const std::string data = (dir / "data").string();
  if (run_cli("synth --seed 31 --out " + data, dir / "synth.log") != 0) {
    return {false, "synth failed"};
  }
  const std::vector<std::string> runs = {"t1", "t8", "t1again"};
  const std::vector<int> threads = {1, 8, 1};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int rc = run_cli("sweep --manifest " + data + "/manifest.json --threads " +
                               std::to_string(threads[i]) + " --out " +
                               (dir / runs[i]).string(),
                           dir / (runs[i] + ".log"));
    if (rc != 0) return {false, "sweep exited " + std::to_string(rc)};
  }
  bool same = true;
  std::string detail;
  for (const char* f : {"distances.csv", "correlations.csv", "best_layers.json"}) {
    const std::string base = slurp(dir / "t1" / f);
    const bool ok = !base.empty() && base == slurp(dir / "t8" / f) &&
                    base == slurp(dir / "t1again" / f);
    same = same && ok;
    detail += std::string(f) + (ok ? " identical; " : " DIFFERS; ");
  }
  return {same, detail + "threads 1, 8, 1"};
}

// Per-layer covariances built from a small pool of random full-rank
// matrices so that setup stays cheap at D=1280.
Outcome performance() {
  TempDir dir;
  std::mt19937_64 rng(20260106);
  const Eigen::Index d = static_cast<Eigen::Index>(kPerfDim);
  std::vector<Eigen::MatrixXd> pool;
  for (int i = 0; i < 4; ++i) pool.push_back(random_psd(rng, d, d + 64));
  auto layer_summary = [&](std::size_t layer, double scale, int offset) {
    GaussianSummary g;
    g.count = 5000;
    g.mean = random_matrix(rng, d, 1).col(0);
    g.covariance = pool[(layer + offset) % pool.size()] * scale;
    g.covariance.diagonal().array() += 0.05;
    return g;
  };
  {
    std::vector<GaussianSummary> sys, ref;
    for (std::size_t l = 0; l < kPerfLayers; ++l) {
      sys.push_back(layer_summary(l, 1.0 + 0.01 * l, 0));
    }
    write_summary_file(sys, dir / "system.lws");
    sys.clear();
    for (std::size_t l = 0; l < kPerfLayers; ++l) {
      ref.push_back(layer_summary(l, 1.0 + 0.02 * l, 1));
    }
    write_summary_file(ref, dir / "reference.lws");
  }

  const GaussianSummary s0 = read_summary_layer(dir / "system.lws", 0);
  const GaussianSummary r0 = read_summary_layer(dir / "reference.lws", 0);
  auto start = std::chrono::steady_clock::now();
  const double single = w2(s0, r0);
  const double single_time = seconds_since(start);

  std::vector<std::string> ids;
  std::vector<EntitySummaries> systems;
  for (std::size_t k = 0; k < kPerfSystems; ++k) {
    ids.push_back("sys" + std::to_string(k));
    systems.push_back(EntitySummaries::from_file(dir / "system.lws"));
  }
  const EntitySummaries reference = EntitySummaries::from_file(dir / "reference.lws");

  start = std::chrono::steady_clock::now();
  const DistanceTable t1 = system_layer_distances(ids, systems, reference, 1);
  const double one_thread = seconds_since(start);
  start = std::chrono::steady_clock::now();
  const DistanceTable t8 = system_layer_distances(ids, systems, reference, 8);
  const double eight_threads = seconds_since(start);

  Outcome o;
  o.pass = std::isfinite(single) && single_time < kSingleW2BudgetSeconds &&
           one_thread < kSweepBudgetOneThread &&
           eight_threads < kSweepBudgetEightThreads && t1 == t8;
  o.detail = "D=1280: one W2 " + secs(single_time) + " (limit 2s); " +
             std::to_string(kPerfSystems) + "x" + std::to_string(kPerfLayers) +
             " sweep from LWS1 files " + secs(one_thread) +
             " at 1 thread (limit 1500s), " + secs(eight_threads) +
             " at 8 threads (limit 300s); tables " +
             (t1 == t8 ? "identical" : "DIFFER") + "; hardware threads " +
             std::to_string(std::thread::hardware_concurrency());
  return o;
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {"metric_axioms", metric_axioms},
    {"closed_form_oracles", closed_form_oracles},
    {"psd_sqrt", psd_sqrt_criterion},
    {"streaming_stats", streaming_stats},
    {"rank_stats", rank_stats_criterion},
    {"planted_recovery", planted_recovery},
    {"reference_study", reference_study_criterion},
    {"determinism", determinism},
    {"performance", performance},
};

}  // namespace
}  // namespace layerwise

int main(int argc, char** argv) {
  using layerwise::kCriteria;
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only.push_back(argv[++i]);
    } else if (arg == "--list") {
      for (const auto& c : kCriteria) std::cout << c.name << '\n';
      return 0;
    } else {
      std::cerr << "usage: layerwise_acceptance [--only <criterion>] [--list]\n";
      return 2;
    }
  }
  for (const std::string& name : only) {
    if (std::none_of(std::begin(kCriteria), std::end(kCriteria),
                     [&](const auto& c) { return name == c.name; })) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) {
      continue;
    }
    ++ran;
    layerwise::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.name << ": "
              << outcome.detail << std::endl;
  }
  std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
