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

#ifndef LAYERWISE_SWEEP_H_
#define LAYERWISE_SWEEP_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "layerwise/gaussian_summary.h"
#include "layerwise/manifest.h"
#include "layerwise/rank_stats.h"

namespace layerwise {

// How frames become the samples of each fitted Gaussian.
enum class PoolingMode {
  kFrames,         // every frame of every utterance is one sample
  kUtteranceMean,  // each utterance contributes its mean frame
};

std::string_view pooling_name(PoolingMode mode);
PoolingMode parse_pooling(std::string_view name);

// Per-layer Gaussians of one entity (a system or a reference set), held in
// memory, backed by an LWS1 file, or produced on demand.
class EntitySummaries {
 public:
  using Generator = std::function<GaussianSummary(std::size_t layer)>;

  EntitySummaries() = default;
  static EntitySummaries in_memory(std::vector<GaussianSummary> layers);
  static EntitySummaries from_file(std::filesystem::path path);
  static EntitySummaries generated(std::size_t n_layers, std::size_t dim,
                                   Generator generator);

  std::size_t n_layers() const { return n_layers_; }
  std::size_t dim() const { return dim_; }
  GaussianSummary layer(std::size_t index) const;
  std::vector<GaussianSummary> all_layers() const;
  // Backing file when from_file(), empty otherwise.
  const std::filesystem::path* file() const;

 private:
  struct Generated {
    Generator fn;
  };
  std::size_t n_layers_ = 0;
  std::size_t dim_ = 0;
  std::variant<std::vector<GaussianSummary>, std::filesystem::path, Generated>
      storage_;
};

using LogFn = std::function<void(std::string_view)>;

struct SweepOptions {
  PoolingMode pooling = PoolingMode::kFrames;
  unsigned threads = 1;
  // LWS1 cache location; empty keeps summaries in memory.
  std::filesystem::path cache_dir;
  LogFn log;
};

struct DatasetSummaries {
  std::vector<std::string> system_ids;
  std::vector<bool> is_natural;
  std::vector<EntitySummaries> systems;
  EntitySummaries reference;
};

// Fits one Gaussian per layer over the given embedding files. Layers are
// processed in parallel; within a layer, per-utterance statistics are
// combined by a MergeTree in file order, so results do not depend on the
// thread count. Throws InsufficientDataError naming `entity` when fewer
// than 2 samples are available.
EntitySummaries summarize_files(std::span<const std::filesystem::path> files,
                                std::size_t n_layers, std::size_t dim,
                                const std::string& entity,
                                const SweepOptions& options);

// Validates the dataset, then summarizes every system and the reference.
DatasetSummaries build_summaries(const DatasetManifest& manifest,
                                 const SweepOptions& options);

// Cache key of a summary: file list (with each file's size and mtime),
// shape and pooling mode.
std::string summary_cache_key(std::span<const std::filesystem::path> files,
                              std::size_t n_layers, std::size_t dim,
                              PoolingMode pooling);

// Systems x layers matrix of W2 distances to the reference.
struct DistanceTable {
  std::string dataset_id;
  std::vector<std::string> system_ids;
  std::size_t n_layers = 0;
  std::vector<double> values;  // row-major, systems x layers

  double at(std::size_t system, std::size_t layer) const {
    return values[system * n_layers + layer];
  }
  std::vector<double> column(std::size_t layer) const;

  friend bool operator==(const DistanceTable&, const DistanceTable&) = default;
};

// values[s][l] = w2(system s at layer l, reference at layer l). Layers are
// visited in order; systems within a layer are evaluated in parallel.
// Errors are rethrown with the (system, layer) prepended.
DistanceTable system_layer_distances(std::span<const std::string> system_ids,
                                     std::span<const EntitySummaries> systems,
                                     const EntitySummaries& reference,
                                     unsigned threads,
                                     std::string dataset_id = {});
DistanceTable system_layer_distances(const DatasetSummaries& summaries,
                                     unsigned threads,
                                     std::string dataset_id = {});

// Rows whose system id is not in `drop`, in the original order.
DistanceTable drop_systems(const DistanceTable& table,
                           const std::set<std::string>& drop);

// system id -> dimension -> mean opinion score.
using RatingsTable = std::map<std::string, std::map<std::string, double>>;
RatingsTable ratings_table(const DatasetManifest& manifest);
// Dimensions rated by every listed system, sorted.
std::vector<std::string> common_dimensions(const RatingsTable& ratings,
                                           std::span<const std::string> systems);

struct CorrelationCurve {
  std::string dimension;
  CorrelationMethod method = CorrelationMethod::kSpearman;
  // Negated correlation per layer; nullopt where a layer's distances are
  // constant across systems.
  std::vector<std::optional<double>> values;

  friend bool operator==(const CorrelationCurve&,
                         const CorrelationCurve&) = default;
};

// Throws ValidationError naming the first system without a rating for
// `dimension`, InsufficientDataError for fewer than 3 systems and
// DegenerateError when the ratings themselves are constant.
CorrelationCurve correlate_layers(const DistanceTable& table,
                                  const RatingsTable& ratings,
                                  std::string_view dimension,
                                  CorrelationMethod method);

struct LayerRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive

  friend bool operator==(const LayerRange&, const LayerRange&) = default;
};

struct BestLayerReport {
  double best_value = 0.0;
  std::vector<LayerRange> layer_groups;

  // "a-b,c" form.
  std::string groups() const;
};

std::string format_layer_groups(std::span<const LayerRange> groups);

// All layers whose value equals the maximum exactly, as maximal contiguous
// ranges. Missing entries are skipped; DegenerateError if none remain.
BestLayerReport best_layers(const CorrelationCurve& curve);

struct LabeledReference {
  std::string label;
  std::vector<std::filesystem::path> files;
};

// The alternative manifest's reference list, checked against the primary
// manifest's layer count and dim (ValidationError naming the label).
LabeledReference reference_from_manifest(std::string label,
                                         const DatasetManifest& alternative,
                                         const DatasetManifest& primary);

inline constexpr std::string_view kPrimaryReferenceLabel = "primary";

struct ReferenceStudyResult {
  // Primary reference first, then alternatives in the given order.
  std::vector<std::string> labels;
  std::vector<CorrelationCurve> curves;
};

// System summaries are computed once; each reference set is summarized and
// correlated against them. Duplicate labels are a ValidationError.
ReferenceStudyResult reference_study(
    const DatasetManifest& manifest,
    std::span<const LabeledReference> alternatives, std::string_view dimension,
    CorrelationMethod method, const SweepOptions& options,
    bool exclude_natural = false);

}  // namespace layerwise

#endif  // LAYERWISE_SWEEP_H_
