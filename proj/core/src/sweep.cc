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

#include "layerwise/sweep.h"

#include <algorithm>
#include <cmath>

#include "byte_io.h"
#include "layerwise/embedding_store.h"
#include "layerwise/errors.h"
#include "layerwise/gaussian_stats.h"
#include "layerwise/gaussian_w2.h"
#include "parallel.h"

namespace layerwise {
namespace {

using RowMajorF =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void log_line(const SweepOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

void check_reference_files(std::span<const std::filesystem::path> files,
                           std::size_t n_layers, std::size_t dim,
                           const std::string& entity) {
  if (files.empty()) {
    throw ValidationError(entity + " has no embedding files");
  }
  for (const auto& f : files) {
    if (!std::filesystem::exists(f)) {
      throw IoError(entity + ": embedding file not found: " + f.string());
    }
    const EmbeddingHeader h = read_embedding_header(f);
    if (h.n_layers != n_layers || h.dim != dim) {
      throw ValidationError(entity + ": " + f.string() + " has n_layers=" +
                            std::to_string(h.n_layers) +
                            ", dim=" + std::to_string(h.dim) + ", expected " +
                            std::to_string(n_layers) + " and " +
                            std::to_string(dim));
    }
  }
}

std::vector<GaussianSummary> compute_layers(
    std::span<const std::filesystem::path> files, std::size_t n_layers,
    std::size_t dim, const std::string& entity, const SweepOptions& options) {
  std::vector<GaussianSummary> layers(n_layers);
  parallel_for(n_layers, options.threads, [&](std::size_t layer) {
    MergeTree tree(dim);
    for (const auto& file : files) {
      const LayerFrames frames = read_embedding_layer(file, layer);
      if (frames.dim != dim) {
        throw ValidationError(file.string() + " has dim " +
                              std::to_string(frames.dim) + ", expected " +
                              std::to_string(dim));
      }
      StatsAccumulator acc(dim);
      if (options.pooling == PoolingMode::kFrames) {
        acc.accumulate(frames.data);
      } else {
        const Eigen::Map<const RowMajorF> view(
            frames.data.data(), frames.n_frames, static_cast<Eigen::Index>(dim));
        const Eigen::MatrixXd mean_row = view.cast<double>().colwise().mean();
        acc.accumulate(mean_row);
      }
      tree.push(std::move(acc));
    }
    const StatsAccumulator total = tree.result();
    if (total.count() < 2) {
      throw InsufficientDataError(
          entity + ": layer " + std::to_string(layer) + " has " +
          std::to_string(total.count()) +
          " sample(s) under pooling '" +
          std::string(pooling_name(options.pooling)) +
          "'; at least 2 are needed");
    }
    layers[layer] = total.finalize();
  });
  return layers;
}

}  // namespace

std::string_view pooling_name(PoolingMode mode) {
  return mode == PoolingMode::kFrames ? "frames" : "utterance-mean";
}

PoolingMode parse_pooling(std::string_view name) {
  if (name == "frames") return PoolingMode::kFrames;
  if (name == "utterance-mean") return PoolingMode::kUtteranceMean;
  throw ValidationError("unknown pooling mode '" + std::string(name) +
                        "' (expected frames or utterance-mean)");
}

EntitySummaries EntitySummaries::in_memory(std::vector<GaussianSummary> layers) {
  if (layers.empty()) throw DimError("entity has no layers");
  EntitySummaries out;
  out.n_layers_ = layers.size();
  out.dim_ = layers.front().dim();
  for (const auto& s : layers) {
    if (s.dim() != out.dim_) throw DimError("entity layers disagree on dim");
  }
  out.storage_ = std::move(layers);
  return out;
}

EntitySummaries EntitySummaries::from_file(std::filesystem::path path) {
  const SummaryHeader header = read_summary_header(path);
  EntitySummaries out;
  out.n_layers_ = header.n_layers;
  out.dim_ = header.dim;
  out.storage_ = std::move(path);
  return out;
}

EntitySummaries EntitySummaries::generated(std::size_t n_layers,
                                           std::size_t dim,
                                           Generator generator) {
  EntitySummaries out;
  out.n_layers_ = n_layers;
  out.dim_ = dim;
  out.storage_ = Generated{std::move(generator)};
  return out;
}

GaussianSummary EntitySummaries::layer(std::size_t index) const {
  if (index >= n_layers_) {
    throw DimError("layer " + std::to_string(index) + " out of range [0, " +
                   std::to_string(n_layers_) + ")");
  }
  if (const auto* layers = std::get_if<std::vector<GaussianSummary>>(&storage_)) {
    return (*layers)[index];
  }
  if (const auto* path = std::get_if<std::filesystem::path>(&storage_)) {
    return read_summary_layer(*path, index);
  }
  return std::get<Generated>(storage_).fn(index);
}

std::vector<GaussianSummary> EntitySummaries::all_layers() const {
  if (const auto* path = std::get_if<std::filesystem::path>(&storage_)) {
    return read_summary_file(*path);
  }
  std::vector<GaussianSummary> out;
  out.reserve(n_layers_);
  for (std::size_t l = 0; l < n_layers_; ++l) out.push_back(layer(l));
  return out;
}

const std::filesystem::path* EntitySummaries::file() const {
  return std::get_if<std::filesystem::path>(&storage_);
}

EntitySummaries summarize_files(std::span<const std::filesystem::path> files,
                                std::size_t n_layers, std::size_t dim,
                                const std::string& entity,
                                const SweepOptions& options) {
  if (files.empty()) {
    throw InsufficientDataError(entity + " has no embedding files");
  }
  std::filesystem::path cached;
  if (!options.cache_dir.empty()) {
    cached = options.cache_dir /
             (summary_cache_key(files, n_layers, dim, options.pooling) + ".lws");
    if (std::filesystem::exists(cached)) {
      try {
        EntitySummaries hit = EntitySummaries::from_file(cached);
        if (hit.n_layers() == n_layers && hit.dim() == dim) {
          log_line(options, "cache hit: " + entity + " <- " + cached.string());
          return hit;
        }
      } catch (const Error& e) {
        log_line(options, "ignoring unreadable cache entry " + cached.string() +
                              ": " + e.what());
      }
    }
  }
  std::vector<GaussianSummary> layers =
      compute_layers(files, n_layers, dim, entity, options);
  if (cached.empty()) return EntitySummaries::in_memory(std::move(layers));
  write_summary_file(layers, cached);
  log_line(options, "computed: " + entity + " -> " + cached.string());
  return EntitySummaries::from_file(cached);
}

DatasetSummaries build_summaries(const DatasetManifest& manifest,
                                 const SweepOptions& options) {
  validate_dataset(manifest, /*require_reference=*/true);
  DatasetSummaries out;
  for (const SystemEntry& s : manifest.systems) {
    out.system_ids.push_back(s.system_id);
    out.is_natural.push_back(s.is_natural);
    out.systems.push_back(summarize_files(s.utterances, manifest.n_layers,
                                          manifest.dim,
                                          "system '" + s.system_id + "'",
                                          options));
  }
  out.reference = summarize_files(manifest.reference, manifest.n_layers,
                                  manifest.dim, "reference", options);
  return out;
}

std::vector<double> DistanceTable::column(std::size_t layer) const {
  std::vector<double> out(system_ids.size());
  for (std::size_t s = 0; s < system_ids.size(); ++s) out[s] = at(s, layer);
  return out;
}

DistanceTable system_layer_distances(std::span<const std::string> system_ids,
                                     std::span<const EntitySummaries> systems,
                                     const EntitySummaries& reference,
                                     unsigned threads, std::string dataset_id) {
  if (system_ids.size() != systems.size()) {
    throw DimError("system id list and summary list differ in length");
  }
  const std::size_t n_layers = reference.n_layers();
  for (std::size_t s = 0; s < systems.size(); ++s) {
    if (systems[s].n_layers() != n_layers || systems[s].dim() != reference.dim()) {
      throw DimError("system '" + system_ids[s] + "' has " +
                     std::to_string(systems[s].n_layers()) + " layers of dim " +
                     std::to_string(systems[s].dim()) + ", reference has " +
                     std::to_string(n_layers) + " of dim " +
                     std::to_string(reference.dim()));
    }
  }
  DistanceTable table;
  table.dataset_id = std::move(dataset_id);
  table.system_ids.assign(system_ids.begin(), system_ids.end());
  table.n_layers = n_layers;
  table.values.assign(systems.size() * n_layers, 0.0);

  for (std::size_t layer = 0; layer < n_layers; ++layer) {
    std::optional<W2Target> target;
    try {
      target.emplace(reference.layer(layer));
    } catch (const Error& e) {
      rethrow_with_context(e, "reference, layer " + std::to_string(layer));
    }
    parallel_for(systems.size(), threads, [&](std::size_t s) {
      try {
        const double d = target->distance_from(systems[s].layer(layer));
        if (!std::isfinite(d) || d < 0.0) {
          throw NumericalError("invalid distance " + std::to_string(d));
        }
        table.values[s * n_layers + layer] = d;
      } catch (const Error& e) {
        rethrow_with_context(e, "system '" + system_ids[s] + "', layer " +
                                    std::to_string(layer));
      }
    });
  }
  return table;
}

DistanceTable system_layer_distances(const DatasetSummaries& summaries,
                                     unsigned threads, std::string dataset_id) {
  return system_layer_distances(summaries.system_ids, summaries.systems,
                                summaries.reference, threads,
                                std::move(dataset_id));
}

DistanceTable drop_systems(const DistanceTable& table,
                           const std::set<std::string>& drop) {
  DistanceTable out;
  out.dataset_id = table.dataset_id;
  out.n_layers = table.n_layers;
  for (std::size_t s = 0; s < table.system_ids.size(); ++s) {
    if (drop.contains(table.system_ids[s])) continue;
    out.system_ids.push_back(table.system_ids[s]);
    for (std::size_t l = 0; l < table.n_layers; ++l) {
      out.values.push_back(table.at(s, l));
    }
  }
  return out;
}

RatingsTable ratings_table(const DatasetManifest& manifest) {
  RatingsTable out;
  for (const SystemEntry& s : manifest.systems) out[s.system_id] = s.ratings;
  return out;
}

std::vector<std::string> common_dimensions(const RatingsTable& ratings,
                                           std::span<const std::string> systems) {
  std::vector<std::string> out;
  bool first = true;
  for (const std::string& id : systems) {
    const auto it = ratings.find(id);
    std::vector<std::string> dims;
    if (it != ratings.end()) {
      for (const auto& [name, mos] : it->second) dims.push_back(name);
    }
    if (first) {
      out = std::move(dims);
      first = false;
    } else {
      std::vector<std::string> both;
      std::set_intersection(out.begin(), out.end(), dims.begin(), dims.end(),
                            std::back_inserter(both));
      out = std::move(both);
    }
  }
  return out;
}

CorrelationCurve correlate_layers(const DistanceTable& table,
                                  const RatingsTable& ratings,
                                  std::string_view dimension,
                                  CorrelationMethod method) {
  std::vector<double> scores;
  scores.reserve(table.system_ids.size());
  for (const std::string& id : table.system_ids) {
    const auto sys = ratings.find(id);
    if (sys != ratings.end()) {
      const auto score = sys->second.find(std::string(dimension));
      if (score != sys->second.end()) {
        scores.push_back(score->second);
        continue;
      }
    }
    throw ValidationError("system '" + id + "' has no rating for dimension '" +
                          std::string(dimension) + "'");
  }
  if (scores.size() < 3) {
    throw InsufficientDataError("dimension '" + std::string(dimension) +
                                "': correlation needs at least 3 systems, got " +
                                std::to_string(scores.size()));
  }
  if (std::all_of(scores.begin(), scores.end(),
                  [&](double v) { return v == scores.front(); })) {
    throw DegenerateError("ratings for dimension '" + std::string(dimension) +
                          "' are equal for every system");
  }
  CorrelationCurve curve;
  curve.dimension = std::string(dimension);
  curve.method = method;
  curve.values.resize(table.n_layers);
  for (std::size_t l = 0; l < table.n_layers; ++l) {
    try {
      curve.values[l] = negated_correlation(table.column(l), scores, method);
    } catch (const DegenerateError&) {
      curve.values[l] = std::nullopt;
    }
  }
  return curve;
}

std::string format_layer_groups(std::span<const LayerRange> groups) {
  std::string out;
  for (const LayerRange& g : groups) {
    if (!out.empty()) out += ',';
    out += std::to_string(g.first);
    if (g.last != g.first) out += '-' + std::to_string(g.last);
  }
  return out;
}

std::string BestLayerReport::groups() const {
  return format_layer_groups(layer_groups);
}

BestLayerReport best_layers(const CorrelationCurve& curve) {
  if (curve.values.empty()) throw DimError("correlation curve is empty");
  std::optional<double> best;
  for (const auto& v : curve.values) {
    if (v && (!best || *v > *best)) best = *v;
  }
  if (!best) {
    throw DegenerateError("no layer has a defined correlation for dimension '" +
                          curve.dimension + "'");
  }
  BestLayerReport report;
  report.best_value = *best;
  for (std::size_t l = 0; l < curve.values.size(); ++l) {
    if (!curve.values[l] || *curve.values[l] != *best) continue;
    if (!report.layer_groups.empty() && report.layer_groups.back().last + 1 == l) {
      report.layer_groups.back().last = l;
    } else {
      report.layer_groups.push_back({l, l});
    }
  }
  return report;
}

LabeledReference reference_from_manifest(std::string label,
                                         const DatasetManifest& alternative,
                                         const DatasetManifest& primary) {
  if (alternative.n_layers != primary.n_layers || alternative.dim != primary.dim) {
    throw ValidationError(
        "reference '" + label + "' has n_layers=" +
        std::to_string(alternative.n_layers) + ", dim=" +
        std::to_string(alternative.dim) + " but the systems have n_layers=" +
        std::to_string(primary.n_layers) + ", dim=" + std::to_string(primary.dim));
  }
  check_reference_files(alternative.reference, primary.n_layers, primary.dim,
                        "reference '" + label + "'");
  return LabeledReference{std::move(label), alternative.reference};
}

ReferenceStudyResult reference_study(
    const DatasetManifest& manifest,
    std::span<const LabeledReference> alternatives, std::string_view dimension,
    CorrelationMethod method, const SweepOptions& options,
    bool exclude_natural) {
  std::vector<LabeledReference> sets;
  sets.push_back({std::string(kPrimaryReferenceLabel), manifest.reference});
  std::set<std::string> labels{std::string(kPrimaryReferenceLabel)};
  for (const LabeledReference& alt : alternatives) {
    if (!labels.insert(alt.label).second) {
      throw ValidationError("duplicate reference label '" + alt.label + "'");
    }
    check_reference_files(alt.files, manifest.n_layers, manifest.dim,
                          "reference '" + alt.label + "'");
    sets.push_back(alt);
  }

  const DatasetSummaries summaries = build_summaries(manifest, options);
  std::set<std::string> natural;
  if (exclude_natural) {
    for (std::size_t s = 0; s < summaries.system_ids.size(); ++s) {
      if (summaries.is_natural[s]) natural.insert(summaries.system_ids[s]);
    }
  }
  const RatingsTable ratings = ratings_table(manifest);

  ReferenceStudyResult result;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const EntitySummaries reference =
        i == 0 ? summaries.reference
               : summarize_files(sets[i].files, manifest.n_layers, manifest.dim,
                                 "reference '" + sets[i].label + "'", options);
    const DistanceTable table =
        drop_systems(system_layer_distances(summaries.system_ids,
                                            summaries.systems, reference,
                                            options.threads, manifest.dataset_id),
                     natural);
    result.labels.push_back(sets[i].label);
    result.curves.push_back(correlate_layers(table, ratings, dimension, method));
  }
  return result;
}

}  // namespace layerwise
