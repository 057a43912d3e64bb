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

#include "layerwise/commands.h"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "byte_io.h"
#include "layerwise/embedding_store.h"
#include "layerwise/errors.h"
#include "layerwise/manifest.h"
#include "layerwise/report.h"

namespace layerwise {
namespace {

using nlohmann::json;

SweepOptions sweep_options(const RunConfig& config, std::ostream& log) {
  if (config.threads == 0) throw ValidationError("--threads must be >= 1");
  SweepOptions options;
  options.pooling = config.pooling;
  options.threads = config.threads;
  options.cache_dir = config.effective_cache_dir();
  options.log = [&log](std::string_view line) { log << line << '\n'; };
  return options;
}

DatasetManifest load_manifest(const RunConfig& config) {
  if (config.manifest.empty()) throw ValidationError("--manifest is required");
  return read_manifest(config.manifest);
}

void write_output(const std::filesystem::path& path, const std::string& text,
                  std::ostream& log) {
  write_text_file_atomic(path, text);
  log << "wrote " << path.string() << '\n';
}

void export_summaries(const EntitySummaries& entity,
                      const std::filesystem::path& target, std::ostream& log) {
  if (const std::filesystem::path* source = entity.file()) {
    write_file_atomic(target, read_file(*source));
  } else {
    write_summary_file(entity.all_layers(), target);
  }
  log << "wrote " << target.string() << '\n';
}

void check_file_safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." ||
      id.find_first_of("/\\") != std::string::npos) {
    throw ValidationError("system id '" + id +
                          "' cannot be used as a file name");
  }
}

std::set<std::string> natural_ids(const DatasetManifest& manifest) {
  std::set<std::string> out;
  for (const SystemEntry& s : manifest.systems) {
    if (s.is_natural) out.insert(s.system_id);
  }
  return out;
}

std::vector<std::string> included_ids(const DatasetManifest& manifest,
                                      bool exclude_natural) {
  std::vector<std::string> out;
  for (const SystemEntry& s : manifest.systems) {
    if (!(exclude_natural && s.is_natural)) out.push_back(s.system_id);
  }
  return out;
}

std::vector<std::string> unique_in_order(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const std::string& s : in) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& text) {
  const std::filesystem::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

const json& typed(const json& value, json::value_t type, const std::string& key,
                  const char* expected) {
  const bool ok = type == json::value_t::number_unsigned
                      ? value.is_number_unsigned()
                      : value.type() == type;
  if (!ok) {
    throw SchemaError("config: \"" + key + "\" must be " + expected);
  }
  return value;
}

}  // namespace

std::filesystem::path RunConfig::effective_cache_dir() const {
  return cache_dir ? *cache_dir : out_dir / "cache";
}

void apply_config_json(RunConfig& config, std::string_view text,
                       const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("config must be a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (key == "manifest") {
      config.manifest = resolve(
          base_dir, typed(value, json::value_t::string, key, "a string"));
    } else if (key == "pooling") {
      config.pooling = parse_pooling(
          typed(value, json::value_t::string, key, "a string").get<std::string>());
    } else if (key == "method") {
      config.method = parse_method(
          typed(value, json::value_t::string, key, "a string").get<std::string>());
    } else if (key == "dimensions") {
      config.dimensions.clear();
      if (value.is_string()) {
        config.dimensions.push_back(value.get<std::string>());
      } else {
        typed(value, json::value_t::array, key, "a string or string array");
        for (const json& d : value) {
          typed(d, json::value_t::string, key, "a string or string array");
          config.dimensions.push_back(d.get<std::string>());
        }
      }
    } else if (key == "exclude_natural") {
      config.exclude_natural =
          typed(value, json::value_t::boolean, key, "a boolean").get<bool>();
    } else if (key == "out") {
      config.out_dir = resolve(
          base_dir, typed(value, json::value_t::string, key, "a string"));
    } else if (key == "threads") {
      const auto n = typed(value, json::value_t::number_unsigned, key,
                           "a positive integer")
                         .get<std::uint64_t>();
      if (n == 0 || n > 4096) {
        throw SchemaError("config: \"threads\" must be in [1, 4096]");
      }
      config.threads = static_cast<unsigned>(n);
    } else if (key == "cache") {
      config.cache_dir = resolve(
          base_dir, typed(value, json::value_t::string, key, "a string"));
    } else if (key == "svg") {
      config.svg = typed(value, json::value_t::boolean, key, "a boolean").get<bool>();
    } else if (key == "alt_references") {
      typed(value, json::value_t::object, key, "an object of label: path");
      config.alt_references.clear();
      for (const auto& [label, path] : value.items()) {
        typed(path, json::value_t::string, key, "an object of label: path");
        config.alt_references.emplace_back(
            label, resolve(base_dir, path.get<std::string>()));
      }
    } else {
      throw SchemaError("config: unknown key \"" + key + "\"");
    }
  }
}

int run_reporting_errors(const std::function<int()>& fn, std::ostream& log) {
  try {
    return fn();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::kInput);
  }
}

int cmd_stats(const RunConfig& config, std::ostream& log) {
  return run_reporting_errors(
      [&] {
        const DatasetManifest manifest = load_manifest(config);
        for (const SystemEntry& s : manifest.systems) {
          check_file_safe_id(s.system_id);
        }
        const DatasetSummaries summaries =
            build_summaries(manifest, sweep_options(config, log));
        const std::filesystem::path dir = config.out_dir / "summaries";
        for (std::size_t i = 0; i < summaries.systems.size(); ++i) {
          export_summaries(summaries.systems[i],
                           dir / "systems" / (summaries.system_ids[i] + ".lws"),
                           log);
        }
        export_summaries(summaries.reference, dir / "reference.lws", log);
        return 0;
      },
      log);
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  return run_reporting_errors(
      [&] {
        const DatasetManifest manifest = load_manifest(config);
        const DatasetSummaries summaries =
            build_summaries(manifest, sweep_options(config, log));
        const DistanceTable table = system_layer_distances(
            summaries, config.threads, manifest.dataset_id);
        write_output(config.out_dir / "distances.csv", distances_csv(table), log);

        const DistanceTable used = drop_systems(
            table, config.exclude_natural ? natural_ids(manifest)
                                          : std::set<std::string>{});
        const RatingsTable ratings = ratings_table(manifest);
        std::vector<std::string> dimensions =
            config.dimensions.empty()
                ? common_dimensions(ratings, used.system_ids)
                : unique_in_order(config.dimensions);
        if (dimensions.empty()) {
          throw ValidationError("no rating dimension is shared by all systems");
        }

        std::vector<CorrelationCurve> curves;
        for (const std::string& d : dimensions) {
          curves.push_back(correlate_layers(used, ratings, d, config.method));
        }
        write_output(config.out_dir / "correlations.csv", correlations_csv(curves),
                     log);

        std::map<std::string, BestLayerReport> best;
        std::vector<std::string> degenerate;
        for (const CorrelationCurve& c : curves) {
          try {
            const BestLayerReport report = best_layers(c);
            log << c.dimension << ": best " << format_fixed6(report.best_value)
                << " at layers " << report.groups() << '\n';
            best.emplace(c.dimension, report);
          } catch (const DegenerateError&) {
            degenerate.push_back(c.dimension);
          }
        }
        write_output(config.out_dir / "best_layers.json", best_layers_json(best),
                     log);
        if (config.svg) {
          write_output(config.out_dir / "curves.svg",
                       curves_svg(dimensions, curves,
                                  manifest.dataset_id + " (" +
                                      std::string(method_name(config.method)) +
                                      ")"),
                       log);
        }
        if (!degenerate.empty()) {
          std::string names;
          for (const std::string& d : degenerate) {
            names += (names.empty() ? "" : ", ") + d;
          }
          throw DegenerateError("no layer has a defined correlation for: " +
                                names);
        }
        return 0;
      },
      log);
}

int cmd_refstudy(const RunConfig& config, std::ostream& log) {
  return run_reporting_errors(
      [&] {
        if (config.alt_references.empty()) {
          throw ValidationError("refstudy needs at least one alternative reference");
        }
        const DatasetManifest manifest = load_manifest(config);
        const SweepOptions options = sweep_options(config, log);
        std::vector<LabeledReference> alternatives;
        for (const auto& [label, path] : config.alt_references) {
          if (label.empty()) throw ValidationError("empty reference label");
          DatasetManifest alt;
          try {
            alt = read_manifest(path);
          } catch (const Error& e) {
            rethrow_with_context(e, "reference '" + label + "'");
          }
          alternatives.push_back(reference_from_manifest(label, alt, manifest));
        }

        std::string dimension;
        if (config.dimensions.size() > 1) {
          throw ValidationError("refstudy takes a single --dimension");
        } else if (config.dimensions.size() == 1) {
          dimension = config.dimensions.front();
        } else {
          const std::vector<std::string> ids =
              included_ids(manifest, config.exclude_natural);
          const std::vector<std::string> dims =
              common_dimensions(ratings_table(manifest), ids);
          if (dims.empty()) {
            throw ValidationError("no rating dimension is shared by all systems");
          }
          dimension = dims.front();
          log << "dimension: " << dimension << '\n';
        }

        const ReferenceStudyResult result =
            reference_study(manifest, alternatives, dimension, config.method,
                            options, config.exclude_natural);
        write_output(config.out_dir / "refstudy.csv", refstudy_csv(result), log);
        if (config.svg) {
          write_output(config.out_dir / "refstudy.svg",
                       curves_svg(result.labels, result.curves,
                                  manifest.dataset_id + ": " + dimension),
                       log);
        }
        return 0;
      },
      log);
}

int cmd_synth(const SynthConfig& config, std::ostream& log) {
  return run_reporting_errors(
      [&] {
        if (config.reference_only) {
          ReferenceSpec spec;
          spec.seed = config.spec.seed;
          spec.n_layers = config.spec.n_layers;
          spec.dim = config.spec.dim;
          spec.frames_per_utterance = config.spec.frames_per_utterance;
          spec.utterances = config.spec.utterances_per_system;
          spec.offset = config.reference_offset;
          spec.axis = config.reference_axis;
          gen_reference_set(spec, config.out_dir);
        } else {
          gen_planted_dataset(config.spec, config.out_dir);
        }
        log << (config.out_dir / "manifest.json").string() << '\n';
        return 0;
      },
      log);
}

}  // namespace layerwise
