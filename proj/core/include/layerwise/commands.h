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

#ifndef LAYERWISE_COMMANDS_H_
#define LAYERWISE_COMMANDS_H_

// Subcommand implementations behind the `layerwise` tool. Each returns a
// process exit code: 0 on success, otherwise the ErrorClass value of the
// failure (2 input, 3 degenerate statistics, 4 numerical). Progress and
// error messages go to `log`.

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layerwise/rank_stats.h"
#include "layerwise/sweep.h"
#include "layerwise/synthetic.h"

namespace layerwise {

struct RunConfig {
  std::filesystem::path manifest;
  PoolingMode pooling = PoolingMode::kFrames;
  CorrelationMethod method = CorrelationMethod::kSpearman;
  // Empty means every dimension rated by all included systems.
  std::vector<std::string> dimensions;
  bool exclude_natural = false;
  std::filesystem::path out_dir = "layerwise-out";
  unsigned threads = 1;
  // Defaults to <out_dir>/cache.
  std::optional<std::filesystem::path> cache_dir;
  bool svg = false;
  // refstudy only: (label, manifest path) of each alternative reference.
  std::vector<std::pair<std::string, std::filesystem::path>> alt_references;

  std::filesystem::path effective_cache_dir() const;
};

// Overlays keys from a JSON object onto `config`. Recognized keys:
// manifest, pooling, method, dimensions (array or string), exclude_natural,
// out, threads, cache, svg, alt_references ({label: path}). Relative paths
// resolve against `base_dir`. SchemaError on unknown keys or wrong types.
void apply_config_json(RunConfig& config, std::string_view json,
                       const std::filesystem::path& base_dir);

// Writes <out>/summaries/systems/<id>.lws and <out>/summaries/reference.lws.
int cmd_stats(const RunConfig& config, std::ostream& log);

// Writes distances.csv, correlations.csv, best_layers.json and, with svg,
// curves.svg into the output directory. A dimension whose curve has no
// defined layer still gets its correlations.csv rows; the command then
// exits 3.
int cmd_sweep(const RunConfig& config, std::ostream& log);

// Writes refstudy.csv (and refstudy.svg) for a single rating dimension.
int cmd_refstudy(const RunConfig& config, std::ostream& log);

struct SynthConfig {
  PlantedSpec spec;
  std::filesystem::path out_dir = "synth-out";
  // Writes only a reference set, shifted by reference_offset along
  // reference_axis.
  bool reference_only = false;
  double reference_offset = 0.0;
  std::uint32_t reference_axis = 1;
};

// Prints the manifest path on success.
int cmd_synth(const SynthConfig& config, std::ostream& log);

// Runs `fn`, mapping a thrown Error to its exit code after printing
// "error: <message>" to `log`.
int run_reporting_errors(const std::function<int()>& fn, std::ostream& log);

}  // namespace layerwise

#endif  // LAYERWISE_COMMANDS_H_
