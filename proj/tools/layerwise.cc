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

// layerwise: per-layer W2 distances between system and reference
// embeddings, correlated with listener ratings.
//
// Exit codes: 0 success, 2 invalid input or usage, 3 degenerate
// statistics, 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "layerwise/commands.h"
#include "layerwise/errors.h"

namespace {

using layerwise::RunConfig;

// Raw flag values; only flags given on the command line override the
// config file.
struct RunFlags {
  std::string config;
  std::string manifest;
  std::string pooling;
  std::string method;
  std::vector<std::string> dimensions;
  bool exclude_natural = false;
  std::string out;
  unsigned threads = 1;
  std::string cache;
  bool svg = false;
  std::vector<std::string> alt_references;
};

struct RunOptions {
  CLI::Option* manifest = nullptr;
  CLI::Option* pooling = nullptr;
  CLI::Option* method = nullptr;
  CLI::Option* dimensions = nullptr;
  CLI::Option* exclude_natural = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* threads = nullptr;
  CLI::Option* cache = nullptr;
  CLI::Option* svg = nullptr;
  CLI::Option* alt_references = nullptr;
};

RunOptions add_run_flags(CLI::App* cmd, RunFlags& f) {
  RunOptions o;
  cmd->add_option("--config", f.config,
                  "JSON config; explicit flags take precedence");
  o.manifest = cmd->add_option("--manifest", f.manifest, "Dataset manifest JSON");
  o.pooling = cmd->add_option("--pooling", f.pooling, "frames | utterance-mean")
                  ->check(CLI::IsMember({"frames", "utterance-mean"}));
  o.method = cmd->add_option("--method", f.method, "spearman | pearson")
                 ->check(CLI::IsMember({"spearman", "pearson"}));
  o.dimensions = cmd->add_option("--dimension", f.dimensions,
                                 "Rating dimension (repeatable)");
  o.exclude_natural = cmd->add_flag("--exclude-natural", f.exclude_natural,
                                    "Leave natural-speech systems out");
  o.out = cmd->add_option("--out", f.out, "Output directory");
  o.threads = cmd->add_option("--threads", f.threads, "Worker threads")
                  ->check(CLI::Range(1u, 4096u));
  o.cache = cmd->add_option("--cache", f.cache,
                            "Summary cache directory (default <out>/cache)");
  o.svg = cmd->add_flag("--svg", f.svg, "Also write an SVG chart");
  return o;
}

RunConfig resolve_run_config(const RunFlags& f, const RunOptions& o) {
  RunConfig config;
  if (!f.config.empty()) {
    const std::filesystem::path path(f.config);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw layerwise::IoError("cannot open config " + path.string());
    std::stringstream text;
    text << in.rdbuf();
    layerwise::apply_config_json(config, text.str(), path.parent_path());
  }
  if (o.manifest->count()) config.manifest = f.manifest;
  if (o.pooling->count()) config.pooling = layerwise::parse_pooling(f.pooling);
  if (o.method->count()) config.method = layerwise::parse_method(f.method);
  if (o.dimensions->count()) config.dimensions = f.dimensions;
  if (o.exclude_natural->count()) config.exclude_natural = f.exclude_natural;
  if (o.out->count()) config.out_dir = f.out;
  if (o.threads->count()) config.threads = f.threads;
  if (o.cache->count()) config.cache_dir = f.cache;
  if (o.svg->count()) config.svg = f.svg;
  if (o.alt_references && o.alt_references->count()) {
    config.alt_references.clear();
    for (const std::string& spec : f.alt_references) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw layerwise::ValidationError("--alt-reference expects label=manifest, got '" +
                                         spec + "'");
      }
      config.alt_references.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
    }
  }
  return config;
}

std::vector<std::uint32_t> parse_layer_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size() || v > UINT32_MAX) throw std::invalid_argument(item);
      out.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::logic_error&) {
      throw layerwise::ValidationError("bad layer index '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer-wise W2 analysis of speech embeddings"};
  app.require_subcommand(1);

  RunFlags stats_flags, sweep_flags, ref_flags;
  CLI::App* stats = app.add_subcommand("stats", "Fit per-layer Gaussians");
  const RunOptions stats_opts = add_run_flags(stats, stats_flags);
  CLI::App* sweep = app.add_subcommand("sweep", "Distances, correlations, best layers");
  const RunOptions sweep_opts = add_run_flags(sweep, sweep_flags);
  CLI::App* ref = app.add_subcommand("refstudy", "Compare reference sets");
  RunOptions ref_opts = add_run_flags(ref, ref_flags);
  ref_opts.alt_references =
      ref->add_option("--alt-reference", ref_flags.alt_references,
                      "label=manifest.json (repeatable)");

  layerwise::SynthConfig synth_config;
  std::string signal_layers = "1,2";
  std::string synth_out = "synth-out";
  CLI::App* synth = app.add_subcommand("synth", "Write a planted dataset");
  synth->add_option("--seed", synth_config.spec.seed, "PRNG seed");
  synth->add_option("--systems", synth_config.spec.n_systems, "Number of systems");
  synth->add_option("--layers", synth_config.spec.n_layers, "Number of layers");
  synth->add_option("--dim", synth_config.spec.dim, "Embedding dimension");
  synth->add_option("--frames", synth_config.spec.frames_per_utterance,
                    "Frames per utterance");
  synth->add_option("--utterances", synth_config.spec.utterances_per_system,
                    "Utterances per system");
  synth->add_option("--signal-layers", signal_layers,
                    "Comma-separated signal layer indices");
  synth->add_option("--shift", synth_config.spec.shift_step,
                    "Mean shift per system step");
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_flag("--reference-only", synth_config.reference_only,
                  "Write only a reference set");
  synth->add_option("--reference-offset", synth_config.reference_offset,
                    "Reference mean offset (reference-only)");
  synth->add_option("--reference-axis", synth_config.reference_axis,
                    "Axis of the reference offset (reference-only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(layerwise::ErrorClass::kInput);
  }

  auto run = [](const auto& flags, const RunOptions& opts, auto command) {
    RunConfig config;
    const int rc = layerwise::run_reporting_errors(
        [&] {
          config = resolve_run_config(flags, opts);
          return 0;
        },
        std::cerr);
    if (rc != 0) return rc;
    return command(config);
  };

  if (*stats) {
    return run(stats_flags, stats_opts, [](const RunConfig& c) {
      return layerwise::cmd_stats(c, std::cerr);
    });
  }
  if (*sweep) {
    return run(sweep_flags, sweep_opts, [](const RunConfig& c) {
      return layerwise::cmd_sweep(c, std::cerr);
    });
  }
  if (*ref) {
    return run(ref_flags, ref_opts, [](const RunConfig& c) {
      return layerwise::cmd_refstudy(c, std::cerr);
    });
  }
  const int rc = layerwise::run_reporting_errors(
      [&] {
        synth_config.spec.signal_layers = parse_layer_list(signal_layers);
        synth_config.out_dir = synth_out;
        return 0;
      },
      std::cerr);
  if (rc != 0) return rc;
  return layerwise::cmd_synth(synth_config, std::cout);
}
