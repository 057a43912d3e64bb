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

#include "layerwise/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "layerwise/embedding_store.h"
#include "layerwise/errors.h"

namespace layerwise {
namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

std::string utterance_name(std::uint32_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "utt" + digits;
}

// One utterance of N(0, I) noise, layer-major.
std::vector<double> draw_noise(SplitMix64& rng, std::uint32_t n_layers,
                               std::uint32_t frames, std::uint32_t dim) {
  std::vector<double> out(static_cast<std::size_t>(n_layers) * frames * dim);
  for (double& v : out) v = rng.normal();
  return out;
}

UtteranceEmbeddings to_embeddings(std::string id, std::uint32_t n_layers,
                                  std::uint32_t frames, std::uint32_t dim,
                                  const std::vector<double>& values) {
  UtteranceEmbeddings emb;
  emb.utterance_id = std::move(id);
  emb.n_layers = n_layers;
  emb.dim = dim;
  emb.n_frames = frames;
  emb.data.resize(values.size());
  std::transform(values.begin(), values.end(), emb.data.begin(),
                 [](double v) { return static_cast<float>(v); });
  return emb;
}

std::vector<std::filesystem::path> write_reference(
    const ReferenceSpec& spec, const std::filesystem::path& out_dir) {
  SplitMix64 rng(spec.seed ^ kReferenceStreamTag);
  std::vector<std::filesystem::path> files;
  for (std::uint32_t u = 0; u < spec.utterances; ++u) {
    std::vector<double> values =
        draw_noise(rng, spec.n_layers, spec.frames_per_utterance, spec.dim);
    if (spec.offset != 0.0) {
      for (std::size_t row = 0; row < values.size() / spec.dim; ++row) {
        values[row * spec.dim + spec.axis] += spec.offset;
      }
    }
    const std::string name = utterance_name(u);
    const std::filesystem::path path =
        out_dir / "emb" / "reference" / (name + ".lwe");
    write_embedding_file(to_embeddings("reference/" + name, spec.n_layers,
                                       spec.frames_per_utterance, spec.dim,
                                       values),
                         path);
    files.push_back(path);
  }
  return files;
}

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * kTwoPow53Inv;
}

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((next() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = static_cast<double>(next() >> 11) * kTwoPow53Inv;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void PlantedSpec::validate() const {
  if (n_systems < 3) {
    throw ValidationError("planted dataset needs at least 3 systems");
  }
  if (n_layers == 0 || dim == 0 || frames_per_utterance == 0 ||
      utterances_per_system == 0) {
    throw ValidationError(
        "layers, dim, frames per utterance and utterances must be >= 1");
  }
  for (std::uint32_t l : signal_layers) {
    if (l >= n_layers) {
      throw ValidationError("signal layer " + std::to_string(l) +
                            " outside [0, " + std::to_string(n_layers) + ")");
    }
  }
  if (!std::isfinite(shift_step) || shift_step < 0.0) {
    throw ValidationError("shift step must be finite and >= 0");
  }
}

void ReferenceSpec::validate() const {
  if (n_layers == 0 || dim == 0 || frames_per_utterance == 0 || utterances == 0) {
    throw ValidationError(
        "layers, dim, frames per utterance and utterances must be >= 1");
  }
  if (axis >= dim) {
    throw ValidationError("reference axis " + std::to_string(axis) +
                          " outside [0, " + std::to_string(dim) + ")");
  }
  if (!std::isfinite(offset)) throw ValidationError("offset must be finite");
}

DatasetManifest gen_planted_dataset(const PlantedSpec& spec,
                                    const std::filesystem::path& out_dir) {
  spec.validate();
  std::vector<bool> is_signal(spec.n_layers, false);
  for (std::uint32_t l : spec.signal_layers) is_signal[l] = true;

  DatasetManifest manifest;
  manifest.dataset_id = "planted-seed" + std::to_string(spec.seed);
  manifest.model_id = "synthetic-gaussian";
  manifest.n_layers = spec.n_layers;
  manifest.dim = spec.dim;
  for (std::uint32_t k = 0; k < spec.n_systems; ++k) {
    SystemEntry entry;
    entry.system_id = "sys" + std::to_string(k);
    entry.is_natural = k == 0;
    entry.ratings["naturalness"] =
        5.0 - 4.0 * k / static_cast<double>(spec.n_systems - 1);
    manifest.systems.push_back(std::move(entry));
  }

  const std::size_t layer_values =
      static_cast<std::size_t>(spec.frames_per_utterance) * spec.dim;
  SplitMix64 rng(spec.seed);
  for (std::uint32_t u = 0; u < spec.utterances_per_system; ++u) {
    const std::vector<double> noise = draw_noise(
        rng, spec.n_layers, spec.frames_per_utterance, spec.dim);
    const std::string name = utterance_name(u);
    for (std::uint32_t k = 0; k < spec.n_systems; ++k) {
      std::vector<double> values = noise;
      const double shift = k * spec.shift_step;
      for (std::uint32_t l = 0; l < spec.n_layers; ++l) {
        if (!is_signal[l]) continue;
        for (std::uint32_t t = 0; t < spec.frames_per_utterance; ++t) {
          values[l * layer_values + static_cast<std::size_t>(t) * spec.dim] +=
              shift;
        }
      }
      SystemEntry& entry = manifest.systems[k];
      const std::filesystem::path path =
          out_dir / "emb" / entry.system_id / (name + ".lwe");
      write_embedding_file(
          to_embeddings(entry.system_id + "/" + name, spec.n_layers,
                        spec.frames_per_utterance, spec.dim, values),
          path);
      entry.utterances.push_back(path);
    }
  }

  ReferenceSpec reference;
  reference.seed = spec.seed;
  reference.n_layers = spec.n_layers;
  reference.dim = spec.dim;
  reference.frames_per_utterance = spec.frames_per_utterance;
  reference.utterances = spec.utterances_per_system;
  manifest.reference = write_reference(reference, out_dir);
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

DatasetManifest gen_reference_set(const ReferenceSpec& spec,
                                  const std::filesystem::path& out_dir) {
  spec.validate();
  DatasetManifest manifest;
  manifest.dataset_id = "reference-seed" + std::to_string(spec.seed);
  manifest.model_id = "synthetic-gaussian";
  manifest.n_layers = spec.n_layers;
  manifest.dim = spec.dim;
  manifest.reference = write_reference(spec, out_dir);
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace layerwise
