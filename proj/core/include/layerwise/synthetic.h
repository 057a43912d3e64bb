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

#ifndef LAYERWISE_SYNTHETIC_H_
#define LAYERWISE_SYNTHETIC_H_

// Planted datasets with known ground truth.
//
// Random streams use SplitMix64 (64-bit state, increment 0x9E3779B97F4A7C15,
// output mix constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB, shifts
// 30/27/31). Uniforms take the top 53 bits. Standard normals come in pairs
// from Box-Muller: u1 = (top53 + 1)·2^-53, u2 = top53·2^-53,
// z0 = sqrt(-2 ln u1) cos(2π u2), z1 = sqrt(-2 ln u1) sin(2π u2).
//
// Draw order for every utterance is layer, then frame, then dim. System
// utterances draw from the stream seeded with `seed`; reference utterances
// from the stream seeded with seed ^ kReferenceStreamTag. All systems share
// the same noise draws (common random numbers): system k's value is
// noise + k·shift_step on dim 0 of the signal layers and plain noise
// elsewhere. Each system's marginal is therefore N(k·shift·e0, I) at signal
// layers and N(0, I) at the others, while non-signal layers carry no
// between-system variation at all.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "layerwise/manifest.h"

namespace layerwise {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // [0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr std::uint64_t kReferenceStreamTag = 0x5245464552454E43ULL;

struct PlantedSpec {
  std::uint64_t seed = 7;
  std::uint32_t n_systems = 5;
  std::uint32_t n_layers = 6;
  std::uint32_t dim = 8;
  std::uint32_t frames_per_utterance = 250;
  std::uint32_t utterances_per_system = 8;
  std::vector<std::uint32_t> signal_layers = {1, 2};
  double shift_step = 1.0;

  // ValidationError unless n_systems >= 3, all sizes >= 1, signal layers
  // inside [0, n_layers) and shift_step finite and >= 0.
  void validate() const;
};

// Writes LWE1 files under out_dir/emb/ and out_dir/manifest.json.
// System k (id "sys<k>") has naturalness 5 - 4k/(K-1); sys0 is flagged
// natural. The reference has the same utterance count and length as a
// system.
DatasetManifest gen_planted_dataset(const PlantedSpec& spec,
                                    const std::filesystem::path& out_dir);

// A reference-only dataset (empty system list): N(offset·e_axis, I) at
// every layer. With offset 0 and the same seed and shape it reproduces the
// planted dataset's reference files bit for bit.
struct ReferenceSpec {
  std::uint64_t seed = 7;
  std::uint32_t n_layers = 6;
  std::uint32_t dim = 8;
  std::uint32_t frames_per_utterance = 250;
  std::uint32_t utterances = 8;
  double offset = 0.0;
  std::uint32_t axis = 0;

  void validate() const;
};

DatasetManifest gen_reference_set(const ReferenceSpec& spec,
                                  const std::filesystem::path& out_dir);

}  // namespace layerwise

#endif  // LAYERWISE_SYNTHETIC_H_
