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

#ifndef LAYERWISE_MANIFEST_H_
#define LAYERWISE_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace layerwise {

struct SystemEntry {
  std::string system_id;
  bool is_natural = false;
  // Dimension name -> mean opinion score on the 1..5 scale.
  std::map<std::string, double> ratings;
  std::vector<std::filesystem::path> utterances;

  friend bool operator==(const SystemEntry&, const SystemEntry&) = default;
};

// JSON schema:
//   {"dataset_id": str, "model_id": str, "n_layers": int, "dim": int,
//    "systems": [{"system_id": str, "is_natural": bool,
//                 "ratings": {dim: mos}, "utterances": [path, ...]}],
//    "reference": [path, ...]}
// Relative paths resolve against the manifest's directory.
struct DatasetManifest {
  std::string dataset_id;
  std::string model_id;
  std::uint32_t n_layers = 0;
  std::uint32_t dim = 0;
  std::vector<SystemEntry> systems;
  std::vector<std::filesystem::path> reference;

  friend bool operator==(const DatasetManifest&,
                         const DatasetManifest&) = default;
};

inline constexpr double kMinRating = 1.0;
inline constexpr double kMaxRating = 5.0;

// Throws SchemaError on malformed JSON, missing keys, wrong types or
// duplicate system ids; RangeError for ratings outside [1, 5].
DatasetManifest parse_manifest(std::string_view json_text,
                               const std::filesystem::path& base_dir);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Paths under the manifest's directory are written relative to it.
std::string manifest_to_json(const DatasetManifest& manifest,
                             const std::filesystem::path& base_dir);
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);

// Opens every referenced file's header: throws IoError for missing files
// and ValidationError when a file's layer count or dim disagrees with the
// manifest. With require_reference, an empty reference list is rejected.
void validate_dataset(const DatasetManifest& manifest,
                      bool require_reference = true);

}  // namespace layerwise

#endif  // LAYERWISE_MANIFEST_H_
