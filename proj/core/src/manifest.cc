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

#include "layerwise/manifest.h"

#include <set>

#include "byte_io.h"
#include <nlohmann/json.hpp>
#include "layerwise/embedding_store.h"
#include "layerwise/errors.h"

namespace layerwise {
namespace {

using nlohmann::json;

const json& require(const json& object, const char* key,
                    const std::string& where) {
  if (!object.is_object()) throw SchemaError(where + ": expected an object");
  const auto it = object.find(key);
  if (it == object.end()) {
    throw SchemaError(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& object, const char* key,
                           const std::string& where) {
  const json& v = require(object, key, where);
  if (!v.is_string()) {
    throw SchemaError(where + ": \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::uint32_t require_positive(const json& object, const char* key,
                               const std::string& where) {
  const json& v = require(object, key, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1 ||
      v.get<std::int64_t>() > 0xffffffffLL) {
    throw SchemaError(where + ": \"" + key + "\" must be a positive integer");
  }
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

std::vector<std::filesystem::path> require_paths(
    const json& object, const char* key, const std::string& where,
    const std::filesystem::path& base_dir) {
  const json& v = require(object, key, where);
  if (!v.is_array()) {
    throw SchemaError(where + ": \"" + key + "\" must be an array");
  }
  std::vector<std::filesystem::path> paths;
  paths.reserve(v.size());
  for (const json& item : v) {
    if (!item.is_string()) {
      throw SchemaError(where + ": \"" + key + "\" entries must be strings");
    }
    std::filesystem::path p(item.get<std::string>());
    paths.push_back(p.is_absolute() ? p : (base_dir / p).lexically_normal());
  }
  return paths;
}

std::string relative_if_inside(const std::filesystem::path& p,
                               const std::filesystem::path& base_dir) {
  if (base_dir.empty()) return p.generic_string();
  const std::filesystem::path rel = p.lexically_relative(base_dir);
  if (rel.empty() || *rel.begin() == "..") return p.generic_string();
  return rel.generic_string();
}

}  // namespace

DatasetManifest parse_manifest(std::string_view json_text,
                               const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("manifest is not valid JSON: ") + e.what());
  }
  const std::string where = "manifest";
  DatasetManifest m;
  m.dataset_id = require_string(doc, "dataset_id", where);
  m.model_id = require_string(doc, "model_id", where);
  m.n_layers = require_positive(doc, "n_layers", where);
  m.dim = require_positive(doc, "dim", where);

  const json& systems = require(doc, "systems", where);
  if (!systems.is_array()) {
    throw SchemaError(where + ": \"systems\" must be an array");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const std::string sw = where + ".systems[" + std::to_string(i) + "]";
    const json& s = systems[i];
    SystemEntry entry;
    entry.system_id = require_string(s, "system_id", sw);
    if (!seen.insert(entry.system_id).second) {
      throw SchemaError(where + ": duplicate system_id '" + entry.system_id +
                        "'");
    }
    const json& natural = require(s, "is_natural", sw);
    if (!natural.is_boolean()) {
      throw SchemaError(sw + ": \"is_natural\" must be a boolean");
    }
    entry.is_natural = natural.get<bool>();
    const json& ratings = require(s, "ratings", sw);
    if (!ratings.is_object()) {
      throw SchemaError(sw + ": \"ratings\" must be an object");
    }
    for (const auto& [name, value] : ratings.items()) {
      if (!value.is_number()) {
        throw SchemaError(sw + ": rating \"" + name + "\" must be a number");
      }
      const double mos = value.get<double>();
      if (!(mos >= kMinRating && mos <= kMaxRating)) {
        throw RangeError("system '" + entry.system_id + "': rating \"" +
                         name + "\" = " + std::to_string(mos) +
                         " outside [1, 5]");
      }
      entry.ratings.emplace(name, mos);
    }
    entry.utterances = require_paths(s, "utterances", sw, base_dir);
    if (entry.utterances.empty()) {
      throw SchemaError("system '" + entry.system_id + "' has no utterances");
    }
    m.systems.push_back(std::move(entry));
  }
  m.reference = require_paths(doc, "reference", where, base_dir);
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_manifest(text, path.parent_path());
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
}

std::string manifest_to_json(const DatasetManifest& manifest,
                             const std::filesystem::path& base_dir) {
  json doc = json::object();
  doc["dataset_id"] = manifest.dataset_id;
  doc["model_id"] = manifest.model_id;
  doc["n_layers"] = manifest.n_layers;
  doc["dim"] = manifest.dim;
  json systems = json::array();
  for (const SystemEntry& s : manifest.systems) {
    json entry = json::object();
    entry["system_id"] = s.system_id;
    entry["is_natural"] = s.is_natural;
    json ratings = json::object();
    for (const auto& [name, mos] : s.ratings) ratings[name] = mos;
    entry["ratings"] = ratings;
    json utts = json::array();
    for (const auto& p : s.utterances) utts.push_back(relative_if_inside(p, base_dir));
    entry["utterances"] = utts;
    systems.push_back(entry);
  }
  doc["systems"] = systems;
  json reference = json::array();
  for (const auto& p : manifest.reference) {
    reference.push_back(relative_if_inside(p, base_dir));
  }
  doc["reference"] = reference;
  return doc.dump(2) + "\n";
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path) {
  write_text_file_atomic(path, manifest_to_json(manifest, path.parent_path()));
}

void validate_dataset(const DatasetManifest& manifest, bool require_reference) {
  if (require_reference && manifest.reference.empty()) {
    throw ValidationError("manifest '" + manifest.dataset_id +
                          "' has an empty reference list");
  }
  auto check = [&](const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) {
      throw IoError("embedding file not found: " + p.string());
    }
    const EmbeddingHeader h = read_embedding_header(p);
    if (h.n_layers != manifest.n_layers || h.dim != manifest.dim) {
      throw ValidationError(
          p.string() + ": has n_layers=" + std::to_string(h.n_layers) +
          ", dim=" + std::to_string(h.dim) + " but manifest declares n_layers=" +
          std::to_string(manifest.n_layers) +
          ", dim=" + std::to_string(manifest.dim));
    }
  };
  for (const SystemEntry& s : manifest.systems) {
    for (const auto& p : s.utterances) check(p);
  }
  for (const auto& p : manifest.reference) check(p);
}

}  // namespace layerwise
