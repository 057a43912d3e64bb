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

#ifndef LAYERWISE_EMBEDDING_STORE_H_
#define LAYERWISE_EMBEDDING_STORE_H_

// Binary on-disk formats.
//
// LWE1 (one utterance, all layers), little-endian throughout:
//   "LWE1" | u32 version=1 | u32 n_layers | u32 dim | u32 n_frames |
//   u16 id_len | id bytes (UTF-8) | n_layers x n_frames x dim f32
// Each layer block is frame-major (row-major T x D).
//
// LWS1 (per-layer Gaussian summaries of one entity):
//   "LWS1" | u32 version=1 | u32 n_layers | u32 dim |
//   per layer: u64 count | dim f64 mean | dim*dim f64 covariance (row-major)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "layerwise/gaussian_summary.h"

namespace layerwise {

inline constexpr std::uint32_t kFormatVersion = 1;

struct UtteranceEmbeddings {
  std::string utterance_id;
  std::uint32_t n_layers = 0;
  std::uint32_t dim = 0;
  std::uint32_t n_frames = 0;
  std::vector<float> data;  // n_layers * n_frames * dim

  std::size_t layer_size() const {
    return static_cast<std::size_t>(n_frames) * dim;
  }
  std::span<const float> layer(std::size_t index) const;

  // Throws DimError on shape problems, DataError on NaN/Inf.
  void validate() const;

  friend bool operator==(const UtteranceEmbeddings&,
                         const UtteranceEmbeddings&) = default;
};

struct EmbeddingHeader {
  std::string utterance_id;
  std::uint32_t n_layers = 0;
  std::uint32_t dim = 0;
  std::uint32_t n_frames = 0;
};

// Frames of one layer of one utterance, row-major n_frames x dim.
struct LayerFrames {
  std::uint32_t n_frames = 0;
  std::uint32_t dim = 0;
  std::vector<float> data;
};

std::vector<std::uint8_t> encode_embeddings(const UtteranceEmbeddings& emb);
UtteranceEmbeddings decode_embeddings(std::span<const std::uint8_t> bytes);

void write_embedding_file(const UtteranceEmbeddings& emb,
                          const std::filesystem::path& path);
UtteranceEmbeddings read_embedding_file(const std::filesystem::path& path);
EmbeddingHeader read_embedding_header(const std::filesystem::path& path);
// Reads a single layer block without loading the others.
LayerFrames read_embedding_layer(const std::filesystem::path& path,
                                 std::size_t layer);

struct SummaryHeader {
  std::uint32_t n_layers = 0;
  std::uint32_t dim = 0;
};

std::vector<std::uint8_t> encode_summaries(
    std::span<const GaussianSummary> layers);
std::vector<GaussianSummary> decode_summaries(
    std::span<const std::uint8_t> bytes);

// Writes via a temporary file and rename, so readers never observe a
// partially written summary.
void write_summary_file(std::span<const GaussianSummary> layers,
                        const std::filesystem::path& path);
std::vector<GaussianSummary> read_summary_file(
    const std::filesystem::path& path);
SummaryHeader read_summary_header(const std::filesystem::path& path);
GaussianSummary read_summary_layer(const std::filesystem::path& path,
                                   std::size_t layer);

}  // namespace layerwise

#endif  // LAYERWISE_EMBEDDING_STORE_H_
