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

#include "layerwise/embedding_store.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <system_error>

#include "byte_io.h"
#include "layerwise/errors.h"

namespace layerwise {
namespace {

constexpr std::array<char, 4> kEmbeddingMagic = {'L', 'W', 'E', '1'};
constexpr std::array<char, 4> kSummaryMagic = {'L', 'W', 'S', '1'};

// magic + version + n_layers + dim
constexpr std::size_t kSummaryHeaderBytes = 16;

void check_magic(ByteReader& reader, const std::array<char, 4>& expected,
                 const std::string& what) {
  std::array<char, 4> magic{};
  reader.read_bytes(std::as_writable_bytes(std::span(magic)));
  if (magic != expected) {
    throw FormatError(what + ": bad magic, expected \"" +
                      std::string(expected.begin(), expected.end()) + "\"");
  }
  const std::uint32_t version = reader.u32();
  if (version != kFormatVersion) {
    throw FormatError(what + ": unsupported version " +
                      std::to_string(version));
  }
}

std::uint64_t summary_layer_bytes(std::uint64_t dim) {
  return 8 + 8 * dim + 8 * dim * dim;
}

EmbeddingHeader parse_embedding_header(ByteReader& reader,
                                       const std::string& what) {
  check_magic(reader, kEmbeddingMagic, what);
  EmbeddingHeader header;
  header.n_layers = reader.u32();
  header.dim = reader.u32();
  header.n_frames = reader.u32();
  const std::uint16_t id_len = reader.u16();
  header.utterance_id.resize(id_len);
  reader.read_bytes(std::as_writable_bytes(std::span(header.utterance_id)));
  if (header.n_layers == 0 || header.dim == 0 || header.n_frames == 0) {
    throw FormatError(what + ": zero-sized layer, frame or dim count");
  }
  return header;
}

std::uint64_t payload_floats(const EmbeddingHeader& header,
                             const std::string& what) {
  const std::uint64_t per_layer =
      static_cast<std::uint64_t>(header.n_frames) * header.dim;
  if (per_layer > std::numeric_limits<std::uint64_t>::max() / 4 /
                      header.n_layers) {
    throw TruncationError(what + ": declared payload is impossibly large");
  }
  return per_layer * header.n_layers;
}

void check_finite(std::span<const float> values, const std::string& what) {
  const auto it = std::find_if(values.begin(), values.end(),
                               [](float v) { return !std::isfinite(v); });
  if (it != values.end()) {
    throw DataError(what + ": non-finite value at offset " +
                    std::to_string(it - values.begin()));
  }
}

void check_summaries(std::span<const GaussianSummary> layers) {
  if (layers.empty()) throw DimError("summary list is empty");
  const std::size_t dim = layers.front().dim();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].dim() != dim) {
      throw DimError("summary layer " + std::to_string(l) + " has dim " +
                     std::to_string(layers[l].dim()) + ", expected " +
                     std::to_string(dim));
    }
    layers[l].validate();
  }
}

GaussianSummary parse_summary_layer(ByteReader& reader, std::size_t dim) {
  GaussianSummary summary;
  summary.count = reader.u64();
  summary.mean.resize(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) summary.mean(i) = reader.f64();
  summary.covariance.resize(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) summary.covariance(r, c) = reader.f64();
  }
  return summary;
}

}  // namespace

std::span<const float> UtteranceEmbeddings::layer(std::size_t index) const {
  if (index >= n_layers) {
    throw DimError("layer " + std::to_string(index) + " out of range [0, " +
                   std::to_string(n_layers) + ")");
  }
  return std::span<const float>(data).subspan(index * layer_size(),
                                              layer_size());
}

void UtteranceEmbeddings::validate() const {
  if (n_layers == 0 || dim == 0 || n_frames == 0) {
    throw DimError("utterance '" + utterance_id +
                   "': n_layers, dim and n_frames must all be >= 1");
  }
  if (utterance_id.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw DataError("utterance id longer than 65535 bytes");
  }
  const std::uint64_t expected =
      static_cast<std::uint64_t>(n_layers) * n_frames * dim;
  if (data.size() != expected) {
    throw DimError("utterance '" + utterance_id + "': data holds " +
                   std::to_string(data.size()) + " values, expected " +
                   std::to_string(expected));
  }
  check_finite(data, "utterance '" + utterance_id + "'");
}

void GaussianSummary::validate() const {
  if (count < 2) {
    throw DataError("summary count must be >= 2, got " + std::to_string(count));
  }
  const Eigen::Index d = mean.size();
  if (d == 0 || covariance.rows() != d || covariance.cols() != d) {
    throw DimError("summary covariance shape does not match mean of size " +
                   std::to_string(d));
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    throw DataError("summary holds non-finite values");
  }
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) {
    throw NotSymmetricError("summary covariance asymmetric by " +
                            std::to_string(asym));
  }
}

std::vector<std::uint8_t> encode_embeddings(const UtteranceEmbeddings& emb) {
  emb.validate();
  ByteWriter writer;
  writer.reserve(22 + emb.utterance_id.size() + 4 * emb.data.size());
  writer.write_bytes(std::as_bytes(std::span(kEmbeddingMagic)));
  writer.u32(kFormatVersion);
  writer.u32(emb.n_layers);
  writer.u32(emb.dim);
  writer.u32(emb.n_frames);
  writer.u16(static_cast<std::uint16_t>(emb.utterance_id.size()));
  writer.write_bytes(std::as_bytes(std::span(emb.utterance_id)));
  for (float v : emb.data) writer.f32(v);
  return std::move(writer).take();
}

UtteranceEmbeddings decode_embeddings(std::span<const std::uint8_t> bytes) {
  const std::string what = "LWE1";
  ByteReader reader(bytes);
  EmbeddingHeader header = parse_embedding_header(reader, what);
  const std::uint64_t n = payload_floats(header, what);
  if (reader.remaining() < n * 4) {
    throw TruncationError(what + ": payload truncated, " +
                          std::to_string(reader.remaining()) +
                          " bytes available, " + std::to_string(n * 4) +
                          " expected");
  }
  UtteranceEmbeddings emb;
  emb.utterance_id = std::move(header.utterance_id);
  emb.n_layers = header.n_layers;
  emb.dim = header.dim;
  emb.n_frames = header.n_frames;
  emb.data.resize(n);
  for (float& v : emb.data) v = reader.f32();
  if (reader.remaining() != 0) {
    throw FormatError(what + ": " + std::to_string(reader.remaining()) +
                      " trailing bytes after payload");
  }
  check_finite(emb.data, what + " utterance '" + emb.utterance_id + "'");
  return emb;
}

void write_embedding_file(const UtteranceEmbeddings& emb,
                          const std::filesystem::path& path) {
  write_file_atomic(path, encode_embeddings(emb));
}

UtteranceEmbeddings read_embedding_file(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return decode_embeddings(bytes);
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
}

EmbeddingHeader read_embedding_header(const std::filesystem::path& path) {
  // Header is at most 22 + 65535 bytes.
  const std::vector<std::uint8_t> bytes = read_file_prefix(path, 22 + 65535);
  try {
    ByteReader reader(bytes);
    return parse_embedding_header(reader, "LWE1");
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
}

LayerFrames read_embedding_layer(const std::filesystem::path& path,
                                 std::size_t layer) {
  const EmbeddingHeader header = read_embedding_header(path);
  if (layer >= header.n_layers) {
    throw DimError(path.string() + ": layer " + std::to_string(layer) +
                   " out of range [0, " + std::to_string(header.n_layers) +
                   ")");
  }
  const std::uint64_t total = payload_floats(header, path.string());
  const std::uint64_t header_bytes = 22 + header.utterance_id.size();
  const std::uint64_t per_layer =
      static_cast<std::uint64_t>(header.n_frames) * header.dim;
  const std::uint64_t file_size = file_size_or_throw(path);
  if (file_size < header_bytes + total * 4) {
    throw TruncationError(path.string() + ": LWE1 payload truncated");
  }
  if (file_size > header_bytes + total * 4) {
    throw FormatError(path.string() + ": LWE1 trailing bytes after payload");
  }
  const std::vector<std::uint8_t> bytes =
      read_file_range(path, header_bytes + layer * per_layer * 4, per_layer * 4);
  ByteReader reader(bytes);
  LayerFrames frames;
  frames.n_frames = header.n_frames;
  frames.dim = header.dim;
  frames.data.resize(per_layer);
  for (float& v : frames.data) v = reader.f32();
  check_finite(frames.data, path.string() + " layer " + std::to_string(layer));
  return frames;
}

std::vector<std::uint8_t> encode_summaries(
    std::span<const GaussianSummary> layers) {
  check_summaries(layers);
  const std::size_t dim = layers.front().dim();
  ByteWriter writer;
  writer.reserve(kSummaryHeaderBytes + layers.size() * summary_layer_bytes(dim));
  writer.write_bytes(std::as_bytes(std::span(kSummaryMagic)));
  writer.u32(kFormatVersion);
  writer.u32(static_cast<std::uint32_t>(layers.size()));
  writer.u32(static_cast<std::uint32_t>(dim));
  for (const GaussianSummary& s : layers) {
    writer.u64(s.count);
    for (std::size_t i = 0; i < dim; ++i) writer.f64(s.mean(i));
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) writer.f64(s.covariance(r, c));
    }
  }
  return std::move(writer).take();
}

std::vector<GaussianSummary> decode_summaries(
    std::span<const std::uint8_t> bytes) {
  const std::string what = "LWS1";
  ByteReader reader(bytes);
  check_magic(reader, kSummaryMagic, what);
  const std::uint32_t n_layers = reader.u32();
  const std::uint32_t dim = reader.u32();
  if (n_layers == 0 || dim == 0) {
    throw FormatError(what + ": zero layer or dim count");
  }
  const std::uint64_t expected = n_layers * summary_layer_bytes(dim);
  if (reader.remaining() < expected) {
    throw TruncationError(what + ": payload truncated");
  }
  if (reader.remaining() > expected) {
    throw FormatError(what + ": trailing bytes after payload");
  }
  std::vector<GaussianSummary> layers;
  layers.reserve(n_layers);
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    layers.push_back(parse_summary_layer(reader, dim));
  }
  check_summaries(layers);
  return layers;
}

void write_summary_file(std::span<const GaussianSummary> layers,
                        const std::filesystem::path& path) {
  write_file_atomic(path, encode_summaries(layers));
}

std::vector<GaussianSummary> read_summary_file(
    const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return decode_summaries(bytes);
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
}

SummaryHeader read_summary_header(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes =
      read_file_prefix(path, kSummaryHeaderBytes);
  try {
    ByteReader reader(bytes);
    check_magic(reader, kSummaryMagic, "LWS1");
    SummaryHeader header;
    header.n_layers = reader.u32();
    header.dim = reader.u32();
    if (header.n_layers == 0 || header.dim == 0) {
      throw FormatError("LWS1: zero layer or dim count");
    }
    const std::uint64_t expected =
        kSummaryHeaderBytes + header.n_layers * summary_layer_bytes(header.dim);
    const std::uint64_t actual = file_size_or_throw(path);
    if (actual < expected) throw TruncationError("LWS1: payload truncated");
    if (actual > expected) {
      throw FormatError("LWS1: trailing bytes after payload");
    }
    return header;
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
}

GaussianSummary read_summary_layer(const std::filesystem::path& path,
                                   std::size_t layer) {
  const SummaryHeader header = read_summary_header(path);
  if (layer >= header.n_layers) {
    throw DimError(path.string() + ": layer " + std::to_string(layer) +
                   " out of range [0, " + std::to_string(header.n_layers) +
                   ")");
  }
  const std::uint64_t stride = summary_layer_bytes(header.dim);
  const std::vector<std::uint8_t> bytes =
      read_file_range(path, kSummaryHeaderBytes + layer * stride, stride);
  ByteReader reader(bytes);
  GaussianSummary summary = parse_summary_layer(reader, header.dim);
  try {
    summary.validate();
  } catch (const Error& e) {
    rethrow_with_path(e, path);
  }
  return summary;
}

}  // namespace layerwise
