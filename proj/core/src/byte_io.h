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

#ifndef LAYERWISE_SRC_BYTE_IO_H_
#define LAYERWISE_SRC_BYTE_IO_H_

// Little-endian byte encoding and whole-file helpers shared by the binary
// formats. Encoding goes through integer shifts, so output bytes do not
// depend on host endianness.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "layerwise/errors.h"

namespace layerwise {

class ByteWriter {
 public:
  void reserve(std::size_t n) { bytes_.reserve(n); }

  void write_bytes(std::span<const std::byte> data) {
    for (std::byte b : data) bytes_.push_back(static_cast<std::uint8_t>(b));
  }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void read_bytes(std::span<std::byte> out) {
    need(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = static_cast<std::byte>(bytes_[pos_ + i]);
    }
    pos_ += out.size();
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw TruncationError("unexpected end of data: needed " +
                            std::to_string(n) + " bytes, " +
                            std::to_string(remaining()) + " left");
    }
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file_prefix(const std::filesystem::path& path,
                                           std::size_t max_bytes);
// Throws TruncationError if the file ends before offset + size.
std::vector<std::uint8_t> read_file_range(const std::filesystem::path& path,
                                          std::uint64_t offset,
                                          std::uint64_t size);
std::uint64_t file_size_or_throw(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& text);

// Rethrows `e` as the same error type with `context` prepended.
[[noreturn]] void rethrow_with_context(const Error& e,
                                       const std::string& context);
[[noreturn]] inline void rethrow_with_path(const Error& e,
                                           const std::filesystem::path& path) {
  rethrow_with_context(e, path.string());
}

}  // namespace layerwise

#endif  // LAYERWISE_SRC_BYTE_IO_H_
