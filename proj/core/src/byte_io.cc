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

#include "byte_io.h"

#include <atomic>
#include <fstream>
#include <system_error>

namespace layerwise {
namespace {

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

template <typename E>
bool rethrow_if(const Error& e, const std::string& message) {
  if (dynamic_cast<const E*>(&e) != nullptr) throw E(message);
  return false;
}

}  // namespace

std::uint64_t file_size_or_throw(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) {
    throw IoError("cannot stat '" + path.string() + "': " + ec.message());
  }
  return size;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  const std::uint64_t size = file_size_or_throw(path);
  return read_file_range(path, 0, size);
}

std::vector<std::uint8_t> read_file_prefix(const std::filesystem::path& path,
                                           std::size_t max_bytes) {
  const std::uint64_t size = file_size_or_throw(path);
  return read_file_range(path, 0, std::min<std::uint64_t>(size, max_bytes));
}

std::vector<std::uint8_t> read_file_range(const std::filesystem::path& path,
                                          std::uint64_t offset,
                                          std::uint64_t size) {
  std::ifstream in = open_for_read(path);
  std::vector<std::uint8_t> bytes(size);
  in.seekg(static_cast<std::streamoff>(offset));
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(size));
  if (static_cast<std::uint64_t>(in.gcount()) != size) {
    throw TruncationError(path.string() + ": file ends before byte " +
                          std::to_string(offset + size));
  }
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  static std::atomic<std::uint64_t> counter{0};
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" +
                    path.parent_path().string() + "': " + ec.message());
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(
                                        text.data()),
                                    text.size()));
}

void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string message = context + ": " + e.what();
  // Most specific first; all leaves derive directly from Error.
  rethrow_if<IoError>(e, message) || rethrow_if<FormatError>(e, message) ||
      rethrow_if<TruncationError>(e, message) ||
      rethrow_if<DataError>(e, message) || rethrow_if<SchemaError>(e, message) ||
      rethrow_if<RangeError>(e, message) || rethrow_if<DimError>(e, message) ||
      rethrow_if<ValidationError>(e, message) ||
      rethrow_if<InsufficientDataError>(e, message) ||
      rethrow_if<DegenerateError>(e, message) ||
      rethrow_if<NotSymmetricError>(e, message) ||
      rethrow_if<NotPsdError>(e, message) ||
      rethrow_if<NumericalError>(e, message);
  throw Error(e.error_class(), message);
}

}  // namespace layerwise
