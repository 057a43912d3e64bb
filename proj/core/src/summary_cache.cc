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

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <string>
#include <system_error>

#include "layerwise/errors.h"
#include "layerwise/sweep.h"

namespace layerwise {
namespace {

std::string sha256_hex(const std::string& text) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), text.data(), text.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

}  // namespace

std::string summary_cache_key(std::span<const std::filesystem::path> files,
                              std::size_t n_layers, std::size_t dim,
                              PoolingMode pooling) {
  std::string text = "layerwise-summary-v1\n";
  text += "pooling=" + std::string(pooling_name(pooling)) + "\n";
  text += "n_layers=" + std::to_string(n_layers) + "\n";
  text += "dim=" + std::to_string(dim) + "\n";
  // Size and modification time catch files rewritten in place.
  for (const auto& f : files) {
    text += std::filesystem::absolute(f).lexically_normal().generic_string();
    std::error_code ec;
    const auto size = std::filesystem::file_size(f, ec);
    text += '\t' + (ec ? std::string("-") : std::to_string(size));
    const auto mtime = std::filesystem::last_write_time(f, ec);
    text += '\t' + (ec ? std::string("-")
                        : std::to_string(mtime.time_since_epoch().count()));
    text += '\n';
  }
  return sha256_hex(text);
}

}  // namespace layerwise
