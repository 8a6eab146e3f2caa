// Copyright 2026 The DP Sketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpsketch/hashing.h"

#include <sodium/crypto_shorthash_siphash24.h>

#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

namespace dpsketch {
namespace {

// Namespace bytes following the role byte.
constexpr uint8_t kRealItem = 0x00;
constexpr uint8_t kPhantomItem = 0x01;
constexpr uint8_t kIndexedItem = 0x02;
constexpr uint8_t kSeedDerivation = 0x03;

constexpr size_t kInlineMessageBytes = 256;

uint64_t SipHash(const uint8_t* data, size_t size,
                 const std::array<uint8_t, 16>& key) {
  uint8_t out[crypto_shorthash_siphash24_BYTES];
  crypto_shorthash_siphash24(out, data, size, key.data());
  uint64_t value;
  std::memcpy(&value, out, sizeof(value));
  return value;
}

void StoreLe64(uint64_t value, uint8_t* out) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(value >> (8 * i));
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Compresses the 256-bit seed into the 128-bit SipHash key: the second half
// of the seed is hashed under the first half, twice with distinct tweaks.
std::array<uint8_t, 16> DeriveKey(const Seed& seed) {
  std::array<uint8_t, 16> first{};
  std::memcpy(first.data(), seed.bytes().data(), 16);
  uint8_t message[17];
  std::memcpy(message, seed.bytes().data() + 16, 16);
  std::array<uint8_t, 16> key{};
  for (uint8_t half = 0; half < 2; ++half) {
    message[16] = half;
    StoreLe64(SipHash(message, sizeof(message), first), key.data() + 8 * half);
  }
  return key;
}

}  // namespace

Seed Seed::FromHex(std::string_view hex) {
  if (hex.size() != 2 * kBytes) {
    throw std::invalid_argument("seed must be exactly 64 hex digits");
  }
  Bytes bytes{};
  for (size_t i = 0; i < kBytes; ++i) {
    const int hi = HexDigit(hex[2 * i]);
    const int lo = HexDigit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("seed has non-hex digit");
    bytes[i] = static_cast<uint8_t>(hi * 16 + lo);
  }
  return Seed(bytes);
}

Seed Seed::FromU64(uint64_t value) {
  Bytes bytes{};
  StoreLe64(value, bytes.data());
  return Seed(bytes).Derive(0);
}

Seed Seed::Random() {
  std::random_device device;
  Bytes bytes{};
  for (size_t i = 0; i < kBytes; i += 4) {
    const uint32_t word = device();
    std::memcpy(bytes.data() + i, &word, 4);
  }
  return Seed(bytes);
}

Seed Seed::Derive(uint64_t index) const {
  const std::array<uint8_t, 16> key = DeriveKey(*this);
  // Leading zero byte: no HashRole has value 0, so these messages never
  // coincide with item hashes.
  uint8_t message[11] = {0x00, kSeedDerivation};
  StoreLe64(index, message + 2);
  Bytes out{};
  for (uint8_t lane = 0; lane < 4; ++lane) {
    message[10] = lane;
    StoreLe64(SipHash(message, sizeof(message), key), out.data() + 8 * lane);
  }
  return Seed(out);
}

std::string Seed::ToHex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * kBytes);
  for (uint8_t b : bytes_) {
    hex.push_back(kDigits[b >> 4]);
    hex.push_back(kDigits[b & 0xf]);
  }
  return hex;
}

BucketRank SplitBucketRank(HashValue h, uint64_t k, uint32_t max_rank) {
  if (k == 0 || !std::has_single_bit(k)) {
    throw std::invalid_argument("bucket count must be a power of two");
  }
  const auto log2_k = static_cast<uint32_t>(std::countr_zero(k));
  if (max_rank < 1 || max_rank > 64 - log2_k) {
    throw std::invalid_argument("max_rank must lie in [1, 64 - log2(k)]");
  }
  return internal::SplitBucketRankUnchecked(h, log2_k, max_rank);
}

Hasher::Hasher(const Seed& seed) : key_(DeriveKey(seed)) {}

HashValue Hasher::HashMessage(HashRole role, uint8_t ns, std::string_view prefix,
                              std::string_view payload) const {
  const size_t size = 2 + prefix.size() + payload.size();
  uint8_t inline_buffer[kInlineMessageBytes];
  std::vector<uint8_t> heap_buffer;
  uint8_t* message = inline_buffer;
  if (size > kInlineMessageBytes) {
    heap_buffer.resize(size);
    message = heap_buffer.data();
  }
  message[0] = static_cast<uint8_t>(role);
  message[1] = ns;
  if (!prefix.empty()) std::memcpy(message + 2, prefix.data(), prefix.size());
  if (!payload.empty()) {
    std::memcpy(message + 2 + prefix.size(), payload.data(), payload.size());
  }
  return HashValue{SipHash(message, size, key_)};
}

HashValue Hasher::Hash(std::string_view item, HashRole role) const {
  return HashMessage(role, kRealItem, {}, item);
}

HashValue Hasher::HashPhantom(uint64_t index, HashRole role) const {
  char counter[8];
  StoreLe64(index, reinterpret_cast<uint8_t*>(counter));
  return HashMessage(role, kPhantomItem, {}, std::string_view(counter, 8));
}

HashValue Hasher::HashIndexed(std::string_view item, uint32_t j) const {
  char index[4];
  for (int i = 0; i < 4; ++i) index[i] = static_cast<char>(j >> (8 * i));
  return HashMessage(HashRole::kSketchHash, kIndexedItem,
                     std::string_view(index, 4), item);
}

HashValue Hash64(std::string_view item, const Seed& seed, HashRole role) {
  return Hasher(seed).Hash(item, role);
}

}  // namespace dpsketch
