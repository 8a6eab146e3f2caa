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

#ifndef DPSKETCH_HASHING_H_
#define DPSKETCH_HASHING_H_

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace dpsketch {

// 256-bit identifier of the hash randomness. Sketches built under different
// seeds are unrelated random objects and can never be merged.
class Seed {
 public:
  static constexpr size_t kBytes = 32;
  using Bytes = std::array<uint8_t, kBytes>;

  constexpr Seed() = default;
  explicit constexpr Seed(const Bytes& bytes) : bytes_(bytes) {}

  // Parses exactly 64 hex digits. Throws std::invalid_argument otherwise.
  static Seed FromHex(std::string_view hex);
  // Expands a 64-bit value into a full seed; handy for tests and benches.
  static Seed FromU64(uint64_t value);
  // Draws a seed from std::random_device.
  static Seed Random();

  // Deterministic per-trial seed schedule: Derive(i) for i = 0, 1, ...
  Seed Derive(uint64_t index) const;

  std::string ToHex() const;
  const Bytes& bytes() const { return bytes_; }

  friend bool operator==(const Seed&, const Seed&) = default;

 private:
  Bytes bytes_{};
};

// Which independent hash function of a seed is being evaluated. The sketch
// hash and the downsampling gate must never share randomness.
enum class HashRole : uint8_t {
  kSketchHash = 0x53,      // 'S'
  kDownsampleHash = 0x44,  // 'D'
};

struct HashValue {
  uint64_t bits = 0;

  friend constexpr auto operator<=>(HashValue, HashValue) = default;
};

// bits / 2^64, always < 1. Values above 2^53 are rounded down so the
// result never reaches 1.0.
constexpr double ToUnitInterval(HashValue h) {
  constexpr double kScale = 0x1p-64;
  const uint64_t bits = std::countl_zero(h.bits) >= 11
                            ? h.bits
                            : h.bits & ~((uint64_t{1} << (11 - std::countl_zero(h.bits))) - 1);
  return static_cast<double>(bits) * kScale;
}

struct BucketRank {
  uint32_t bucket = 0;
  uint32_t rank = 0;

  friend bool operator==(BucketRank, BucketRank) = default;
};

// Top log2(k) bits select the bucket; the rank is one plus the number of
// leading zeros of the remaining bits, clamped to max_rank. Throws
// std::invalid_argument if k is not a power of two or max_rank does not fit
// in the remaining bits.
BucketRank SplitBucketRank(HashValue h, uint64_t k, uint32_t max_rank);

namespace internal {

// Unchecked variant used on hot paths once the configuration is validated.
inline BucketRank SplitBucketRankUnchecked(HashValue h, uint32_t log2_k,
                                           uint32_t max_rank) {
  const uint32_t bucket =
      log2_k == 0 ? 0 : static_cast<uint32_t>(h.bits >> (64 - log2_k));
  const uint64_t rest = log2_k == 0 ? h.bits : h.bits << log2_k;
  const uint32_t rank = 1 + static_cast<uint32_t>(std::countl_zero(rest));
  return {bucket, rank < max_rank ? rank : max_rank};
}

}  // namespace internal

// Keyed SipHash-2-4 evaluator bound to one seed. The input is prefixed with
// the role byte and a namespace byte, so real items, phantom items and
// per-register QLL draws live in disjoint universes for every role.
class Hasher {
 public:
  explicit Hasher(const Seed& seed);

  HashValue Hash(std::string_view item, HashRole role) const;
  // Phantom item number `index`; never equal to any real item.
  HashValue HashPhantom(uint64_t index, HashRole role) const;
  // Independent sketch-hash draw for (item, register j).
  HashValue HashIndexed(std::string_view item, uint32_t j) const;

 private:
  HashValue HashMessage(HashRole role, uint8_t ns, std::string_view prefix,
                        std::string_view payload) const;

  std::array<uint8_t, 16> key_{};
};

// Convenience form for one-off evaluations; derives the key on every call.
HashValue Hash64(std::string_view item, const Seed& seed, HashRole role);

}  // namespace dpsketch

#endif  // DPSKETCH_HASHING_H_
