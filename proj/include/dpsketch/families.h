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
//
// -----------------------------------------------------------------------------
// The five hash-based, order-invariant sketch families. Each state depends
// only on the set of sketch-hash values it has seen. Update() returns whether
// the state changed, which is what the sampling probability measures.
// -----------------------------------------------------------------------------

#ifndef DPSKETCH_FAMILIES_H_
#define DPSKETCH_FAMILIES_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpsketch/hashing.h"

namespace dpsketch {

// Raised by estimators whose formula diverges on the given state.
class EstimatorOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// HyperLogLog: k registers holding the maximum geometric rank per bucket.
class HllState {
 public:
  HllState(uint32_t k, uint8_t register_width);
  // Throws std::invalid_argument if any register exceeds 2^width - 1.
  static HllState FromRegisters(uint8_t register_width, std::vector<uint8_t> registers);

  bool Update(HashValue h);
  void Merge(const HllState& other);

  // k^-1 * sum_i 2^-register_i.
  double SamplingProbability() const;
  // alpha_k * k^2 / sum_i 2^-register_i, with linear counting below 5k/2.
  double Estimate() const;
  double RawEstimate() const;
  uint32_t ZeroRegisters() const;

  static double Alpha(uint32_t k);

  uint32_t k() const { return static_cast<uint32_t>(registers_.size()); }
  uint8_t max_rank() const { return max_rank_; }
  uint8_t MaxRegister() const;
  const std::vector<uint8_t>& registers() const { return registers_; }

  friend bool operator==(const HllState&, const HllState&) = default;

 private:
  double InverseSum() const;

  uint32_t log2_k_ = 0;
  uint8_t max_rank_ = 0;
  std::vector<uint8_t> registers_;
};

// Bottom-k / KMV: the k smallest distinct hash values, ascending.
class BottomKState {
 public:
  explicit BottomKState(uint32_t k);
  // Throws std::invalid_argument unless values are strictly ascending and at
  // most k of them.
  static BottomKState FromValues(uint32_t k, std::vector<uint64_t> values);

  bool Update(HashValue h);
  void Merge(const BottomKState& other);

  // The k-th minimum as a unit-interval value; 1 while under-full.
  double SamplingProbability() const;
  // (k - 1) / pi when full, the exact count of stored values otherwise.
  double Estimate() const;

  bool full() const { return values_.size() == k_; }
  uint32_t k() const { return k_; }
  const std::vector<uint64_t>& values() const { return values_; }

  friend bool operator==(const BottomKState&, const BottomKState&) = default;

 private:
  uint32_t k_ = 0;
  std::vector<uint64_t> values_;
};

// FM85 / PCSA: k bitmaps of `bitmap_length` bits. Bit j-1 of bitmap b is
// set by an item with bucket b and geometric rank j.
class Fm85State {
 public:
  static constexpr double kPhi = 0.77351;

  Fm85State(uint32_t k, uint32_t bitmap_length);
  // Throws std::invalid_argument if a bitmap has bits beyond bitmap_length.
  static Fm85State FromBitmaps(uint32_t bitmap_length, std::vector<uint64_t> bitmaps);

  bool Update(HashValue h);
  void Merge(const Fm85State& other);

  // sum over zero bits (b, j) of 2^-j / k.
  double SamplingProbability() const;
  // (k / phi) * 2^mean(R_b), R_b the index of the lowest zero bit; 0 when
  // nothing has been added.
  double Estimate() const;

  uint32_t k() const { return static_cast<uint32_t>(bitmaps_.size()); }
  uint32_t bitmap_length() const { return bitmap_length_; }
  bool Bit(uint32_t bitmap, uint32_t rank) const {
    return (bitmaps_[bitmap] >> (rank - 1)) & 1;
  }
  const std::vector<uint64_t>& bitmaps() const { return bitmaps_; }

  friend bool operator==(const Fm85State&, const Fm85State&) = default;

 private:
  uint32_t log2_k_ = 0;
  uint32_t bitmap_length_ = 0;
  std::vector<uint64_t> bitmaps_;
};

// Linear probabilistic counting: one bitmap of k bits fed by the items
// whose hash falls below the sampling rate p.
class LpcaState {
 public:
  LpcaState(uint32_t k, double sampling_rate);
  // Throws std::invalid_argument if bits beyond k are set.
  static LpcaState FromWords(uint32_t k, double sampling_rate, std::vector<uint64_t> words);

  bool Update(HashValue h);
  void Merge(const LpcaState& other);

  // p * (1 - B / k).
  double SamplingProbability() const;
  // -(k / p) * ln(1 - B / k). Throws EstimatorOverflow when B == k.
  double Estimate() const;

  uint32_t k() const { return k_; }
  uint32_t FilledBits() const { return filled_; }
  double sampling_rate() const { return sampling_rate_; }
  bool Bit(uint32_t index) const { return (words_[index / 64] >> (index % 64)) & 1; }
  const std::vector<uint64_t>& words() const { return words_; }

  friend bool operator==(const LpcaState& a, const LpcaState& b) {
    return a.k_ == b.k_ && a.sampling_rate_ == b.sampling_rate_ && a.words_ == b.words_;
  }

 private:
  uint32_t k_ = 0;
  double sampling_rate_ = 1.0;
  // Items with hash bits below this are sampled; 2^64 means all.
  unsigned __int128 sample_limit_ = 0;
  uint32_t filled_ = 0;
  std::vector<uint64_t> words_;
};

// Adaptive sampling: threshold 2^-depth, storing every hash value below it.
// The threshold halves whenever more than k values would be stored.
class AdaptiveSamplingState {
 public:
  explicit AdaptiveSamplingState(uint32_t k);
  // Throws std::invalid_argument unless values are strictly ascending, below
  // the threshold and at most k of them.
  static AdaptiveSamplingState FromValues(uint32_t k, uint32_t depth,
                                          std::vector<uint64_t> values);

  bool Update(HashValue h);
  void Merge(const AdaptiveSamplingState& other);

  // The current threshold 2^-depth.
  double SamplingProbability() const;
  // |values| / threshold.
  double Estimate() const;

  uint32_t k() const { return k_; }
  uint32_t depth() const { return depth_; }
  const std::vector<uint64_t>& values() const { return values_; }

  friend bool operator==(const AdaptiveSamplingState&,
                         const AdaptiveSamplingState&) = default;

 private:
  bool BelowThreshold(uint64_t bits) const {
    return depth_ == 0 || (depth_ < 64 && (bits >> (64 - depth_)) == 0);
  }
  void Shrink();

  uint32_t k_ = 0;
  uint32_t depth_ = 0;
  std::vector<uint64_t> values_;
};

}  // namespace dpsketch

#endif  // DPSKETCH_FAMILIES_H_
