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

#include <bit>
#include <cmath>

#include "dpsketch/families.h"

namespace dpsketch {
namespace {

uint64_t LengthMask(uint32_t bitmap_length) {
  return bitmap_length == 64 ? ~uint64_t{0} : (uint64_t{1} << bitmap_length) - 1;
}

}  // namespace

Fm85State::Fm85State(uint32_t k, uint32_t bitmap_length)
    : log2_k_(static_cast<uint32_t>(std::countr_zero(k))),
      bitmap_length_(bitmap_length),
      bitmaps_(k, 0) {
  if (k == 0 || !std::has_single_bit(k)) {
    throw std::invalid_argument("FM85 requires k to be a power of two");
  }
  if (bitmap_length < 1 || bitmap_length > 64 - log2_k_) {
    throw std::invalid_argument("FM85 bitmap length out of range");
  }
}

Fm85State Fm85State::FromBitmaps(uint32_t bitmap_length, std::vector<uint64_t> bitmaps) {
  Fm85State state(static_cast<uint32_t>(bitmaps.size()), bitmap_length);
  const uint64_t mask = LengthMask(bitmap_length);
  for (uint64_t b : bitmaps) {
    if (b & ~mask) throw std::invalid_argument("FM85 bitmap has bits past its length");
  }
  state.bitmaps_ = std::move(bitmaps);
  return state;
}

bool Fm85State::Update(HashValue h) {
  const BucketRank br = internal::SplitBucketRankUnchecked(h, log2_k_, bitmap_length_);
  const uint64_t bit = uint64_t{1} << (br.rank - 1);
  uint64_t& bitmap = bitmaps_[br.bucket];
  if (bitmap & bit) return false;
  bitmap |= bit;
  return true;
}

void Fm85State::Merge(const Fm85State& other) {
  if (other.bitmaps_.size() != bitmaps_.size() ||
      other.bitmap_length_ != bitmap_length_) {
    throw std::invalid_argument("FM85 merge requires identical k and length");
  }
  for (size_t i = 0; i < bitmaps_.size(); ++i) bitmaps_[i] |= other.bitmaps_[i];
}

double Fm85State::SamplingProbability() const {
  double sum = 0.0;
  for (uint64_t bitmap : bitmaps_) {
    uint64_t zeros = ~bitmap & LengthMask(bitmap_length_);
    while (zeros != 0) {
      const int j = std::countr_zero(zeros) + 1;
      sum += std::ldexp(1.0, -j);
      zeros &= zeros - 1;
    }
  }
  return sum / static_cast<double>(bitmaps_.size());
}

double Fm85State::Estimate() const {
  double total_r = 0.0;
  bool empty = true;
  for (uint64_t bitmap : bitmaps_) {
    empty = empty && bitmap == 0;
    total_r += std::countr_one(bitmap);
  }
  if (empty) return 0.0;
  const auto k = static_cast<double>(bitmaps_.size());
  return k / kPhi * std::exp2(total_r / k);
}

}  // namespace dpsketch
