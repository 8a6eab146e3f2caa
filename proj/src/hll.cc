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

#include <algorithm>
#include <bit>
#include <cmath>

#include "dpsketch/families.h"

namespace dpsketch {

HllState::HllState(uint32_t k, uint8_t register_width)
    : log2_k_(static_cast<uint32_t>(std::countr_zero(k))),
      max_rank_(static_cast<uint8_t>((1u << register_width) - 1)),
      registers_(k, 0) {
  if (k == 0 || !std::has_single_bit(k)) {
    throw std::invalid_argument("HLL requires k to be a power of two");
  }
  if (register_width < 1 || register_width > 6 || max_rank_ > 64 - log2_k_) {
    throw std::invalid_argument("HLL register width out of range");
  }
}

HllState HllState::FromRegisters(uint8_t register_width,
                                 std::vector<uint8_t> registers) {
  HllState state(static_cast<uint32_t>(registers.size()), register_width);
  for (uint8_t r : registers) {
    if (r > state.max_rank_) {
      throw std::invalid_argument("HLL register exceeds its width");
    }
  }
  state.registers_ = std::move(registers);
  return state;
}

bool HllState::Update(HashValue h) {
  const BucketRank br = internal::SplitBucketRankUnchecked(h, log2_k_, max_rank_);
  uint8_t& reg = registers_[br.bucket];
  if (br.rank <= reg) return false;
  reg = static_cast<uint8_t>(br.rank);
  return true;
}

void HllState::Merge(const HllState& other) {
  if (other.registers_.size() != registers_.size() || other.max_rank_ != max_rank_) {
    throw std::invalid_argument("HLL merge requires identical k and width");
  }
  for (size_t i = 0; i < registers_.size(); ++i) {
    registers_[i] = std::max(registers_[i], other.registers_[i]);
  }
}

double HllState::InverseSum() const {
  double sum = 0.0;
  for (uint8_t r : registers_) sum += std::ldexp(1.0, -static_cast<int>(r));
  return sum;
}

double HllState::SamplingProbability() const {
  return InverseSum() / static_cast<double>(registers_.size());
}

double HllState::Alpha(uint32_t k) {
  if (k <= 16) return 0.673;
  if (k == 32) return 0.697;
  if (k == 64) return 0.709;
  return 0.7213 / (1.0 + 1.079 / static_cast<double>(k));
}

double HllState::RawEstimate() const {
  const auto m = static_cast<double>(registers_.size());
  return Alpha(k()) * m * m / InverseSum();
}

uint32_t HllState::ZeroRegisters() const {
  return static_cast<uint32_t>(std::count(registers_.begin(), registers_.end(), 0));
}

double HllState::Estimate() const {
  const auto k = static_cast<double>(registers_.size());
  const double raw = RawEstimate();
  const uint32_t zeros = ZeroRegisters();
  if (raw <= 2.5 * k && zeros > 0) {
    return k * std::log(k / static_cast<double>(zeros));
  }
  return raw;
}

uint8_t HllState::MaxRegister() const {
  return *std::max_element(registers_.begin(), registers_.end());
}

}  // namespace dpsketch
