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

constexpr unsigned __int128 kTwoTo64 = static_cast<unsigned __int128>(1) << 64;

size_t WordCount(uint32_t k) { return (size_t{k} + 63) / 64; }

}  // namespace

LpcaState::LpcaState(uint32_t k, double sampling_rate)
    : k_(k), sampling_rate_(sampling_rate), words_(WordCount(k), 0) {
  if (k == 0) throw std::invalid_argument("LPCA requires k >= 1");
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    throw std::invalid_argument("LPCA sampling rate must lie in (0, 1]");
  }
  sample_limit_ = sampling_rate == 1.0
                      ? kTwoTo64
                      : static_cast<unsigned __int128>(std::ldexp(sampling_rate, 64));
  if (sample_limit_ == 0) sample_limit_ = 1;
}

LpcaState LpcaState::FromWords(uint32_t k, double sampling_rate,
                               std::vector<uint64_t> words) {
  LpcaState state(k, sampling_rate);
  if (words.size() != state.words_.size()) {
    throw std::invalid_argument("LPCA bitmap has the wrong number of words");
  }
  if (k % 64 != 0 && (words.back() >> (k % 64)) != 0) {
    throw std::invalid_argument("LPCA bitmap has bits past k");
  }
  state.filled_ = 0;
  for (uint64_t w : words) state.filled_ += static_cast<uint32_t>(std::popcount(w));
  state.words_ = std::move(words);
  return state;
}

bool LpcaState::Update(HashValue h) {
  if (h.bits >= sample_limit_) return false;
  // h is uniform on [0, limit), so h * k / limit is uniform on [0, k).
  const auto index = static_cast<uint32_t>(
      static_cast<unsigned __int128>(h.bits) * k_ / sample_limit_);
  uint64_t& word = words_[index / 64];
  const uint64_t bit = uint64_t{1} << (index % 64);
  if (word & bit) return false;
  word |= bit;
  ++filled_;
  return true;
}

void LpcaState::Merge(const LpcaState& other) {
  if (other.k_ != k_ || other.sampling_rate_ != sampling_rate_) {
    throw std::invalid_argument("LPCA merge requires identical k and rate");
  }
  filled_ = 0;
  for (size_t i = 0; i < words_.size(); ++i) {
    words_[i] |= other.words_[i];
    filled_ += static_cast<uint32_t>(std::popcount(words_[i]));
  }
}

double LpcaState::SamplingProbability() const {
  return sampling_rate_ * (1.0 - static_cast<double>(filled_) / k_);
}

double LpcaState::Estimate() const {
  if (filled_ == k_) throw EstimatorOverflow("LPCA sketch is saturated");
  const double fill = static_cast<double>(filled_) / k_;
  return -(static_cast<double>(k_) / sampling_rate_) * std::log1p(-fill);
}

}  // namespace dpsketch
