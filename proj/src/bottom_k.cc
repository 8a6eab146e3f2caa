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
#include <iterator>

#include "dpsketch/families.h"

namespace dpsketch {

BottomKState::BottomKState(uint32_t k) : k_(k) {
  if (k == 0) throw std::invalid_argument("bottom-k requires k >= 1");
}

BottomKState BottomKState::FromValues(uint32_t k, std::vector<uint64_t> values) {
  BottomKState state(k);
  if (values.size() > k) throw std::invalid_argument("bottom-k holds more than k values");
  if (std::adjacent_find(values.begin(), values.end(), std::greater_equal<>()) !=
      values.end()) {
    throw std::invalid_argument("bottom-k values must be strictly ascending");
  }
  state.values_ = std::move(values);
  return state;
}

bool BottomKState::Update(HashValue h) {
  if (full() && h.bits >= values_.back()) return false;
  const auto it = std::lower_bound(values_.begin(), values_.end(), h.bits);
  if (it != values_.end() && *it == h.bits) return false;
  if (full()) values_.pop_back();
  values_.insert(it, h.bits);
  return true;
}

void BottomKState::Merge(const BottomKState& other) {
  if (other.k_ != k_) throw std::invalid_argument("bottom-k merge requires equal k");
  std::vector<uint64_t> merged;
  merged.reserve(values_.size() + other.values_.size());
  std::set_union(values_.begin(), values_.end(), other.values_.begin(),
                 other.values_.end(), std::back_inserter(merged));
  if (merged.size() > k_) merged.resize(k_);
  values_ = std::move(merged);
}

double BottomKState::SamplingProbability() const {
  if (!full()) return 1.0;
  return ToUnitInterval(HashValue{values_.back()});
}

double BottomKState::Estimate() const {
  if (!full()) return static_cast<double>(values_.size());
  return static_cast<double>(k_ - 1) / SamplingProbability();
}

}  // namespace dpsketch
