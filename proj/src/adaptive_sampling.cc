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
#include <cmath>
#include <iterator>

#include "dpsketch/families.h"

namespace dpsketch {

AdaptiveSamplingState::AdaptiveSamplingState(uint32_t k) : k_(k) {
  if (k == 0) throw std::invalid_argument("adaptive sampling requires k >= 1");
}

AdaptiveSamplingState AdaptiveSamplingState::FromValues(uint32_t k, uint32_t depth,
                                                        std::vector<uint64_t> values) {
  AdaptiveSamplingState state(k);
  if (depth >= 64) throw std::invalid_argument("adaptive sampling depth out of range");
  state.depth_ = depth;
  if (values.size() > k) {
    throw std::invalid_argument("adaptive sampling holds more than k values");
  }
  if (std::adjacent_find(values.begin(), values.end(), std::greater_equal<>()) !=
      values.end()) {
    throw std::invalid_argument("adaptive sampling values must be strictly ascending");
  }
  if (!values.empty() && !state.BelowThreshold(values.back())) {
    throw std::invalid_argument("adaptive sampling value above threshold");
  }
  state.values_ = std::move(values);
  return state;
}

void AdaptiveSamplingState::Shrink() {
  while (values_.size() > k_ && depth_ < 63) {
    ++depth_;
    const uint64_t limit = uint64_t{1} << (64 - depth_);
    values_.erase(std::lower_bound(values_.begin(), values_.end(), limit),
                  values_.end());
  }
}

bool AdaptiveSamplingState::Update(HashValue h) {
  if (!BelowThreshold(h.bits)) return false;
  const auto it = std::lower_bound(values_.begin(), values_.end(), h.bits);
  if (it != values_.end() && *it == h.bits) return false;
  values_.insert(it, h.bits);
  Shrink();
  return true;
}

void AdaptiveSamplingState::Merge(const AdaptiveSamplingState& other) {
  if (other.k_ != k_) throw std::invalid_argument("adaptive sampling merge requires equal k");
  depth_ = std::max(depth_, other.depth_);
  std::vector<uint64_t> merged;
  merged.reserve(values_.size() + other.values_.size());
  std::set_union(values_.begin(), values_.end(), other.values_.begin(),
                 other.values_.end(), std::back_inserter(merged));
  if (depth_ > 0) {
    const uint64_t limit = uint64_t{1} << (64 - depth_);
    merged.erase(std::lower_bound(merged.begin(), merged.end(), limit), merged.end());
  }
  values_ = std::move(merged);
  Shrink();
}

double AdaptiveSamplingState::SamplingProbability() const {
  return std::ldexp(1.0, -static_cast<int>(depth_));
}

double AdaptiveSamplingState::Estimate() const {
  return std::ldexp(static_cast<double>(values_.size()), static_cast<int>(depth_));
}

}  // namespace dpsketch
