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

#include "dpsketch/sketch_config.h"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dpsketch {

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kHll:
      return "hll";
    case Family::kBottomK:
      return "bottomk";
    case Family::kFm85:
      return "fm85";
    case Family::kLpca:
      return "lpca";
    case Family::kAdaptiveSampling:
      return "adaptive";
  }
  return "unknown";
}

std::optional<Family> ParseFamily(std::string_view name) {
  for (Family f : {Family::kHll, Family::kBottomK, Family::kFm85, Family::kLpca,
                   Family::kAdaptiveSampling}) {
    if (name == FamilyName(f)) return f;
  }
  return std::nullopt;
}

SketchConfig SketchConfig::Hll(uint32_t k, uint8_t register_width) {
  SketchConfig config;
  config.family = Family::kHll;
  config.k = k;
  config.register_width = register_width;
  return config;
}

SketchConfig SketchConfig::BottomK(uint32_t k) {
  SketchConfig config;
  config.family = Family::kBottomK;
  config.k = k;
  return config;
}

SketchConfig SketchConfig::Fm85(uint32_t k, uint32_t bitmap_length) {
  SketchConfig config;
  config.family = Family::kFm85;
  config.k = k;
  config.bitmap_length = bitmap_length;
  return config;
}

SketchConfig SketchConfig::Lpca(uint32_t k, double sampling_rate) {
  SketchConfig config;
  config.family = Family::kLpca;
  config.k = k;
  config.sampling_rate = sampling_rate;
  return config;
}

SketchConfig SketchConfig::AdaptiveSampling(uint32_t k) {
  SketchConfig config;
  config.family = Family::kAdaptiveSampling;
  config.k = k;
  return config;
}

void SketchConfig::Validate() const {
  if (!ParseFamily(FamilyName(family))) {
    throw std::invalid_argument("unknown sketch family");
  }
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const bool needs_power_of_two = family == Family::kHll || family == Family::kFm85;
  if (needs_power_of_two && !std::has_single_bit(k)) {
    throw std::invalid_argument(std::string(FamilyName(family)) +
                                " requires k to be a power of two");
  }
  const auto log2_k = static_cast<uint32_t>(std::countr_zero(k));
  if (family == Family::kHll) {
    if (register_width < 1 || register_width > 6) {
      throw std::invalid_argument("HLL register width must lie in [1, 6]");
    }
    const uint32_t max_rank = (1u << register_width) - 1;
    if (max_rank > 64 - log2_k) {
      throw std::invalid_argument("HLL register width too large for k");
    }
  }
  if (family == Family::kFm85) {
    if (bitmap_length < 1 || bitmap_length > 64 - log2_k) {
      throw std::invalid_argument("FM85 bitmap length must lie in [1, 64 - log2(k)]");
    }
  }
  if (family == Family::kLpca) {
    if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
      throw std::invalid_argument("LPCA sampling rate must lie in (0, 1]");
    }
  }
}

SketchConfig SketchConfig::Normalized() const {
  SketchConfig out;
  out.family = family;
  out.k = k;
  if (family == Family::kHll) out.register_width = register_width;
  if (family == Family::kFm85) out.bitmap_length = bitmap_length;
  if (family == Family::kLpca) out.sampling_rate = sampling_rate;
  return out;
}

uint64_t Kmax(const SketchConfig& config) {
  switch (config.family) {
    case Family::kFm85:
      return uint64_t{config.k} * config.bitmap_length;
    case Family::kAdaptiveSampling:
      // If exactly k + 1 hashes sit below the previous threshold, removing
      // any one of them undoes the last halving.
      return uint64_t{config.k} + 1;
    default:
      return config.k;
  }
}

}  // namespace dpsketch
