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

#ifndef DPSKETCH_SKETCH_CONFIG_H_
#define DPSKETCH_SKETCH_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string_view>

namespace dpsketch {

enum class Family : uint8_t {
  kHll = 1,
  kBottomK = 2,
  kFm85 = 3,
  kLpca = 4,
  kAdaptiveSampling = 5,
};

std::string_view FamilyName(Family family);
std::optional<Family> ParseFamily(std::string_view name);

inline constexpr uint8_t kDefaultHllRegisterWidth = 5;
inline constexpr uint32_t kDefaultFm85BitmapLength = 32;

// Family plus size parameters. Fields that do not apply to a family are kept
// at their defaults so that equal sketches have equal configs.
struct SketchConfig {
  Family family = Family::kHll;
  uint32_t k = 0;
  // FM85 bitmap length.
  uint32_t bitmap_length = kDefaultFm85BitmapLength;
  // LPCA item-level sampling rate p in (0, 1].
  double sampling_rate = 1.0;
  // HLL register width in bits; ranks clamp at 2^width - 1.
  uint8_t register_width = kDefaultHllRegisterWidth;

  static SketchConfig Hll(uint32_t k, uint8_t register_width = kDefaultHllRegisterWidth);
  static SketchConfig BottomK(uint32_t k);
  static SketchConfig Fm85(uint32_t k, uint32_t bitmap_length = kDefaultFm85BitmapLength);
  static SketchConfig Lpca(uint32_t k, double sampling_rate = 1.0);
  static SketchConfig AdaptiveSampling(uint32_t k);

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
  // Resets fields the family does not use to their defaults.
  SketchConfig Normalized() const;

  friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

// Upper bound on the number of items whose removal can change the state:
// k * bitmap_length for FM85, k + 1 for adaptive sampling and k otherwise.
uint64_t Kmax(const SketchConfig& config);

}  // namespace dpsketch

#endif  // DPSKETCH_SKETCH_CONFIG_H_
