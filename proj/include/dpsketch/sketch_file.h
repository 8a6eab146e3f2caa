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
// On-disk sketch format. All integers little-endian.
//
//   "DPSK"          4 bytes
//   version         u16 (currently 1)
//   family          u8
//   k               u32
//   bitmap_length   u32   FM85 only, else 32
//   sampling_rate   f64   LPCA only, else 1
//   register_width  u8    HLL only, else 5
//   seed            32 bytes
//   pipeline        u8
//   epsilon         f64   NaN for the raw pipeline
//   v               u64   phantom count
//   payload_length  u64
//   payload:
//     hll       k register bytes
//     bottomk   u32 count, count x u64 hash values ascending
//     fm85      k x u64 bitmaps
//     lpca      ceil(k / 64) x u64 words
//     adaptive  u8 depth, u32 count, count x u64 hash values ascending
// -----------------------------------------------------------------------------

#ifndef DPSKETCH_SKETCH_FILE_H_
#define DPSKETCH_SKETCH_FILE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dpsketch/dp.h"

namespace dpsketch {

inline constexpr uint16_t kSketchFileVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SketchFile {
  Sketch sketch;
  Pipeline pipeline = Pipeline::kRaw;
  double epsilon = 0.0;  // NaN when pipeline is kRaw
  uint64_t v = 0;

  // Estimate under the file's pipeline.
  DpEstimate Estimate() const;

  // Bitwise equality, epsilon included.
  friend bool operator==(const SketchFile& a, const SketchFile& b);
};

// Throws FormatError for a file that Deserialize would reject.
std::string Serialize(const SketchFile& file);
// Throws FormatError on any malformed or inconsistent input.
SketchFile Deserialize(std::string_view bytes);

// Name of the first header field that prevents merging `a` and `b`, or
// nullopt if they are compatible. Fields: family, k, bitmap_length,
// sampling_rate, register_width, seed, pipeline, epsilon, v.
std::optional<std::string> MergeMismatch(const SketchFile& a, const SketchFile& b);

// Throws IncompatibleSketches naming the mismatched field.
SketchFile MergeFiles(const SketchFile& a, const SketchFile& b);

}  // namespace dpsketch

#endif  // DPSKETCH_SKETCH_FILE_H_
