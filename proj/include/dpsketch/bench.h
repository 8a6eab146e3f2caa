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
// Update-time and sketch-size benchmarks for HLL, its downsampled private
// form (PHLL), and a QLL-style baseline that hashes every item once per
// register.
// -----------------------------------------------------------------------------

#ifndef DPSKETCH_BENCH_H_
#define DPSKETCH_BENCH_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpsketch/hashing.h"

namespace dpsketch {

// QLL-style register sketch, faithful only in update cost and register
// growth. Each register keeps the maximum of independent geometric draws
// with success probability gamma / (1 + gamma).
class QllStub {
 public:
  // gamma = 7.49 / sqrt(k).
  static double DefaultGamma(uint32_t k);

  QllStub(uint32_t k, const Seed& seed);
  QllStub(uint32_t k, double gamma, const Seed& seed);

  // k hash evaluations, one per register.
  void Update(std::string_view item);

  // Sets every register to a draw from the distribution of the maximum of
  // n independent geometric values, as if n distinct items had been added.
  // Deterministic given the seed and `stream`.
  void SimulateStream(uint64_t n, uint64_t stream = 0);

  // Geometric draw for one hash: 1 + floor(-ln u / ln(1 + gamma)) with
  // u = (bits + 1/2) / 2^64.
  uint32_t GeometricFromHash(HashValue h) const;

  uint32_t MaxRegister() const;
  // k * bit_width(max register).
  uint64_t TotalSketchSizeBits() const;

  uint32_t k() const { return static_cast<uint32_t>(registers_.size()); }
  double gamma() const { return gamma_; }
  const std::vector<uint32_t>& registers() const { return registers_; }
  // Hash evaluations performed by Update() so far.
  uint64_t hash_evaluations() const { return hash_evaluations_; }

 private:
  double gamma_;
  double log_base_;  // ln(1 + gamma)
  Hasher hasher_;
  std::vector<uint32_t> registers_;
  uint64_t hash_evaluations_ = 0;
};

// k * bit_width(max_register): bits needed to store k registers at the
// width of the largest one.
uint64_t RegisterSketchSizeBits(uint32_t k, uint32_t max_register);

struct BenchResult {
  std::string pipeline;  // "hll", "phll" or "qll"
  uint32_t k = 0;
  uint64_t trials = 0;
  double mean_update_ns = 0.0;
  double stddev_update_ns = 0.0;
  // stddev / mean > 0.5.
  bool unreliable = false;
  double mean_size_bits = 0.0;
  std::vector<double> update_ns;      // per trial
  std::vector<uint64_t> size_bits;    // per trial
  std::vector<uint32_t> max_register; // per trial
};

struct BenchUpdateOptions {
  std::vector<uint32_t> k_values{128, 256, 512, 1024, 2048, 4096};
  uint64_t updates = 1024;
  uint64_t trials = 5;
  // Each trial times this many fresh populations and keeps the median, which
  // screens out scheduler preemptions.
  uint32_t repetitions = 5;
  double epsilon = 0.6931471805599453;
  Seed seed;
};

// Per-update wall-clock time of populating a fresh sketch with `updates`
// distinct items, for HLL, PHLL and the QLL stub.
std::vector<BenchResult> BenchUpdate(const BenchUpdateOptions& options);

struct BenchSpaceOptions {
  std::vector<uint32_t> k_values{128, 256, 512, 1024, 2048, 4096};
  uint64_t n = uint64_t{1} << 20;
  double epsilon = 0.6931471805599453;
  uint64_t trials = 3;
  Seed seed;
  unsigned threads = 0;
};

struct SpaceRatio {
  uint32_t k = 0;
  double qll_to_phll = 0.0;  // ratio of mean total sizes
};

struct BenchSpaceResult {
  std::vector<BenchResult> results;
  std::vector<SpaceRatio> ratios;
};

// Total sketch size after n distinct items. HLL and PHLL are run on the
// items directly; QLL registers are drawn from their exact max
// distribution because n * k hashes would take too long.
BenchSpaceResult BenchSpace(const BenchSpaceOptions& options);

// Least-squares slope of log(y) against log(x).
double LogLogSlope(std::span<const double> x, std::span<const double> y);

// CSV with columns pipeline,k,metric,value,trial.
void WriteUpdateCsv(std::span<const BenchResult> results, std::ostream& out);
void WriteSpaceCsv(const BenchSpaceResult& result, std::ostream& out);

}  // namespace dpsketch

#endif  // DPSKETCH_BENCH_H_
