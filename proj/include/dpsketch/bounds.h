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
// Closed-form delta for unmodified sketches: the probability that the final
// state of a sketch over n distinct items has sampling probability at or
// above pi0 = 1 - exp(-epsilon). All functions are pure.
// -----------------------------------------------------------------------------

#ifndef DPSKETCH_BOUNDS_H_
#define DPSKETCH_BOUNDS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "dpsketch/sketch_config.h"

namespace dpsketch {

enum class BoundMethod : uint8_t {
  kHllUnion,
  kFm85Union,
  kBottomKExact,
  kBottomKBernstein,
  kLpcaGeometric,
  kAdaptiveViaBottomK,
};

std::string_view BoundMethodName(BoundMethod method);

struct DeltaBound {
  // In [0, 1]; 1 whenever valid is false.
  double delta = 1.0;
  // Whether the preconditions (n >= n0, and n > mu0 for LPCA) hold.
  bool valid = false;
  BoundMethod method = BoundMethod::kHllUnion;
  // Bottom-k family only: the Bernstein bound exp(-n * alpha_n), clamped.
  std::optional<double> bernstein;
};

// 1 - exp(-epsilon). Throws std::invalid_argument unless epsilon > 0.
double Pi0(double epsilon);
// ceil(kmax / pi0), tolerant to the last-ulp error in pi0.
uint64_t MinimumCardinality(uint64_t kmax, double epsilon);

// min(1, k * exp(-pi0 * n / k)).
DeltaBound DeltaHll(uint32_t k, double epsilon, uint64_t n);

// With v = ceil(-log2 pi0): min(1, k * v * exp(-2^-v * n / k)). n0 uses
// kmax = k * bitmap_length.
DeltaBound DeltaFm85(uint32_t k, uint32_t bitmap_length, double epsilon, uint64_t n);
// ceil(-log2 pi0), tolerant to rounding in pi0.
uint32_t Fm85CouponLevels(double epsilon);

// P(X <= k) for X ~ Binomial(n, pi0), computed in log space when
// k * n <= 1e7 and by the Bernstein bound otherwise.
DeltaBound DeltaBottomK(uint32_t k, double epsilon, uint64_t n);
double BinomialLowerTail(uint64_t k, uint64_t n, double p);
// alpha_n = 0.5 (pi0 - k/n)^2 / (pi0 (1 - pi0) + 1 / (3 n^2)).
double BernsteinAlpha(uint32_t k, double epsilon, uint64_t n);
// exp(-n alpha_n), or 1 when n * pi0 <= k and the bound says nothing.
double BernsteinBound(uint32_t k, double epsilon, uint64_t n);

// Pure DP (delta 0) when p < pi0 and n > k / pi0. Otherwise
// (mu0 / n) * exp(-pi0_tilde * (n / mu0 - 1)) with b0 = ceil(k (1 - pi0/p)),
// pi0_tilde = b0 / k and mu0 = sum_{i < b0} 1 / (p (1 - i / k)).
DeltaBound DeltaLpca(uint32_t k, double sampling_rate, double epsilon, uint64_t n);
uint32_t LpcaFillThreshold(uint32_t k, double sampling_rate, double epsilon);
double LpcaExpectedFillTime(uint32_t k, double sampling_rate, uint32_t b0);

// Delegates to the bottom-k bound.
DeltaBound DeltaAdaptive(uint32_t k, double epsilon, uint64_t n);

// Dispatches on config.family.
DeltaBound DeltaFor(const SketchConfig& config, double epsilon, uint64_t n);

// The estimate the family reports on a state with sampling probability pi0.
// Throws std::invalid_argument for families or regimes where the estimator
// is not a strictly decreasing function of pi (FM85, adaptive sampling, the
// HLL small range).
double EstimatorThreshold(const SketchConfig& config, double epsilon);

// Fraction of sampled estimates strictly below EstimatorThreshold().
double DeltaViaEstimatorThreshold(const SketchConfig& config, double epsilon,
                                  std::span<const double> estimates);

}  // namespace dpsketch

#endif  // DPSKETCH_BOUNDS_H_
