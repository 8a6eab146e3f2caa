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

#include "dpsketch/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpsketch/families.h"

namespace dpsketch {
namespace {

constexpr double kExactWorkLimit = 1e7;

// ceil(x) that ignores excess of a few ulps above an integer, so that e.g.
// 1024 / pi0(ln 2) is 2048 even if pi0 rounds to just below 0.5.
double CeilTolerant(double x) {
  return std::ceil(x - 1e-9 * std::max(1.0, std::abs(x)));
}

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

DeltaBound Invalid(BoundMethod method) {
  return DeltaBound{.delta = 1.0, .valid = false, .method = method, .bernstein = {}};
}

}  // namespace

std::string_view BoundMethodName(BoundMethod method) {
  switch (method) {
    case BoundMethod::kHllUnion:
      return "HllUnion";
    case BoundMethod::kFm85Union:
      return "Fm85Union";
    case BoundMethod::kBottomKExact:
      return "BottomKExact";
    case BoundMethod::kBottomKBernstein:
      return "BottomKBernstein";
    case BoundMethod::kLpcaGeometric:
      return "LpcaGeometric";
    case BoundMethod::kAdaptiveViaBottomK:
      return "AdaptiveViaBottomK";
  }
  return "unknown";
}

double Pi0(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return -std::expm1(-epsilon);
}

uint64_t MinimumCardinality(uint64_t kmax, double epsilon) {
  return static_cast<uint64_t>(CeilTolerant(static_cast<double>(kmax) / Pi0(epsilon)));
}

DeltaBound DeltaHll(uint32_t k, double epsilon, uint64_t n) {
  const double pi0 = Pi0(epsilon);
  if (n < MinimumCardinality(k, epsilon)) return Invalid(BoundMethod::kHllUnion);
  const double delta = k * std::exp(-pi0 * static_cast<double>(n) / k);
  return {.delta = Clamp01(delta), .valid = true, .method = BoundMethod::kHllUnion};
}

uint32_t Fm85CouponLevels(double epsilon) {
  return static_cast<uint32_t>(CeilTolerant(-std::log2(Pi0(epsilon))));
}

DeltaBound DeltaFm85(uint32_t k, uint32_t bitmap_length, double epsilon, uint64_t n) {
  const uint64_t kmax = uint64_t{k} * bitmap_length;
  if (n < MinimumCardinality(kmax, epsilon)) return Invalid(BoundMethod::kFm85Union);
  const uint32_t v = Fm85CouponLevels(epsilon);
  const double pi0_tilde = std::ldexp(1.0, -static_cast<int>(v));
  const double delta =
      static_cast<double>(k) * v * std::exp(-pi0_tilde * static_cast<double>(n) / k);
  return {.delta = Clamp01(delta), .valid = true, .method = BoundMethod::kFm85Union};
}

double BinomialLowerTail(uint64_t k, uint64_t n, double p) {
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const auto nd = static_cast<double>(n);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  if (nd * std::max(-log_p, -log_q) < 600.0 && n <= 1000) {
    // No underflow: sum the pmf directly with exact integer coefficients
    // while they fit in 53 bits.
    double coefficient = 1.0;
    double sum = 0.0;
    for (uint64_t j = 0; j <= k; ++j) {
      sum += coefficient * std::pow(p, static_cast<double>(j)) *
             std::pow(1.0 - p, static_cast<double>(n - j));
      coefficient = coefficient * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return Clamp01(sum);
  }
  const double log_n_fact = std::lgamma(nd + 1.0);
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(k + 1);
  for (uint64_t j = 0; j <= k; ++j) {
    const auto jd = static_cast<double>(j);
    const double term = log_n_fact - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) +
                        jd * log_p + (nd - jd) * log_q;
    logs.push_back(term);
    max_log = std::max(max_log, term);
  }
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - max_log);
  return Clamp01(std::exp(max_log + std::log(sum)));
}

double BernsteinAlpha(uint32_t k, double epsilon, uint64_t n) {
  const double pi0 = Pi0(epsilon);
  const auto nd = static_cast<double>(n);
  const double x = k / nd;
  const double gap = pi0 - x;
  // The variance term must dominate t(1 - t) on all of [k/n, pi0]; pi0(1 - pi0)
  // does so only when pi0 <= 1/2. Past that the exponent would exceed the
  // Chernoff rate and the bound would undercut the exact tail.
  double variance = pi0 * (1.0 - pi0);
  if (pi0 > 0.5) variance = x <= 0.5 ? 0.25 : x * (1.0 - x);
  return 0.5 * gap * gap / (variance + 1.0 / (3.0 * nd * nd));
}

double BernsteinBound(uint32_t k, double epsilon, uint64_t n) {
  if (static_cast<double>(n) * Pi0(epsilon) <= k) return 1.0;
  return Clamp01(std::exp(-static_cast<double>(n) * BernsteinAlpha(k, epsilon, n)));
}

DeltaBound DeltaBottomK(uint32_t k, double epsilon, uint64_t n) {
  if (n < MinimumCardinality(k, epsilon)) {
    DeltaBound out = Invalid(BoundMethod::kBottomKExact);
    out.bernstein = 1.0;
    return out;
  }
  const double bernstein = BernsteinBound(k, epsilon, n);
  DeltaBound out{.valid = true, .bernstein = bernstein};
  if (static_cast<double>(k) * static_cast<double>(n) <= kExactWorkLimit) {
    out.delta = BinomialLowerTail(k, n, Pi0(epsilon));
    out.method = BoundMethod::kBottomKExact;
  } else {
    out.delta = bernstein;
    out.method = BoundMethod::kBottomKBernstein;
  }
  return out;
}

uint32_t LpcaFillThreshold(uint32_t k, double sampling_rate, double epsilon) {
  const double b0 = CeilTolerant(k * (1.0 - Pi0(epsilon) / sampling_rate));
  return b0 <= 0.0 ? 0 : static_cast<uint32_t>(b0);
}

double LpcaExpectedFillTime(uint32_t k, double sampling_rate, uint32_t b0) {
  double mu0 = 0.0;
  for (uint32_t i = 0; i < b0; ++i) {
    mu0 += 1.0 / (sampling_rate * (1.0 - static_cast<double>(i) / k));
  }
  return mu0;
}

DeltaBound DeltaLpca(uint32_t k, double sampling_rate, double epsilon, uint64_t n) {
  const double pi0 = Pi0(epsilon);
  const auto nd = static_cast<double>(n);
  const uint64_t n0 = MinimumCardinality(k, epsilon);
  if (sampling_rate < pi0) {
    // Every state already has pi <= p < pi0.
    if (n < n0 || nd <= k / pi0 * (1.0 + 1e-12)) return Invalid(BoundMethod::kLpcaGeometric);
    return {.delta = 0.0, .valid = true, .method = BoundMethod::kLpcaGeometric};
  }
  const uint32_t b0 = LpcaFillThreshold(k, sampling_rate, epsilon);
  if (b0 == 0) {
    // p == pi0: only the empty bitmap reaches pi0.
    if (n < n0) return Invalid(BoundMethod::kLpcaGeometric);
    return {.delta = Clamp01(std::pow(1.0 - sampling_rate, nd)),
            .valid = true,
            .method = BoundMethod::kLpcaGeometric};
  }
  const double mu0 = LpcaExpectedFillTime(k, sampling_rate, b0);
  if (n < n0 || nd <= mu0) return Invalid(BoundMethod::kLpcaGeometric);
  const double pi0_tilde = static_cast<double>(b0) / k;
  const double delta = (mu0 / nd) * std::exp(-pi0_tilde * (nd / mu0 - 1.0));
  return {.delta = Clamp01(delta), .valid = true, .method = BoundMethod::kLpcaGeometric};
}

DeltaBound DeltaAdaptive(uint32_t k, double epsilon, uint64_t n) {
  DeltaBound out = DeltaBottomK(k, epsilon, n);
  out.method = BoundMethod::kAdaptiveViaBottomK;
  // The threshold never exceeds the k-th minimum, so the bottom-k tail bounds
  // the violation probability; validity still needs the adaptive kmax.
  if (n < MinimumCardinality(uint64_t{k} + 1, epsilon)) {
    out.valid = false;
    out.delta = 1.0;
  }
  return out;
}

DeltaBound DeltaFor(const SketchConfig& config, double epsilon, uint64_t n) {
  switch (config.family) {
    case Family::kHll:
      return DeltaHll(config.k, epsilon, n);
    case Family::kBottomK:
      return DeltaBottomK(config.k, epsilon, n);
    case Family::kFm85:
      return DeltaFm85(config.k, config.bitmap_length, epsilon, n);
    case Family::kLpca:
      return DeltaLpca(config.k, config.sampling_rate, epsilon, n);
    case Family::kAdaptiveSampling:
      return DeltaAdaptive(config.k, epsilon, n);
  }
  throw std::invalid_argument("unknown sketch family");
}

double EstimatorThreshold(const SketchConfig& config, double epsilon) {
  const double pi0 = Pi0(epsilon);
  const auto k = static_cast<double>(config.k);
  switch (config.family) {
    case Family::kBottomK:
      return (k - 1.0) / pi0;
    case Family::kLpca:
      // The estimate as a function of pi = p (1 - B/k).
      return -(k / config.sampling_rate) * std::log(pi0 / config.sampling_rate);
    case Family::kHll: {
      const double threshold = HllState::Alpha(config.k) * k / pi0;
      if (threshold <= 2.5 * k) {
        throw std::invalid_argument(
            "HLL estimate at pi0 falls in the small range where it is not a "
            "function of pi");
      }
      return threshold;
    }
    case Family::kFm85:
    case Family::kAdaptiveSampling:
      break;
  }
  throw std::invalid_argument(std::string(FamilyName(config.family)) +
                              " estimator is not a strictly decreasing function of pi");
}

double DeltaViaEstimatorThreshold(const SketchConfig& config, double epsilon,
                                  std::span<const double> estimates) {
  const double threshold = EstimatorThreshold(config, epsilon);
  if (estimates.empty()) return 0.0;
  const auto below = std::count_if(estimates.begin(), estimates.end(),
                                   [threshold](double e) { return e < threshold; });
  return static_cast<double>(below) / static_cast<double>(estimates.size());
}

}  // namespace dpsketch
