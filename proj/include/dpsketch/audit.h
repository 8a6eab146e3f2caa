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
// Monte-Carlo checks of the privacy and utility claims.
//
// Every check runs over a deterministic seed schedule base.Derive(i) and the
// universe D = {"1", ..., "n"}. Trials run on worker threads; results are
// reduced in trial order, so reports do not depend on the thread count.
// -----------------------------------------------------------------------------

#ifndef DPSKETCH_AUDIT_H_
#define DPSKETCH_AUDIT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpsketch/dp.h"

namespace dpsketch {

// {"1", "2", ..., "n"}.
std::vector<std::string> MakeUniverse(uint64_t n);

// Indices i with sketch(items without i) != sketch(items). Items must be
// distinct.
std::vector<size_t> RemovalSet(std::span<const std::string> items,
                               const SketchConfig& config, const Seed& seed);

// Canonical bytes of a sketch state. With `quantize`, bottom-k and adaptive
// sampling hash values are cut to their top 8 bits so that states fall into
// finitely many, reasonably populated cells.
std::string StateKey(const Sketch& sketch, bool quantize);

// Two-sided Wilson score interval for `successes` out of `trials`.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval WilsonInterval(uint64_t successes, uint64_t trials, double z);

// z for a two-sided 99% interval.
inline constexpr double kZ99 = 2.5758293035489004;

enum class Verdict : uint8_t { kConsistentWithDp, kViolationDetected, kInconclusive };
std::string_view VerdictName(Verdict verdict);

struct AuditOptions {
  SketchConfig config;
  double epsilon = 0.6931471805599453;
  // kBase audits the unmodified sketch.
  Pipeline pipeline = Pipeline::kLargeSet;
  uint64_t n = 16;
  uint64_t trials = 100000;
  Seed seed;
  // Compare D against an independent run on D instead of D without item 1.
  bool self_compare = false;
  // States seen fewer times than this in both worlds are not compared.
  uint64_t min_count = 50;
  // Above this fraction of trials in sparse states the verdict is
  // Inconclusive.
  double max_sparse_mass = 0.01;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct StateRatio {
  std::string key;
  uint64_t count_full = 0;     // runs on D
  uint64_t count_removed = 0;  // runs on D minus item 1
  double ratio = 0.0;          // may be 0 or +inf
  Interval ci;                 // ratio CI, may have hi = +inf
};

struct AuditReport {
  double epsilon_target = 0.0;
  // Extremes of log(Pr_D(s) / Pr_D'(s)) over compared states with nonzero
  // counts in both worlds, each with the log of its ratio CI.
  double max_log_ratio = 0.0;
  Interval max_log_ratio_ci{0.0, 0.0};
  double min_log_ratio = 0.0;
  Interval min_log_ratio_ci{0.0, 0.0};
  uint64_t states_observed = 0;
  uint64_t states_compared = 0;
  // Fraction of trials landing in states below min_count.
  double sparse_mass = 0.0;
  uint64_t trials = 0;
  Verdict verdict = Verdict::kInconclusive;
  // Compared states whose ratio CI lies outside [e^-eps, e^eps].
  std::vector<StateRatio> violations;
};

// Violation iff some compared state's 99% ratio CI lies entirely outside
// [e^-eps, e^eps]; otherwise Inconclusive if nothing could be compared or
// the sparse mass is too large; otherwise ConsistentWithDp.
AuditReport AuditDp(const AuditOptions& options);

struct ProportionReport {
  double estimate = 0.0;
  Interval ci;  // Wilson 99%
  uint64_t successes = 0;
  uint64_t trials = 0;
};

// Fraction of seeds whose unmodified sketch of D = {1..n} has sampling
// probability >= pi0.
ProportionReport EmpiricalDelta(const SketchConfig& config, double epsilon, uint64_t n,
                                uint64_t trials, const Seed& seed, unsigned threads = 0);

struct StatReport {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  uint64_t trials = 0;
  double standard_error = 0.0;  // sqrt(variance / trials)
  double kurtosis = 0.0;        // m4 / m2^2

  static StatReport From(std::span<const double> samples);
};

// Estimates of |D| = n produced by `pipeline` over the seed schedule. kMakeDp
// privatizes an unmodified sketch of D.
std::vector<double> PipelineEstimates(Pipeline pipeline, const SketchConfig& config,
                                      double epsilon, uint64_t n, uint64_t trials,
                                      const Seed& seed, unsigned threads = 0);

struct UnbiasednessReport {
  StatReport stats;
  double target = 0.0;
  // |mean - n| <= 3 standard errors.
  bool pass = false;
};

UnbiasednessReport UnbiasednessCheck(Pipeline pipeline, const SketchConfig& config,
                                     double epsilon, uint64_t n, uint64_t trials,
                                     const Seed& seed, unsigned threads = 0);

struct VarianceRatioReport {
  double ratio = 0.0;
  // Delta-method standard error of log(ratio), from the sample kurtoses.
  double log_standard_error = 0.0;
  StatReport dp;
  StatReport base;
};

// Var(pipeline estimate) / Var(unmodified sketch estimate) on the same seeds.
VarianceRatioReport VarianceRatioCheck(const SketchConfig& config, double epsilon,
                                       uint64_t n, uint64_t trials, const Seed& seed,
                                       Pipeline pipeline = Pipeline::kAnySet,
                                       unsigned threads = 0);

}  // namespace dpsketch

#endif  // DPSKETCH_AUDIT_H_
