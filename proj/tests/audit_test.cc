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


#include "dpsketch/audit.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "test_util.h"

namespace dpsketch {
namespace {

using testing::DistinctItems;
using testing::RandomConfig;
using testing::RandomSeed;
using testing::Rng;
using testing::Uniform;

const double kLn2 = std::log(2.0);
constexpr double kZ95 = 1.959963984540054;

TEST(UniverseTest, NumberedFromOne) {
  EXPECT_EQ(MakeUniverse(3), (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_TRUE(MakeUniverse(0).empty());
}

// For bottom-k the removal set is exactly the items holding the k smallest
// hashes (or everything when the sketch is not full).
TEST(RemovalSetTest, BottomKOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const uint32_t k = static_cast<uint32_t>(Uniform(rng, 1, 10));
    const auto items = DistinctItems(rng, Uniform(rng, 1, 30));
    const Seed seed = RandomSeed(rng);
    const Hasher hasher(seed);
    std::vector<size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return hasher.Hash(items[a], HashRole::kSketchHash).bits <
             hasher.Hash(items[b], HashRole::kSketchHash).bits;
    });
    order.resize(std::min<size_t>(k, order.size()));
    std::sort(order.begin(), order.end());
    EXPECT_EQ(RemovalSet(items, SketchConfig::BottomK(k), seed), order);
  }
}

// For LPCA with p = 1 an item is critical iff no other item sets its bit.
TEST(RemovalSetTest, LpcaOracle) {
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const uint32_t k = static_cast<uint32_t>(Uniform(rng, 1, 40));
    const auto items = DistinctItems(rng, Uniform(rng, 1, 60));
    const Seed seed = RandomSeed(rng);
    const SketchConfig config = SketchConfig::Lpca(k);
    std::map<uint32_t, std::vector<size_t>> by_bit;
    for (size_t i = 0; i < items.size(); ++i) {
      Sketch one(config, seed);
      one.Add(items[i]);
      const auto& words = one.As<LpcaState>().words();
      for (uint32_t b = 0; b < k; ++b) {
        if ((words[b / 64] >> (b % 64)) & 1) by_bit[b].push_back(i);
      }
    }
    std::vector<size_t> expected;
    for (const auto& [bit, holders] : by_bit) {
      if (holders.size() == 1) expected.push_back(holders[0]);
    }
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(RemovalSet(items, config, seed), expected);
  }
}

TEST(RemovalSetTest, SingleItemAndEmpty) {
  for (const SketchConfig& config : testing::SmallConfigs()) {
    const std::vector<std::string> one = {"x"};
    // A lone LPCA item with p < 1 may not be sampled at all.
    const auto removal = RemovalSet(one, config, Seed::FromU64(1));
    if (config.family != Family::kLpca) {
      EXPECT_EQ(removal, std::vector<size_t>{0}) << FamilyName(config.family);
    }
    EXPECT_TRUE(RemovalSet({}, config, Seed::FromU64(1)).empty());
  }
}

TEST(RemovalSetTest, BoundedByKmax) {
  Rng rng(23);
  for (Family family : testing::kAllFamilies) {
    for (int trial = 0; trial < 60; ++trial) {
      const SketchConfig config = RandomConfig(rng, family);
      const auto items = DistinctItems(rng, Uniform(rng, 2, 120));
      EXPECT_LE(RemovalSet(items, config, RandomSeed(rng)).size(), Kmax(config))
          << FamilyName(family);
    }
  }
}

TEST(StateKeyTest, EqualStatesEqualKeys) {
  Rng rng(24);
  for (const SketchConfig& config : testing::SmallConfigs()) {
    const Seed seed = RandomSeed(rng);
    auto items = DistinctItems(rng, 20);
    const Sketch a = BuildSketch(items, config, seed);
    std::reverse(items.begin(), items.end());
    const Sketch b = BuildSketch(items, config, seed);
    EXPECT_EQ(StateKey(a, false), StateKey(b, false));
    EXPECT_EQ(StateKey(a, true), StateKey(b, true));
    const Sketch empty(config, seed);
    EXPECT_NE(StateKey(a, false), StateKey(empty, false)) << FamilyName(config.family);
  }
}

TEST(StateKeyTest, QuantizationKeepsTopByte) {
  const SketchConfig config = SketchConfig::BottomK(2);
  const Seed seed = Seed::FromU64(1);
  Sketch a(config, seed);
  Sketch b(config, seed);
  a.AddHash(HashValue{0x1200000000000001});
  b.AddHash(HashValue{0x12ffffffffffffff});
  EXPECT_NE(StateKey(a, false), StateKey(b, false));
  EXPECT_EQ(StateKey(a, true), StateKey(b, true));
  Sketch c(config, seed);
  c.AddHash(HashValue{0x1300000000000000});
  EXPECT_NE(StateKey(a, true), StateKey(c, true));
  // The value count is part of the key.
  a.AddHash(HashValue{0x1200000000000002});
  EXPECT_NE(StateKey(a, true), StateKey(b, true));
}

TEST(WilsonIntervalTest, ReferenceValues) {
  const Interval zero = WilsonInterval(0, 100, kZ95);
  EXPECT_NEAR(zero.lo, 0.0, 1e-15);
  // Reference values use z = Phi^-1(0.975) exactly.
  EXPECT_NEAR(zero.hi, 0.03699349820698569, 1e-12);
  const Interval mid = WilsonInterval(30, 100, kZ99);
  EXPECT_NEAR(mid.lo, 0.1974606562099051, 1e-12);
  EXPECT_NEAR(mid.hi, 0.42742761887642405, 1e-12);
  const Interval all = WilsonInterval(100, 100, kZ95);
  EXPECT_NEAR(all.lo, 1 - 0.03699349820698569, 1e-12);
  EXPECT_NEAR(all.hi, 1.0, 1e-15);
  const Interval none = WilsonInterval(0, 0, kZ95);
  EXPECT_EQ(none.lo, 0.0);
  EXPECT_EQ(none.hi, 1.0);
}

TEST(WilsonIntervalTest, ContainsPointEstimateAndShrinks) {
  for (uint64_t n : {10u, 100u, 1000u}) {
    for (uint64_t s = 0; s <= n; s += n / 10) {
      const Interval ci = WilsonInterval(s, n, kZ99);
      const double p = static_cast<double>(s) / n;
      EXPECT_LE(ci.lo, p + 1e-15);
      EXPECT_GE(ci.hi, p - 1e-15);
    }
  }
  const Interval narrow = WilsonInterval(3000, 10000, kZ99);
  const Interval wide = WilsonInterval(30, 100, kZ99);
  EXPECT_LT(narrow.hi - narrow.lo, wide.hi - wide.lo);
}

AuditOptions LpcaAudit(Pipeline pipeline, double epsilon, uint64_t n, uint64_t trials) {
  AuditOptions options;
  options.config = SketchConfig::Lpca(4);
  options.epsilon = epsilon;
  options.pipeline = pipeline;
  options.n = n;
  options.trials = trials;
  options.seed = Seed::FromU64(31);
  return options;
}

TEST(AuditDpTest, SelfCompareIsConsistent) {
  AuditOptions options = LpcaAudit(Pipeline::kLargeSet, kLn2, 16, 20000);
  options.self_compare = true;
  const AuditReport report = AuditDp(options);
  EXPECT_EQ(report.verdict, Verdict::kConsistentWithDp);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_EQ(report.trials, 20000u);
  EXPECT_GT(report.states_compared, 0u);
}

TEST(AuditDpTest, UnprotectedSketchViolatesTinyEpsilon) {
  // Without downsampling, removing one of five items changes the LPCA bitmap
  // distribution far beyond e^0.01.
  const AuditReport report = AuditDp(LpcaAudit(Pipeline::kBase, 0.01, 5, 20000));
  EXPECT_EQ(report.verdict, Verdict::kViolationDetected);
  ASSERT_FALSE(report.violations.empty());
  for (const StateRatio& v : report.violations) {
    EXPECT_TRUE(v.ci.lo > std::exp(0.01) || v.ci.hi < std::exp(-0.01));
  }
  EXPECT_GT(report.max_log_ratio, 0.01);
}

TEST(AuditDpTest, LargeSetLpcaIsConsistent) {
  const AuditReport report = AuditDp(LpcaAudit(Pipeline::kLargeSet, kLn2, 16, 40000));
  EXPECT_EQ(report.verdict, Verdict::kConsistentWithDp) << report.max_log_ratio;
  EXPECT_LE(report.max_log_ratio_ci.lo, kLn2);
  EXPECT_GE(report.min_log_ratio_ci.hi, -kLn2);
  EXPECT_LE(report.sparse_mass, 0.01);
}

TEST(AuditDpTest, ThreadCountDoesNotChangeReport) {
  AuditOptions options = LpcaAudit(Pipeline::kAnySet, kLn2, 6, 3000);
  options.threads = 1;
  const AuditReport one = AuditDp(options);
  options.threads = 3;
  const AuditReport three = AuditDp(options);
  EXPECT_EQ(one.max_log_ratio, three.max_log_ratio);
  EXPECT_EQ(one.min_log_ratio, three.min_log_ratio);
  EXPECT_EQ(one.states_observed, three.states_observed);
  EXPECT_EQ(one.sparse_mass, three.sparse_mass);
  EXPECT_EQ(one.verdict, three.verdict);
}

TEST(AuditDpTest, ScatteredStatesAreInconclusive) {
  AuditOptions options;
  options.config = SketchConfig::Hll(64);
  options.n = 16;
  options.trials = 200;
  options.seed = Seed::FromU64(5);
  const AuditReport report = AuditDp(options);
  EXPECT_EQ(report.verdict, Verdict::kInconclusive);
  EXPECT_GT(report.sparse_mass, 0.01);
}

TEST(AuditDpTest, RejectsEmptyInputs) {
  AuditOptions options = LpcaAudit(Pipeline::kLargeSet, kLn2, 0, 10);
  EXPECT_THROW(AuditDp(options), std::invalid_argument);
  options.n = 4;
  options.trials = 0;
  EXPECT_THROW(AuditDp(options), std::invalid_argument);
}

TEST(EmpiricalDeltaTest, Extremes) {
  // One item in a 4-bit LPCA: pi stays 1.
  const ProportionReport always = EmpiricalDelta(SketchConfig::Lpca(4), kLn2, 1, 500,
                                                 Seed::FromU64(1));
  EXPECT_EQ(always.estimate, 1.0);
  EXPECT_EQ(always.successes, 500u);
  // 10^4 items in a 16-register HLL: pi is tiny.
  const ProportionReport never = EmpiricalDelta(SketchConfig::Hll(16), kLn2, 10000, 50,
                                                Seed::FromU64(1));
  EXPECT_EQ(never.estimate, 0.0);
  EXPECT_EQ(never.ci.lo, 0.0);
  EXPECT_GT(never.ci.hi, 0.0);
}

TEST(EmpiricalDeltaTest, MatchesDirectCount) {
  const SketchConfig config = SketchConfig::BottomK(8);
  const Seed seed = Seed::FromU64(77);
  const uint64_t n = 20;
  const uint64_t trials = 400;
  const auto universe = MakeUniverse(n);
  uint64_t count = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    count += BuildSketch(universe, config, seed.Derive(t)).SamplingProbability() >= 0.5;
  }
  const ProportionReport report = EmpiricalDelta(config, kLn2, n, trials, seed);
  EXPECT_EQ(report.successes, count);
  EXPECT_EQ(report.trials, trials);
  // And sits under the exact binomial tail up to sampling noise.
  const double delta = DeltaBottomK(8, kLn2, n).delta;
  EXPECT_LE(report.estimate, delta + 4 * std::sqrt(delta * (1 - delta) / trials));
}

TEST(StatReportTest, SmallSample) {
  const std::vector<double> xs = {1, 2, 3, 4};
  const StatReport r = StatReport::From(xs);
  EXPECT_DOUBLE_EQ(r.mean, 2.5);
  EXPECT_DOUBLE_EQ(r.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.standard_error, std::sqrt(5.0 / 12.0));
  EXPECT_DOUBLE_EQ(r.kurtosis, 2.5625 / (1.25 * 1.25));
  EXPECT_EQ(r.trials, 4u);
}

TEST(PipelineEstimatesTest, RawMatchesSeedSchedule) {
  const SketchConfig config = SketchConfig::BottomK(8);
  const Seed seed = Seed::FromU64(8);
  const auto estimates = PipelineEstimates(Pipeline::kRaw, config, kLn2, 50, 20, seed, 2);
  ASSERT_EQ(estimates.size(), 20u);
  const auto universe = MakeUniverse(50);
  for (uint64_t t = 0; t < 20; ++t) {
    EXPECT_EQ(estimates[t], BuildSketch(universe, config, seed.Derive(t)).Estimate());
  }
}

TEST(UnbiasednessCheckTest, AnySetSmallN) {
  const UnbiasednessReport r = UnbiasednessCheck(Pipeline::kAnySet, SketchConfig::BottomK(16),
                                                 kLn2, 10, 800, Seed::FromU64(9));
  EXPECT_EQ(r.target, 10.0);
  EXPECT_EQ(r.pass, std::abs(r.stats.mean - 10.0) <= 3 * r.stats.standard_error);
  EXPECT_NEAR(r.stats.mean, 10.0, 4 * r.stats.standard_error);
}

TEST(VarianceRatioTest, NoDownsamplingGivesOne) {
  // pi0 rounds to 1 at epsilon = 50, so the gate passes every item.
  const VarianceRatioReport r = VarianceRatioCheck(SketchConfig::BottomK(16), 50.0, 200, 200,
                                                   Seed::FromU64(10), Pipeline::kLargeSet);
  EXPECT_DOUBLE_EQ(r.ratio, 1.0);
  EXPECT_GT(r.log_standard_error, 0.0);
}

TEST(VarianceRatioTest, DownsamplingCostsVariance) {
  const VarianceRatioReport r = VarianceRatioCheck(SketchConfig::BottomK(16), kLn2, 64, 600,
                                                   Seed::FromU64(11), Pipeline::kAnySet);
  EXPECT_GT(r.ratio, 1.0);
}

}  // namespace
}  // namespace dpsketch
