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

#include "dpsketch/hashing.h"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "test_util.h"

namespace dpsketch {
namespace {

// Upper alpha critical value of chi-square with `dof` degrees of freedom.
double ChiSquareCritical(double dof, double alpha) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

TEST(SeedTest, HexRoundTrip) {
  const std::string hex = "00112233445566778899aabbccddeeff0123456789abcdef0f1e2d3c4b5a6978";
  EXPECT_EQ(Seed::FromHex(hex).ToHex(), hex);
  EXPECT_EQ(Seed::FromHex("00112233445566778899AABBCCDDEEFF0123456789ABCDEF0F1E2D3C4B5A6978"),
            Seed::FromHex(hex));
}

TEST(SeedTest, RejectsMalformedHex) {
  EXPECT_THROW(Seed::FromHex(""), std::invalid_argument);
  EXPECT_THROW(Seed::FromHex(std::string(63, '0')), std::invalid_argument);
  EXPECT_THROW(Seed::FromHex(std::string(65, '0')), std::invalid_argument);
  EXPECT_THROW(Seed::FromHex(std::string(63, '0') + "g"), std::invalid_argument);
}

TEST(SeedTest, DerivedSeedsAreDistinctAndStable) {
  const Seed base = Seed::FromU64(7);
  std::set<std::string> seen;
  for (uint64_t i = 0; i < 1000; ++i) seen.insert(base.Derive(i).ToHex());
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(base.Derive(3), Seed::FromU64(7).Derive(3));
  EXPECT_FALSE(base.Derive(0) == base);
}

TEST(HashTest, Deterministic) {
  const Seed seed = Seed::FromU64(1);
  for (HashRole role : {HashRole::kSketchHash, HashRole::kDownsampleHash}) {
    EXPECT_EQ(Hash64("apple", seed, role), Hash64("apple", seed, role));
    EXPECT_EQ(Hasher(seed).Hash("apple", role), Hash64("apple", seed, role));
  }
}

TEST(HashTest, DependsOnSeedAndItem) {
  EXPECT_NE(Hash64("apple", Seed::FromU64(1), HashRole::kSketchHash),
            Hash64("apple", Seed::FromU64(2), HashRole::kSketchHash));
  EXPECT_NE(Hash64("apple", Seed::FromU64(1), HashRole::kSketchHash),
            Hash64("apples", Seed::FromU64(1), HashRole::kSketchHash));
  EXPECT_NE(Hash64("", Seed::FromU64(1), HashRole::kSketchHash),
            Hash64(std::string_view("\0", 1), Seed::FromU64(1), HashRole::kSketchHash));
}

TEST(HashTest, RolesDiffer) {
  testing::Rng rng(11);
  for (int s = 0; s < 20; ++s) {
    const Hasher hasher(testing::RandomSeed(rng));
    int differing = 0;
    for (int i = 0; i < 100; ++i) {
      const std::string item = std::to_string(rng());
      differing += hasher.Hash(item, HashRole::kSketchHash) !=
                   hasher.Hash(item, HashRole::kDownsampleHash);
    }
    EXPECT_GE(differing, 1);
    EXPECT_EQ(differing, 100);
  }
}

TEST(HashTest, PhantomAndIndexedNamespacesAreDisjointFromItems) {
  const Hasher hasher(Seed::FromU64(5));
  for (uint64_t i = 0; i < 200; ++i) {
    const std::string item = std::to_string(i);
    EXPECT_NE(hasher.HashPhantom(i, HashRole::kSketchHash),
              hasher.Hash(item, HashRole::kSketchHash));
    EXPECT_NE(hasher.HashIndexed(item, 0), hasher.Hash(item, HashRole::kSketchHash));
    EXPECT_NE(hasher.HashIndexed(item, 0), hasher.HashIndexed(item, 1));
  }
}

TEST(HashTest, UnitValuesAreBalanced) {
  const Hasher hasher(Seed::FromU64(2024));
  constexpr int kItems = 1'000'000;
  int below_half = 0;
  for (int i = 0; i < kItems; ++i) {
    below_half += ToUnitInterval(hasher.Hash(std::to_string(i), HashRole::kSketchHash)) < 0.5;
  }
  EXPECT_NEAR(static_cast<double>(below_half) / kItems, 0.5, 0.002);
}

TEST(HashTest, RolesAreUncorrelated) {
  const Hasher hasher(Seed::FromU64(99));
  constexpr int kItems = 100'000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < kItems; ++i) {
    const std::string item = std::to_string(i);
    const double x = ToUnitInterval(hasher.Hash(item, HashRole::kSketchHash));
    const double y = ToUnitInterval(hasher.Hash(item, HashRole::kDownsampleHash));
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double n = kItems;
  const double r = (sxy - sx * sy / n) /
                   std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  EXPECT_LT(std::abs(r), 0.02);
}

TEST(ToUnitIntervalTest, Endpoints) {
  EXPECT_EQ(ToUnitInterval(HashValue{0}), 0.0);
  EXPECT_EQ(ToUnitInterval(HashValue{uint64_t{1} << 63}), 0.5);
  const double top = ToUnitInterval(HashValue{~uint64_t{0}});
  EXPECT_LT(top, 1.0);
  // 1 - 2^-64 is not a double; the largest double below 1 is the closest
  // value that keeps the interval half-open.
  EXPECT_EQ(top, std::nextafter(1.0, 0.0));
}

TEST(ToUnitIntervalTest, ExactForSmallValuesAndMonotone) {
  EXPECT_EQ(ToUnitInterval(HashValue{1}), std::ldexp(1.0, -64));
  EXPECT_EQ(ToUnitInterval(HashValue{(uint64_t{1} << 53) - 1}),
            std::ldexp(static_cast<double>((uint64_t{1} << 53) - 1), -64));
  testing::Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const uint64_t a = rng();
    const uint64_t b = rng();
    const double ua = ToUnitInterval(HashValue{a});
    const double ub = ToUnitInterval(HashValue{b});
    ASSERT_LT(ua, 1.0);
    if (a <= b) {
      ASSERT_LE(ua, ub);
    } else {
      ASSERT_GE(ua, ub);
    }
  }
}

TEST(SplitBucketRankTest, SingleBucket) {
  testing::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(SplitBucketRank(HashValue{rng()}, 1, 32).bucket, 0u);
  }
}

TEST(SplitBucketRankTest, RankCountsLeadingZerosAfterBucketBits) {
  // k = 16: four bucket bits, then the rank bits.
  const uint64_t bucket_bits = uint64_t{0xA} << 60;
  EXPECT_EQ(SplitBucketRank(HashValue{bucket_bits | (uint64_t{1} << 59)}, 16, 32),
            (BucketRank{0xA, 1}));
  EXPECT_EQ(SplitBucketRank(HashValue{bucket_bits | (uint64_t{1} << 57)}, 16, 32),
            (BucketRank{0xA, 3}));
  // All remaining bits zero: rank 61, clamped.
  EXPECT_EQ(SplitBucketRank(HashValue{bucket_bits}, 16, 32), (BucketRank{0xA, 32}));
  EXPECT_EQ(SplitBucketRank(HashValue{bucket_bits}, 16, 60), (BucketRank{0xA, 60}));
  EXPECT_EQ(SplitBucketRank(HashValue{0}, 1, 64).rank, 64u);
}

TEST(SplitBucketRankTest, RejectsBadArguments) {
  EXPECT_THROW(SplitBucketRank(HashValue{1}, 3, 8), std::invalid_argument);
  EXPECT_THROW(SplitBucketRank(HashValue{1}, 0, 8), std::invalid_argument);
  EXPECT_THROW(SplitBucketRank(HashValue{1}, 16, 61), std::invalid_argument);
  EXPECT_THROW(SplitBucketRank(HashValue{1}, 16, 0), std::invalid_argument);
  EXPECT_NO_THROW(SplitBucketRank(HashValue{1}, 16, 60));
}

TEST(SplitBucketRankTest, MarginalsMatchUniformAndGeometric) {
  constexpr int kSamples = 1'000'000;
  constexpr uint32_t kBuckets = 16;
  constexpr uint32_t kMaxRank = 12;
  const Hasher hasher(Seed::FromU64(77));
  std::vector<double> buckets(kBuckets, 0.0);
  std::vector<double> ranks(kMaxRank + 1, 0.0);
  for (int i = 0; i < kSamples; ++i) {
    const BucketRank br =
        SplitBucketRank(hasher.Hash(std::to_string(i), HashRole::kSketchHash), kBuckets, kMaxRank);
    ++buckets[br.bucket];
    ++ranks[br.rank];
  }
  EXPECT_NEAR(ranks[2] / kSamples, 0.25, 0.002);

  double chi_buckets = 0.0;
  for (double c : buckets) {
    const double expected = static_cast<double>(kSamples) / kBuckets;
    chi_buckets += (c - expected) * (c - expected) / expected;
  }
  EXPECT_LT(chi_buckets, ChiSquareCritical(kBuckets - 1, 0.001));

  double chi_ranks = 0.0;
  for (uint32_t r = 1; r <= kMaxRank; ++r) {
    // Truncated geometric(1/2): the last rank absorbs the tail.
    const double p = r < kMaxRank ? std::ldexp(1.0, -static_cast<int>(r))
                                  : std::ldexp(1.0, -static_cast<int>(kMaxRank - 1));
    const double expected = p * kSamples;
    chi_ranks += (ranks[r] - expected) * (ranks[r] - expected) / expected;
  }
  EXPECT_LT(chi_ranks, ChiSquareCritical(kMaxRank - 1, 0.001));
}

}  // namespace
}  // namespace dpsketch
