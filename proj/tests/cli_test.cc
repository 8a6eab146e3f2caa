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


#include "cli.h"

#include <gtest/gtest.h>

#include <cmath>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "dpsketch/hashing.h"
#include "dpsketch/sketch_file.h"

namespace dpsketch::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const std::string kSeedA(64, 'a');
const std::string kSeedB = std::string(63, 'a') + "b";

struct Result {
  int code = 0;
  std::string out;
  std::string err;

  json Json() const { return json::parse(out); }
};

Result Invoke(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = RunCli(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Lines(uint64_t begin, uint64_t end) {
  std::string text;
  for (uint64_t i = begin; i < end; ++i) text += "line-" + std::to_string(i) + "\n";
  return text;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dpsketch_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  // Builds from `input` on standard input; fails the test on a nonzero exit.
  json Build(const std::vector<std::string>& flags, const std::string& input,
             const std::string& out_name) {
    std::vector<std::string> args = {"build"};
    args.insert(args.end(), flags.begin(), flags.end());
    if (!out_name.empty()) {
      args.push_back("--out");
      args.push_back(Path(out_name));
    }
    const Result r = Invoke(args, input);
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return r.Json();
  }

  fs::path dir_;
};

TEST_F(CliTest, EmptyRawBuildEstimatesZero) {
  const json j = Build({"--family", "hll", "--k", "64", "--seed-hex", kSeedA}, "", "e.dpsk");
  EXPECT_EQ(j["estimate"], 0.0);
  EXPECT_EQ(j["pipeline"], "raw");
  EXPECT_TRUE(j["epsilon"].is_null());
  EXPECT_TRUE(j["pi0"].is_null());
  EXPECT_EQ(j["v"], 0);
  EXPECT_EQ(j["seed_hex"], kSeedA);
  EXPECT_TRUE(fs::exists(Path("e.dpsk")));
}

TEST_F(CliTest, IdenticalRunsGiveIdenticalFiles) {
  const std::vector<std::string> flags = {"--family",   "bottomk", "--k",        "32",
                                          "--pipeline", "any-set", "--epsilon",  "0.5",
                                          "--seed-hex", kSeedA};
  const json a = Build(flags, Lines(0, 500), "a.dpsk");
  const json b = Build(flags, Lines(0, 500), "b.dpsk");
  EXPECT_EQ(a, b);
  EXPECT_EQ(ReadFile(Path("a.dpsk")), ReadFile(Path("b.dpsk")));
  std::vector<std::string> other = flags;
  other.back() = kSeedB;
  Build(other, Lines(0, 500), "c.dpsk");
  EXPECT_NE(ReadFile(Path("a.dpsk")), ReadFile(Path("c.dpsk")));
}

TEST_F(CliTest, LinesAreExactByteStrings) {
  // "a" and "a\r" differ; an empty line is an item; the last line needs no
  // terminator. Bottom-k below k counts exactly.
  const json j = Build({"--family", "bottomk", "--k", "64", "--seed-hex", kSeedA},
                       "a\na\r\n\nb\na\nc", "");
  EXPECT_EQ(j["estimate"], 5.0);
  std::istringstream in("x\ny\n");
  EXPECT_EQ(SplitLines(in), (std::vector<std::string>{"x", "y"}));
}

TEST_F(CliTest, InputFileFlag) {
  {
    std::ofstream f(Path("items.txt"));
    f << "p\nq\nr\n";
  }
  const Result r = Invoke({"build", "--family", "bottomk", "--k", "8", "--input", Path("items.txt"),
                        "--seed-hex", kSeedA});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.Json()["estimate"], 3.0);
  EXPECT_EQ(Invoke({"build", "--family", "bottomk", "--k", "8", "--input", Path("missing.txt")})
                .code,
            kExitUnreadable);
}

// A single run is checked against 3 relative standard errors; the mean of 20
// seeded runs must land within 10%.
TEST_F(CliTest, LargeSetAccuracy) {
  const std::string corpus = Lines(0, 10000);
  const double rse = 1.0 / std::sqrt(64.0 - 2.0);
  double sum = 0.0;
  const int runs = 20;
  for (int i = 0; i < runs; ++i) {
    const json j = Build({"--family", "bottomk", "--k", "64", "--pipeline", "large-set",
                          "--epsilon", "0.6931471805599453", "--seed-hex",
                          Seed::FromU64(i).ToHex()},
                         corpus, "");
    const double estimate = j["estimate"];
    EXPECT_NEAR(estimate, 10000.0, 3 * rse * 10000.0);
    EXPECT_EQ(j["p"], 0.5);
    EXPECT_EQ(j["cardinality_warning"], false);
    sum += estimate;
  }
  EXPECT_NEAR(sum / runs, 10000.0, 1000.0);
}

TEST_F(CliTest, BaseBuildReportsPrivacyStatus) {
  const json j = Build({"--family", "bottomk", "--k", "2", "--pipeline", "base", "--epsilon",
                        "0.6931471805599453", "--seed-hex", kSeedA},
                       Lines(0, 10) + Lines(0, 10), "");
  EXPECT_EQ(j["privacy"]["distinct_items"], 10);
  EXPECT_EQ(j["privacy"]["delta"], 0.0546875);
  EXPECT_EQ(j["privacy"]["delta_method"], "BottomKExact");
  EXPECT_EQ(j["n0"], 4);
}

TEST_F(CliTest, SmallLargeSetWarns) {
  const json j = Build({"--family", "bottomk", "--k", "16", "--pipeline", "large-set",
                        "--epsilon", "1", "--seed-hex", kSeedA},
                       Lines(0, 3), "");
  EXPECT_EQ(j["cardinality_warning"], true);
}

TEST_F(CliTest, SaturatedLpcaReportsNull) {
  const json j = Build({"--family", "lpca", "--k", "4", "--p", "1", "--seed-hex", kSeedA},
                       Lines(0, 500), "full.dpsk");
  EXPECT_TRUE(j["estimate"].is_null());
  EXPECT_TRUE(j.contains("note"));
  const Result r = Invoke({"estimate", Path("full.dpsk")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.Json()["estimate"].is_null());
}

TEST_F(CliTest, NegativeEstimatesAreReportedWithANote) {
  bool saw_negative = false;
  for (uint64_t s = 0; s < 40 && !saw_negative; ++s) {
    const json j = Build({"--family", "bottomk", "--k", "16", "--pipeline", "any-set",
                          "--epsilon", "0.6931471805599453", "--seed-hex",
                          Seed::FromU64(s).ToHex()},
                         "", "");
    EXPECT_EQ(j["v"], 32);
    const double e = j["estimate"];
    EXPECT_EQ(j.contains("note"), e < 0.0);
    saw_negative = e < 0.0;
  }
  EXPECT_TRUE(saw_negative);
}

TEST_F(CliTest, EstimateMatchesBuild) {
  const json built = Build({"--family", "fm85", "--k", "8", "--ell", "16", "--seed-hex", kSeedA},
                           Lines(0, 300), "f.dpsk");
  const Result r = Invoke({"estimate", Path("f.dpsk")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.Json(), built);
}

TEST_F(CliTest, MergeWithEmptyIsIdentity) {
  const std::vector<std::string> flags = {"--family", "hll", "--k", "32", "--seed-hex", kSeedA};
  Build(flags, Lines(0, 400), "full.dpsk");
  Build(flags, "", "empty.dpsk");
  const Result r =
      Invoke({"merge", Path("full.dpsk"), Path("empty.dpsk"), "--out", Path("merged.dpsk")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(ReadFile(Path("merged.dpsk")), ReadFile(Path("full.dpsk")));
}

TEST_F(CliTest, MergeIsCommutativeAndMatchesSingleBuild) {
  const std::vector<std::string> flags = {"--family",   "adaptive",  "--k",       "32",
                                          "--pipeline", "large-set", "--epsilon", "1",
                                          "--seed-hex", kSeedA};
  Build(flags, Lines(0, 5000), "a.dpsk");
  Build(flags, Lines(5000, 10000), "b.dpsk");
  const json whole = Build(flags, Lines(0, 10000), "whole.dpsk");
  ASSERT_EQ(Invoke({"merge", Path("a.dpsk"), Path("b.dpsk"), "--out", Path("ab.dpsk")}).code,
            kExitOk);
  const Result ba = Invoke({"merge", Path("b.dpsk"), Path("a.dpsk"), "--out", Path("ba.dpsk")});
  ASSERT_EQ(ba.code, kExitOk);
  EXPECT_EQ(ReadFile(Path("ab.dpsk")), ReadFile(Path("ba.dpsk")));
  EXPECT_EQ(ReadFile(Path("ab.dpsk")), ReadFile(Path("whole.dpsk")));
  json merged = ba.Json();
  merged.erase("cardinality_warning");
  json expected = whole;
  expected.erase("cardinality_warning");
  EXPECT_EQ(merged, expected);
}

TEST_F(CliTest, IncompatibleMergeNamesTheField) {
  Build({"--family", "hll", "--k", "32", "--seed-hex", kSeedA}, Lines(0, 10), "a.dpsk");
  Build({"--family", "hll", "--k", "64", "--seed-hex", kSeedA}, Lines(0, 10), "k.dpsk");
  Build({"--family", "hll", "--k", "32", "--seed-hex", kSeedB}, Lines(0, 10), "s.dpsk");
  Build({"--family", "hll", "--k", "32", "--pipeline", "base", "--epsilon", "1", "--seed-hex",
         kSeedA},
        Lines(0, 10), "p.dpsk");
  const Result k = Invoke({"merge", Path("a.dpsk"), Path("k.dpsk")});
  EXPECT_EQ(k.code, kExitIncompatible);
  EXPECT_NE(k.err.find("'k'"), std::string::npos) << k.err;
  const Result s = Invoke({"merge", Path("a.dpsk"), Path("s.dpsk")});
  EXPECT_EQ(s.code, kExitIncompatible);
  EXPECT_NE(s.err.find("'seed'"), std::string::npos) << s.err;
  const Result p = Invoke({"merge", Path("a.dpsk"), Path("p.dpsk")});
  EXPECT_EQ(p.code, kExitIncompatible);
  EXPECT_NE(p.err.find("'pipeline'"), std::string::npos) << p.err;
  EXPECT_EQ(Invoke({"merge", Path("a.dpsk")}).code, kExitUsage);
}

TEST_F(CliTest, UnreadableInputs) {
  EXPECT_EQ(Invoke({"estimate", Path("nope.dpsk")}).code, kExitUnreadable);
  {
    std::ofstream f(Path("junk.dpsk"));
    f << "definitely not a sketch";
  }
  const Result r = Invoke({"estimate", Path("junk.dpsk")});
  EXPECT_EQ(r.code, kExitUnreadable);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(Invoke({"makedp", Path("junk.dpsk"), "--epsilon", "1"}).code, kExitUnreadable);
}

TEST_F(CliTest, MakeDpPostconditions) {
  Build({"--family", "bottomk", "--k", "16", "--seed-hex", kSeedA}, Lines(0, 1000), "raw.dpsk");
  const Result r = Invoke({"makedp", Path("raw.dpsk"), "--epsilon", "0.6931471805599453", "--out",
                        Path("dp.dpsk")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = r.Json();
  EXPECT_EQ(j["pipeline"], "makedp");
  EXPECT_GE(j["v"].get<uint64_t>(), j["n0"].get<uint64_t>());
  EXPECT_LE(j["sampling_probability"].get<double>(), j["pi0"].get<double>());
  EXPECT_EQ(j["estimate"].get<double>(),
            j["base_estimate"].get<double>() - j["v"].get<double>());
  const SketchFile file = Deserialize(ReadFile(Path("dp.dpsk")));
  EXPECT_EQ(file.pipeline, Pipeline::kMakeDp);
  EXPECT_EQ(file.v, j["v"].get<uint64_t>());

  const Result again = Invoke({"makedp", Path("dp.dpsk"), "--epsilon", "1"});
  EXPECT_EQ(again.code, kExitAlreadyPrivate);
  Build({"--family", "bottomk", "--k", "16", "--pipeline", "large-set", "--epsilon", "1",
         "--seed-hex", kSeedA},
        Lines(0, 100), "ls.dpsk");
  EXPECT_EQ(Invoke({"makedp", Path("ls.dpsk"), "--epsilon", "1"}).code, kExitAlreadyPrivate);
  EXPECT_EQ(Invoke({"makedp", Path("raw.dpsk"), "--epsilon", "0"}).code, kExitUsage);
}

TEST_F(CliTest, MakeDpOfEmptyIsCenteredOnZero) {
  std::vector<double> estimates;
  for (uint64_t s = 0; s < 60; ++s) {
    Build({"--family", "bottomk", "--k", "16", "--seed-hex", Seed::FromU64(s).ToHex()}, "",
          "empty.dpsk");
    const Result r = Invoke({"makedp", Path("empty.dpsk"), "--epsilon", "0.6931471805599453"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    estimates.push_back(r.Json()["estimate"]);
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= estimates.size();
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  const double se = std::sqrt(ss / (estimates.size() - 1) / estimates.size());
  EXPECT_NEAR(mean, 0.0, 4 * se);
}

TEST_F(CliTest, BoundsCommand) {
  const Result hll =
      Invoke({"bounds", "--family", "hll", "--k", "16", "--epsilon", "0.6931471805599453", "--n",
           "1024"});
  ASSERT_EQ(hll.code, kExitOk) << hll.err;
  EXPECT_NEAR(hll.Json()["delta"].get<double>(), 2.02e-13, 0.01e-13);
  EXPECT_EQ(hll.Json()["valid"], true);
  EXPECT_EQ(hll.Json()["method"], "HllUnion");

  const Result bk = Invoke({"bounds", "--family", "bottomk", "--k", "2", "--epsilon",
                         "0.6931471805599453", "--n", "10"});
  EXPECT_EQ(bk.Json()["delta"], 0.0546875);

  const Result low =
      Invoke({"bounds", "--family", "hll", "--k", "16", "--epsilon", "0.6931471805599453", "--n",
           "10"});
  EXPECT_EQ(low.Json()["valid"], false);
  EXPECT_EQ(low.Json()["delta"], 1.0);

  const Result fm = Invoke({"bounds", "--family", "fm85", "--k", "8", "--ell", "16", "--epsilon",
                         "0.6931471805599453", "--n", "512"});
  EXPECT_EQ(fm.code, kExitOk) << fm.err;
  EXPECT_EQ(fm.Json()["ell"], 16);
  const Result lp = Invoke({"bounds", "--family", "lpca", "--k", "64", "--p", "1", "--epsilon",
                         "0.6931471805599453", "--n", "256"});
  EXPECT_EQ(lp.code, kExitOk) << lp.err;
  EXPECT_EQ(lp.Json()["method"], "LpcaGeometric");

  EXPECT_EQ(Invoke({"bounds", "--family", "fm85", "--k", "8", "--epsilon", "1", "--n", "9"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"bounds", "--family", "lpca", "--k", "8", "--epsilon", "1", "--n", "9"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"bounds", "--family", "hll", "--k", "16", "--n", "9"}).code, kExitUsage);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "nope", "--k", "4"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "3"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "16", "--epsilon", "1"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "16", "--pipeline", "large-set"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "16", "--pipeline", "makedp", "--epsilon",
                 "1"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "16", "--seed-hex", "xyz"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "16", "--ell", "8"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "lpca", "--k", "16", "--p", "0.5", "--pipeline",
                 "any-set", "--epsilon", "1"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"build", "--family", "hll", "--k", "16", "--pipeline", "base", "--epsilon",
                 "-1"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"build", "--k", "16"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"audit", "--family", "lpca", "--k", "4", "--kind", "nope", "--trials", "10"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, AuditCommand) {
  const std::vector<std::string> args = {"audit",    "--family", "lpca",      "--k",
                                         "4",        "--p",      "1",         "--pipeline",
                                         "large-set", "--n",     "16",        "--trials",
                                         "20000",    "--seed-hex", kSeedA};
  const Result r = Invoke(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = r.Json();
  EXPECT_EQ(j["verdict"], "ConsistentWithDp");
  EXPECT_EQ(j["violations"], 0);
  EXPECT_EQ(Invoke(args).out, r.out);

  const Result delta = Invoke({"audit", "--kind", "delta", "--family", "bottomk", "--k", "2",
                            "--n", "10", "--trials", "2000", "--seed-hex", kSeedA});
  ASSERT_EQ(delta.code, kExitOk) << delta.err;
  EXPECT_EQ(delta.Json()["closed_form_delta"], 0.0546875);
  EXPECT_LE(delta.Json()["ci"][0].get<double>(), 0.0546875 * 1.5);

  const Result unbiased = Invoke({"audit", "--kind", "unbiasedness", "--family", "bottomk", "--k",
                               "16", "--pipeline", "any-set", "--n", "50", "--trials", "300",
                               "--seed-hex", kSeedA});
  ASSERT_EQ(unbiased.code, kExitOk) << unbiased.err;
  EXPECT_TRUE(unbiased.Json().contains("pass"));

  const Result ratio = Invoke({"audit", "--kind", "variance-ratio", "--family", "bottomk", "--k",
                            "16", "--n", "100", "--trials", "200", "--seed-hex", kSeedA});
  ASSERT_EQ(ratio.code, kExitOk) << ratio.err;
  EXPECT_GT(ratio.Json()["ratio"].get<double>(), 0.0);
}

size_t CountLines(const std::string& text) {
  size_t lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

TEST_F(CliTest, BenchUpdateCsv) {
  const Result r = Invoke({"bench-update", "--k-values", "16,32", "--updates", "32", "--trials",
                        "2", "--repetitions", "1", "--seed-hex", kSeedA});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(CountLines(r.out), 1u + 3 * 2 * 2);
  EXPECT_EQ(r.out.rfind("pipeline,k,metric,value,trial\n", 0), 0u);
  EXPECT_EQ(Invoke({"bench-update", "--k-values", "16,abc"}).code, kExitUsage);
}

TEST_F(CliTest, BenchSpaceCsvIsDeterministic) {
  const std::vector<std::string> args = {"bench-space", "--k-values", "16,64", "--n", "2048",
                                         "--trials",    "2",          "--seed-hex", kSeedA,
                                         "--out",       Path("space.csv")};
  ASSERT_EQ(Invoke(args).code, kExitOk);
  const std::string first = ReadFile(Path("space.csv"));
  ASSERT_EQ(Invoke(args).code, kExitOk);
  EXPECT_EQ(ReadFile(Path("space.csv")), first);
  EXPECT_EQ(CountLines(first), 1u + 6 * 2 * 2 + 2);
}

}  // namespace
}  // namespace dpsketch::cli
