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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "parallel.h"

namespace dpsketch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void AppendLe(std::string& out, uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>(value >> (8 * i)));
}

void AppendValues(std::string& out, const std::vector<uint64_t>& values, bool quantize) {
  AppendLe(out, values.size(), 4);
  for (uint64_t v : values) {
    if (quantize) {
      out.push_back(static_cast<char>(v >> 56));
    } else {
      AppendLe(out, v, 8);
    }
  }
}

// The sketch a pipeline releases for `items`.
Sketch ReleasedSketch(Pipeline pipeline, std::span<const std::string> items,
                      double epsilon, const SketchConfig& config, const Seed& seed) {
  switch (pipeline) {
    case Pipeline::kRaw:
    case Pipeline::kBase:
      return BuildSketch(items, config, seed);
    case Pipeline::kLargeSet:
      return RunLargeSet(items, epsilon, config, seed).sketch;
    case Pipeline::kAnySet:
      return RunAnySet(items, epsilon, config, seed).sketch;
    case Pipeline::kMakeDp:
      return MakeDp(BuildSketch(items, config, seed), epsilon).sketch;
  }
  throw std::invalid_argument("unknown pipeline");
}

double PipelineEstimate(Pipeline pipeline, std::span<const std::string> items,
                        double epsilon, const SketchConfig& config, const Seed& seed) {
  const double pi0 = Pi0(epsilon);
  switch (pipeline) {
    case Pipeline::kRaw:
    case Pipeline::kBase:
      return BuildSketch(items, config, seed).Estimate();
    case Pipeline::kLargeSet:
      return EstimateFor(pipeline, RunLargeSet(items, epsilon, config, seed).sketch, pi0, 0).value;
    case Pipeline::kAnySet: {
      const DpRun run = RunAnySet(items, epsilon, config, seed);
      return EstimateFor(pipeline, run.sketch, pi0, run.v).value;
    }
    case Pipeline::kMakeDp: {
      const DpRun run = MakeDp(BuildSketch(items, config, seed), epsilon);
      return EstimateFor(pipeline, run.sketch, 1.0, run.v).value;
    }
  }
  throw std::invalid_argument("unknown pipeline");
}

bool QuantizedFamily(Family family) {
  return family == Family::kBottomK || family == Family::kAdaptiveSampling;
}

}  // namespace

std::vector<std::string> MakeUniverse(uint64_t n) {
  std::vector<std::string> items;
  items.reserve(n);
  for (uint64_t i = 1; i <= n; ++i) items.push_back(std::to_string(i));
  return items;
}

std::vector<size_t> RemovalSet(std::span<const std::string> items, const SketchConfig& config,
                               const Seed& seed) {
  Sketch full(config, seed);
  std::vector<HashValue> hashes;
  hashes.reserve(items.size());
  for (const std::string& item : items) {
    hashes.push_back(full.hasher().Hash(item, HashRole::kSketchHash));
    full.AddHash(hashes.back());
  }
  std::vector<size_t> removal;
  for (size_t i = 0; i < hashes.size(); ++i) {
    Sketch without(config, seed);
    for (size_t j = 0; j < hashes.size(); ++j) {
      if (j != i) without.AddHash(hashes[j]);
    }
    if (!(without == full)) removal.push_back(i);
  }
  return removal;
}

std::string StateKey(const Sketch& sketch, bool quantize) {
  std::string key;
  key.push_back(static_cast<char>(sketch.config().family));
  std::visit(
      [&](const auto& s) {
        using State = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<State, HllState>) {
          key.append(s.registers().begin(), s.registers().end());
        } else if constexpr (std::is_same_v<State, BottomKState>) {
          AppendValues(key, s.values(), quantize);
        } else if constexpr (std::is_same_v<State, Fm85State>) {
          for (uint64_t b : s.bitmaps()) AppendLe(key, b, 8);
        } else if constexpr (std::is_same_v<State, LpcaState>) {
          for (uint64_t w : s.words()) AppendLe(key, w, 8);
        } else {
          key.push_back(static_cast<char>(s.depth()));
          AppendValues(key, s.values(), quantize);
        }
      },
      sketch.state());
  return key;
}

Interval WilsonInterval(uint64_t successes, uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kConsistentWithDp:
      return "ConsistentWithDp";
    case Verdict::kViolationDetected:
      return "ViolationDetected";
    case Verdict::kInconclusive:
      return "Inconclusive";
  }
  return "unknown";
}

AuditReport AuditDp(const AuditOptions& options) {
  if (options.n == 0) throw std::invalid_argument("audit needs n >= 1");
  if (options.trials == 0) throw std::invalid_argument("audit needs trials >= 1");
  options.config.Validate();
  const std::vector<std::string> universe = MakeUniverse(options.n);
  const std::span<const std::string> full(universe);
  const std::span<const std::string> other =
      options.self_compare ? full : full.subspan(1);
  const bool quantize = QuantizedFamily(options.config.family);

  using Counts = std::unordered_map<std::string, std::pair<uint64_t, uint64_t>>;
  const unsigned workers = internal::WorkerCount(options.threads, options.trials);
  std::vector<Counts> partial(workers);
  internal::ForEachChunk(options.trials, workers, [&](uint64_t begin, uint64_t end,
                                                      unsigned w) {
    Counts& counts = partial[w];
    for (uint64_t t = begin; t < end; ++t) {
      const Sketch a = ReleasedSketch(options.pipeline, full, options.epsilon,
                                      options.config, options.seed.Derive(2 * t));
      const Sketch b = ReleasedSketch(options.pipeline, other, options.epsilon,
                                      options.config, options.seed.Derive(2 * t + 1));
      ++counts[StateKey(a, quantize)].first;
      ++counts[StateKey(b, quantize)].second;
    }
  });
  Counts counts = std::move(partial[0]);
  for (unsigned w = 1; w < workers; ++w) {
    for (auto& [key, c] : partial[w]) {
      auto& total = counts[key];
      total.first += c.first;
      total.second += c.second;
    }
  }

  AuditReport report;
  report.epsilon_target = options.epsilon;
  report.trials = options.trials;
  report.states_observed = counts.size();
  const double upper = std::exp(options.epsilon);
  const double lower = std::exp(-options.epsilon);
  double sparse = 0.0;
  bool have_extreme = false;
  report.max_log_ratio = -kInf;
  report.min_log_ratio = kInf;

  // Sorted keys keep the violation list deterministic.
  std::vector<const Counts::value_type*> entries;
  entries.reserve(counts.size());
  for (const auto& entry : counts) entries.push_back(&entry);
  std::sort(entries.begin(), entries.end(),
            [](const auto* x, const auto* y) { return x->first < y->first; });

  for (const auto* entry : entries) {
    const auto [ca, cb] = entry->second;
    if (std::max(ca, cb) < options.min_count) {
      sparse += static_cast<double>(ca + cb);
      continue;
    }
    ++report.states_compared;
    const Interval wa = WilsonInterval(ca, options.trials, kZ99);
    const Interval wb = WilsonInterval(cb, options.trials, kZ99);
    StateRatio sr;
    sr.key = entry->first;
    sr.count_full = ca;
    sr.count_removed = cb;
    sr.ratio = cb == 0 ? kInf : static_cast<double>(ca) / static_cast<double>(cb);
    sr.ci = {wb.hi > 0.0 ? wa.lo / wb.hi : 0.0, wb.lo > 0.0 ? wa.hi / wb.lo : kInf};
    if (sr.ci.lo > upper || sr.ci.hi < lower) report.violations.push_back(sr);
    if (ca > 0 && cb > 0) {
      const double log_ratio = std::log(sr.ratio);
      const Interval log_ci{std::log(sr.ci.lo), std::log(sr.ci.hi)};
      if (log_ratio > report.max_log_ratio) {
        report.max_log_ratio = log_ratio;
        report.max_log_ratio_ci = log_ci;
      }
      if (log_ratio < report.min_log_ratio) {
        report.min_log_ratio = log_ratio;
        report.min_log_ratio_ci = log_ci;
      }
      have_extreme = true;
    }
  }
  if (!have_extreme) {
    report.max_log_ratio = 0.0;
    report.min_log_ratio = 0.0;
  }
  report.sparse_mass = sparse / (2.0 * static_cast<double>(options.trials));

  if (!report.violations.empty()) {
    report.verdict = Verdict::kViolationDetected;
  } else if (report.states_compared == 0 || report.sparse_mass > options.max_sparse_mass) {
    report.verdict = Verdict::kInconclusive;
  } else {
    report.verdict = Verdict::kConsistentWithDp;
  }
  return report;
}

ProportionReport EmpiricalDelta(const SketchConfig& config, double epsilon, uint64_t n,
                                uint64_t trials, const Seed& seed, unsigned threads) {
  const double pi0 = Pi0(epsilon);
  config.Validate();
  const std::vector<std::string> universe = MakeUniverse(n);
  const unsigned workers = internal::WorkerCount(threads, trials);
  std::vector<uint64_t> hits(workers, 0);
  internal::ForEachChunk(trials, workers, [&](uint64_t begin, uint64_t end, unsigned w) {
    for (uint64_t t = begin; t < end; ++t) {
      if (BuildSketch(universe, config, seed.Derive(t)).SamplingProbability() >= pi0) {
        ++hits[w];
      }
    }
  });
  ProportionReport report;
  report.trials = trials;
  for (uint64_t h : hits) report.successes += h;
  report.estimate =
      trials == 0 ? 0.0 : static_cast<double>(report.successes) / static_cast<double>(trials);
  report.ci = WilsonInterval(report.successes, trials, kZ99);
  return report;
}

StatReport StatReport::From(std::span<const double> samples) {
  StatReport r;
  r.trials = samples.size();
  if (samples.empty()) return r;
  double sum = 0.0;
  for (double x : samples) sum += x;
  r.mean = sum / static_cast<double>(samples.size());
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : samples) {
    const double d = (x - r.mean) * (x - r.mean);
    m2 += d;
    m4 += d * d;
  }
  const auto n = static_cast<double>(samples.size());
  r.variance = samples.size() > 1 ? m2 / (n - 1.0) : 0.0;
  r.standard_error = std::sqrt(r.variance / n);
  r.kurtosis = m2 > 0.0 ? (m4 / n) / ((m2 / n) * (m2 / n)) : 0.0;
  return r;
}

std::vector<double> PipelineEstimates(Pipeline pipeline, const SketchConfig& config,
                                      double epsilon, uint64_t n, uint64_t trials,
                                      const Seed& seed, unsigned threads) {
  config.Validate();
  if (pipeline != Pipeline::kRaw) Pi0(epsilon);
  const std::vector<std::string> universe = MakeUniverse(n);
  std::vector<double> estimates(trials);
  internal::ForEachChunk(trials, internal::WorkerCount(threads, trials),
                         [&](uint64_t begin, uint64_t end, unsigned) {
                           for (uint64_t t = begin; t < end; ++t) {
                             estimates[t] = PipelineEstimate(pipeline, universe, epsilon,
                                                             config, seed.Derive(t));
                           }
                         });
  return estimates;
}

UnbiasednessReport UnbiasednessCheck(Pipeline pipeline, const SketchConfig& config,
                                     double epsilon, uint64_t n, uint64_t trials,
                                     const Seed& seed, unsigned threads) {
  const std::vector<double> estimates =
      PipelineEstimates(pipeline, config, epsilon, n, trials, seed, threads);
  UnbiasednessReport report;
  report.stats = StatReport::From(estimates);
  report.target = static_cast<double>(n);
  report.pass = std::abs(report.stats.mean - report.target) <= 3.0 * report.stats.standard_error;
  return report;
}

VarianceRatioReport VarianceRatioCheck(const SketchConfig& config, double epsilon, uint64_t n,
                                       uint64_t trials, const Seed& seed, Pipeline pipeline,
                                       unsigned threads) {
  const std::vector<double> dp =
      PipelineEstimates(pipeline, config, epsilon, n, trials, seed, threads);
  const std::vector<double> base =
      PipelineEstimates(Pipeline::kRaw, config, epsilon, n, trials, seed, threads);
  VarianceRatioReport report;
  report.dp = StatReport::From(dp);
  report.base = StatReport::From(base);
  report.ratio = report.base.variance > 0.0 ? report.dp.variance / report.base.variance
                                            : (report.dp.variance > 0.0 ? kInf : 1.0);
  const auto t = static_cast<double>(trials);
  report.log_standard_error = std::sqrt(std::max(0.0, report.dp.kurtosis - 1.0) / t +
                                        std::max(0.0, report.base.kurtosis - 1.0) / t);
  return report;
}

}  // namespace dpsketch
