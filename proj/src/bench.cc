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

#include "dpsketch/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dpsketch/audit.h"
#include "dpsketch/dp.h"
#include "parallel.h"

namespace dpsketch {
namespace {

using Clock = std::chrono::steady_clock;

// Keeps populated sketches observable so the timed loops are not elided.
volatile double g_sink = 0.0;

template <typename Populate>
double MedianNsPerUpdate(uint32_t repetitions, uint64_t updates, Populate populate) {
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (uint32_t r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    g_sink = g_sink + populate();
    const auto stop = Clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(stop - start).count() /
                      static_cast<double>(updates));
  }
  std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
  return samples[samples.size() / 2];
}

void Summarize(BenchResult& r) {
  r.trials = std::max(r.update_ns.size(), r.size_bits.size());
  if (!r.update_ns.empty()) {
    const StatReport s = StatReport::From(r.update_ns);
    r.mean_update_ns = s.mean;
    r.stddev_update_ns = std::sqrt(s.variance);
    r.unreliable = s.mean > 0.0 && r.stddev_update_ns / s.mean > 0.5;
  }
  if (!r.size_bits.empty()) {
    double sum = 0.0;
    for (uint64_t b : r.size_bits) sum += static_cast<double>(b);
    r.mean_size_bits = sum / static_cast<double>(r.size_bits.size());
  }
}

void ValidateKValues(std::span<const uint32_t> k_values) {
  if (k_values.empty()) throw std::invalid_argument("no k values given");
  for (uint32_t k : k_values) SketchConfig::Hll(k).Validate();
}

}  // namespace

std::vector<BenchResult> BenchUpdate(const BenchUpdateOptions& options) {
  ValidateKValues(options.k_values);
  if (options.updates == 0 || options.trials == 0 || options.repetitions == 0) {
    throw std::invalid_argument("updates, trials and repetitions must be positive");
  }
  const std::vector<std::string> items = MakeUniverse(options.updates);
  std::vector<BenchResult> results;
  for (uint32_t k : options.k_values) {
    const SketchConfig config = SketchConfig::Hll(k);
    BenchResult hll{.pipeline = "hll", .k = k};
    BenchResult phll{.pipeline = "phll", .k = k};
    BenchResult qll{.pipeline = "qll", .k = k};
    // Timed sections run one at a time so trials do not compete for cores.
    for (uint64_t t = 0; t < options.trials; ++t) {
      const Seed seed = options.seed.Derive(t);
      hll.update_ns.push_back(MedianNsPerUpdate(options.repetitions, options.updates, [&] {
        Sketch sketch(config, seed);
        for (const std::string& item : items) sketch.Add(item);
        return sketch.SamplingProbability();
      }));
      phll.update_ns.push_back(MedianNsPerUpdate(options.repetitions, options.updates, [&] {
        DownsampledSketch sketch = DownsampledSketch::LargeSet(options.epsilon, config, seed);
        for (const std::string& item : items) sketch.Add(item);
        return sketch.sketch().SamplingProbability();
      }));
      qll.update_ns.push_back(MedianNsPerUpdate(options.repetitions, options.updates, [&] {
        QllStub sketch(k, seed);
        for (const std::string& item : items) sketch.Update(item);
        return static_cast<double>(sketch.MaxRegister());
      }));
    }
    for (BenchResult* r : {&hll, &phll, &qll}) {
      Summarize(*r);
      results.push_back(std::move(*r));
    }
  }
  return results;
}

BenchSpaceResult BenchSpace(const BenchSpaceOptions& options) {
  ValidateKValues(options.k_values);
  if (options.trials == 0) throw std::invalid_argument("trials must be positive");
  const double pi0 = Pi0(options.epsilon);
  const std::vector<std::string> items = MakeUniverse(options.n);
  const size_t nk = options.k_values.size();

  // [trial][k index] -> max register, per pipeline.
  std::vector<std::vector<uint32_t>> hll_max(options.trials, std::vector<uint32_t>(nk));
  std::vector<std::vector<uint32_t>> phll_max = hll_max;
  std::vector<std::vector<uint32_t>> qll_max = hll_max;

  internal::ForEachChunk(
      options.trials, internal::WorkerCount(options.threads, options.trials),
      [&](uint64_t begin, uint64_t end, unsigned) {
        for (uint64_t t = begin; t < end; ++t) {
          const Seed seed = options.seed.Derive(t);
          const Hasher hasher(seed);
          std::vector<HashValue> sketch_hashes;
          std::vector<bool> gated;
          sketch_hashes.reserve(items.size());
          gated.reserve(items.size());
          for (const std::string& item : items) {
            sketch_hashes.push_back(hasher.Hash(item, HashRole::kSketchHash));
            gated.push_back(
                PassesDownsample(hasher.Hash(item, HashRole::kDownsampleHash), pi0));
          }
          for (size_t i = 0; i < nk; ++i) {
            const uint32_t k = options.k_values[i];
            HllState hll(k, kDefaultHllRegisterWidth);
            HllState phll(k, kDefaultHllRegisterWidth);
            for (size_t j = 0; j < sketch_hashes.size(); ++j) {
              hll.Update(sketch_hashes[j]);
              if (gated[j]) phll.Update(sketch_hashes[j]);
            }
            hll_max[t][i] = hll.MaxRegister();
            phll_max[t][i] = phll.MaxRegister();
            QllStub qll(k, seed);
            qll.SimulateStream(options.n);
            qll_max[t][i] = qll.MaxRegister();
          }
        }
      });

  BenchSpaceResult out;
  for (size_t i = 0; i < nk; ++i) {
    const uint32_t k = options.k_values[i];
    BenchResult hll{.pipeline = "hll", .k = k};
    BenchResult phll{.pipeline = "phll", .k = k};
    BenchResult qll{.pipeline = "qll", .k = k};
    for (uint64_t t = 0; t < options.trials; ++t) {
      hll.max_register.push_back(hll_max[t][i]);
      phll.max_register.push_back(phll_max[t][i]);
      qll.max_register.push_back(qll_max[t][i]);
      hll.size_bits.push_back(RegisterSketchSizeBits(k, hll_max[t][i]));
      phll.size_bits.push_back(RegisterSketchSizeBits(k, phll_max[t][i]));
      qll.size_bits.push_back(RegisterSketchSizeBits(k, qll_max[t][i]));
    }
    for (BenchResult* r : {&hll, &phll, &qll}) Summarize(*r);
    out.ratios.push_back({k, qll.mean_size_bits / phll.mean_size_bits});
    out.results.push_back(std::move(hll));
    out.results.push_back(std::move(phll));
    out.results.push_back(std::move(qll));
  }
  return out;
}

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope needs at least two paired points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void WriteUpdateCsv(std::span<const BenchResult> results, std::ostream& out) {
  out << "pipeline,k,metric,value,trial\n";
  for (const BenchResult& r : results) {
    for (size_t t = 0; t < r.update_ns.size(); ++t) {
      out << r.pipeline << ',' << r.k << ",update_ns," << r.update_ns[t] << ',' << t << '\n';
    }
  }
}

void WriteSpaceCsv(const BenchSpaceResult& result, std::ostream& out) {
  out << "pipeline,k,metric,value,trial\n";
  for (const BenchResult& r : result.results) {
    for (size_t t = 0; t < r.size_bits.size(); ++t) {
      out << r.pipeline << ',' << r.k << ",size_bits," << r.size_bits[t] << ',' << t << '\n';
      out << r.pipeline << ',' << r.k << ",max_register," << r.max_register[t] << ',' << t
          << '\n';
    }
  }
  for (const SpaceRatio& ratio : result.ratios) {
    out << "qll/phll," << ratio.k << ",size_ratio," << ratio.qll_to_phll << ",mean\n";
  }
}

}  // namespace dpsketch
