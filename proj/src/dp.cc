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

#include "dpsketch/dp.h"

#include <unordered_set>

namespace dpsketch {

PrivacyParams DerivePrivacyParams(double epsilon, const SketchConfig& config) {
  config.Validate();
  PrivacyParams params;
  params.epsilon = epsilon;
  params.pi0 = Pi0(epsilon);
  params.kmax = Kmax(config);
  params.n0 = MinimumCardinality(params.kmax, epsilon);
  return params;
}

std::string_view PipelineName(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::kRaw:
      return "raw";
    case Pipeline::kBase:
      return "base";
    case Pipeline::kLargeSet:
      return "large-set";
    case Pipeline::kAnySet:
      return "any-set";
    case Pipeline::kMakeDp:
      return "makedp";
  }
  return "unknown";
}

std::optional<Pipeline> ParsePipeline(std::string_view name) {
  for (Pipeline p : {Pipeline::kRaw, Pipeline::kBase, Pipeline::kLargeSet,
                     Pipeline::kAnySet, Pipeline::kMakeDp}) {
    if (name == PipelineName(p)) return p;
  }
  return std::nullopt;
}

DpEstimate DpEstimate::From(Pipeline algorithm, double base_estimate, double p,
                            uint64_t v) {
  return DpEstimate{.value = base_estimate / p - static_cast<double>(v),
                    .base_estimate = base_estimate,
                    .p = p,
                    .v = v,
                    .algorithm = algorithm};
}

SketchConfig DownsampledBaseConfig(const SketchConfig& config) {
  SketchConfig out = config;
  if (out.family == Family::kLpca) out.sampling_rate = 1.0;
  return out;
}

DownsampledSketch DownsampledSketch::LargeSet(double epsilon, const SketchConfig& config,
                                              const Seed& seed) {
  const SketchConfig base = DownsampledBaseConfig(config);
  return DownsampledSketch(Pipeline::kLargeSet, DerivePrivacyParams(epsilon, base),
                           Sketch(base, seed), 0);
}

DownsampledSketch DownsampledSketch::AnySet(double epsilon, const SketchConfig& config,
                                            const Seed& seed) {
  PhantomSketch init = DpInitSketch(epsilon, config, seed);
  return DownsampledSketch(Pipeline::kAnySet,
                           DerivePrivacyParams(epsilon, init.sketch.config()),
                           std::move(init.sketch), init.v);
}

DpEstimate DownsampledSketch::Estimate() const {
  return DpEstimate::From(pipeline_, sketch_.Estimate(), params_.pi0, phantoms_);
}

bool DownsampledSketch::CardinalityWarning() const {
  if (pipeline_ != Pipeline::kLargeSet) return false;
  // A saturated sketch has seen far more than n0 items.
  const auto estimate = TryEstimateFor(pipeline_, sketch_, params_.pi0, phantoms_);
  return estimate && estimate->value < static_cast<double>(params_.n0);
}

Sketch BuildSketch(std::span<const std::string> items, const SketchConfig& config,
                   const Seed& seed) {
  Sketch sketch(config, seed);
  for (const std::string& item : items) sketch.Add(item);
  return sketch;
}

BaseRun RunBase(std::span<const std::string> items, const SketchConfig& config,
                const Seed& seed, std::optional<double> epsilon) {
  Sketch sketch = BuildSketch(items, config, seed);
  const auto estimate =
      TryEstimateFor(epsilon ? Pipeline::kBase : Pipeline::kRaw, sketch, 1.0, 0);
  std::optional<PrivacyStatus> status;
  if (epsilon) {
    PrivacyStatus s;
    s.params = DerivePrivacyParams(*epsilon, config);
    s.sampling_probability = sketch.SamplingProbability();
    s.pure_dp_not_guaranteed = s.sampling_probability >= s.params.pi0;
    std::unordered_set<std::string_view> distinct(items.begin(), items.end());
    s.distinct_items = distinct.size();
    s.delta = DeltaFor(sketch.config(), *epsilon, s.distinct_items);
    status = s;
  }
  return BaseRun{std::move(sketch), estimate, status};
}

DpRun RunLargeSet(std::span<const std::string> items, double epsilon,
                  const SketchConfig& config, const Seed& seed) {
  DownsampledSketch builder = DownsampledSketch::LargeSet(epsilon, config, seed);
  for (const std::string& item : items) builder.Add(item);
  return DpRun{builder.sketch(),
               TryEstimateFor(Pipeline::kLargeSet, builder.sketch(), builder.params().pi0, 0),
               builder.params(), 0, builder.CardinalityWarning()};
}

PhantomSketch DpInitSketch(double epsilon, const SketchConfig& config, const Seed& seed) {
  const SketchConfig base = DownsampledBaseConfig(config);
  const PrivacyParams params = DerivePrivacyParams(epsilon, base);
  Sketch sketch(base, seed);
  const Hasher& hasher = sketch.hasher();
  for (uint64_t i = 0; i < params.n0; ++i) {
    if (PassesDownsample(hasher.HashPhantom(i, HashRole::kDownsampleHash), params.pi0)) {
      sketch.AddPhantom(i);
    }
  }
  return PhantomSketch{std::move(sketch), params.n0};
}

DpRun RunAnySet(std::span<const std::string> items, double epsilon,
                const SketchConfig& config, const Seed& seed) {
  DownsampledSketch builder = DownsampledSketch::AnySet(epsilon, config, seed);
  for (const std::string& item : items) builder.Add(item);
  return DpRun{builder.sketch(),
               TryEstimateFor(Pipeline::kAnySet, builder.sketch(), builder.params().pi0,
                              builder.phantoms()),
               builder.params(), builder.phantoms(), false};
}

PhantomSketch DpInitForMerge(double epsilon, const SketchConfig& config, const Seed& seed) {
  const PrivacyParams params = DerivePrivacyParams(epsilon, config);
  Sketch sketch(config, seed);
  uint64_t v = 0;
  // pi reaches 0 for every family once enough distinct items are added, so
  // the loop terminates with probability one.
  do {
    sketch.AddPhantom(v);
    ++v;
  } while (v < params.n0 || sketch.SamplingProbability() > params.pi0);
  return PhantomSketch{std::move(sketch), v};
}

DpRun MakeDp(const Sketch& existing, double epsilon) {
  PhantomSketch noise = DpInitForMerge(epsilon, existing.config(), existing.seed());
  Sketch merged = existing;
  merged.Merge(noise.sketch);
  const auto estimate = TryEstimateFor(Pipeline::kMakeDp, merged, 1.0, noise.v);
  return DpRun{std::move(merged), estimate, DerivePrivacyParams(epsilon, existing.config()),
               noise.v, false};
}

DpEstimate EstimateFor(Pipeline pipeline, const Sketch& sketch, double pi0, uint64_t v) {
  switch (pipeline) {
    case Pipeline::kRaw:
    case Pipeline::kBase:
      return DpEstimate::From(pipeline, sketch.Estimate(), 1.0, 0);
    case Pipeline::kLargeSet:
      return DpEstimate::From(pipeline, sketch.Estimate(), pi0, 0);
    case Pipeline::kAnySet:
      return DpEstimate::From(pipeline, sketch.Estimate(), pi0, v);
    case Pipeline::kMakeDp:
      return DpEstimate::From(pipeline, sketch.Estimate(), 1.0, v);
  }
  throw std::invalid_argument("unknown pipeline");
}

std::optional<DpEstimate> TryEstimateFor(Pipeline pipeline, const Sketch& sketch, double pi0,
                                         uint64_t v) {
  try {
    return EstimateFor(pipeline, sketch, pi0, v);
  } catch (const EstimatorOverflow&) {
    return std::nullopt;
  }
}

}  // namespace dpsketch
