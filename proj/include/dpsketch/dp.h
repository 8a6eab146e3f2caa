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
// Differentially private wrappers around any Sketch.
//
// A sketch is epsilon-DP once (a) no reachable state has sampling probability
// at or above pi0 = 1 - exp(-epsilon) and (b) it summarizes more than
// n0 = kmax / pi0 distinct items. The wrappers enforce (a) by downsampling
// items through an independent hash gate, and (b) either by assumption
// (LargeSet), by inserting n0 phantom items up front (AnySet), or by merging
// with a phantom-only sketch driven below pi0 (MakeDp). Phantom items come
// from a universe disjoint from real items and are subtracted from the
// estimate, which keeps every estimator unbiased.
// -----------------------------------------------------------------------------

#ifndef DPSKETCH_DP_H_
#define DPSKETCH_DP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "dpsketch/bounds.h"
#include "dpsketch/sketch.h"

namespace dpsketch {

struct PrivacyParams {
  double epsilon = 0.0;
  double pi0 = 0.0;
  uint64_t kmax = 0;
  uint64_t n0 = 0;
};

// Throws std::invalid_argument unless epsilon > 0.
PrivacyParams DerivePrivacyParams(double epsilon, const SketchConfig& config);

enum class Pipeline : uint8_t {
  kRaw = 0,       // plain sketch, no privacy claim
  kBase = 1,      // unmodified sketch with an (epsilon, delta) report
  kLargeSet = 2,  // downsampled; epsilon-DP when n >= n0
  kAnySet = 3,    // downsampled plus n0 phantoms; epsilon-DP for any n
  kMakeDp = 4,    // existing sketch merged with a phantom-only sketch
};

std::string_view PipelineName(Pipeline pipeline);
std::optional<Pipeline> ParsePipeline(std::string_view name);

// value = base_estimate / p - v.
struct DpEstimate {
  double value = 0.0;
  double base_estimate = 0.0;
  double p = 1.0;
  uint64_t v = 0;
  Pipeline algorithm = Pipeline::kRaw;

  static DpEstimate From(Pipeline algorithm, double base_estimate, double p, uint64_t v);
};

// True iff the item's downsampling hash, read as a unit-interval value,
// is below pi0.
inline bool PassesDownsample(HashValue downsample_hash, double pi0) {
  return ToUnitInterval(downsample_hash) < pi0;
}

// LPCA's internal rate is forced to 1 under the downsampling pipelines so the
// only sampling layer is the pi0 gate.
SketchConfig DownsampledBaseConfig(const SketchConfig& config);

// Incremental form of the downsampling pipelines.
class DownsampledSketch {
 public:
  static DownsampledSketch LargeSet(double epsilon, const SketchConfig& config,
                                    const Seed& seed);
  static DownsampledSketch AnySet(double epsilon, const SketchConfig& config,
                                  const Seed& seed);

  // Returns true if the item passed the gate.
  bool Add(std::string_view item) {
    const Hasher& hasher = sketch_.hasher();
    if (!PassesDownsample(hasher.Hash(item, HashRole::kDownsampleHash), params_.pi0)) {
      return false;
    }
    sketch_.AddHash(hasher.Hash(item, HashRole::kSketchHash));
    return true;
  }

  DpEstimate Estimate() const;
  // LargeSet only: the estimate suggests fewer than n0 distinct items, so the
  // pure-DP precondition probably does not hold.
  bool CardinalityWarning() const;

  const Sketch& sketch() const { return sketch_; }
  const PrivacyParams& params() const { return params_; }
  Pipeline pipeline() const { return pipeline_; }
  uint64_t phantoms() const { return phantoms_; }

 private:
  DownsampledSketch(Pipeline pipeline, const PrivacyParams& params, Sketch sketch,
                    uint64_t phantoms)
      : pipeline_(pipeline), params_(params), sketch_(std::move(sketch)),
        phantoms_(phantoms) {}

  Pipeline pipeline_;
  PrivacyParams params_;
  Sketch sketch_;
  uint64_t phantoms_;
};

struct PrivacyStatus {
  PrivacyParams params;
  double sampling_probability = 1.0;
  // pi(final state) >= pi0: the state is privacy-violating and only the
  // (epsilon, delta) guarantee applies.
  bool pure_dp_not_guaranteed = true;
  uint64_t distinct_items = 0;
  DeltaBound delta;
};

// Run results hold no estimate when the base estimator overflowed (a full
// LPCA bitmap); the sketch itself is still valid and mergeable.
struct BaseRun {
  Sketch sketch;
  std::optional<DpEstimate> estimate;
  std::optional<PrivacyStatus> status;
};

struct DpRun {
  Sketch sketch;
  std::optional<DpEstimate> estimate;
  PrivacyParams params;
  uint64_t v = 0;  // phantom count
  bool cardinality_warning = false;
};

struct PhantomSketch {
  Sketch sketch;
  uint64_t v = 0;
};

// Unmodified sketch of the items.
Sketch BuildSketch(std::span<const std::string> items, const SketchConfig& config,
                   const Seed& seed);

// Plain sketch; with an epsilon, also reports the privacy status with delta
// evaluated at the exact distinct count of `items`.
BaseRun RunBase(std::span<const std::string> items, const SketchConfig& config,
                const Seed& seed, std::optional<double> epsilon = std::nullopt);

DpRun RunLargeSet(std::span<const std::string> items, double epsilon,
                  const SketchConfig& config, const Seed& seed);

// n0 phantom items, each passed through the same pi0 gate as real items.
// Returns v = n0.
PhantomSketch DpInitSketch(double epsilon, const SketchConfig& config, const Seed& seed);

DpRun RunAnySet(std::span<const std::string> items, double epsilon,
                const SketchConfig& config, const Seed& seed);

// Phantom items without gating until pi <= pi0 and v >= n0.
PhantomSketch DpInitForMerge(double epsilon, const SketchConfig& config, const Seed& seed);

// Merges `existing` with DpInitForMerge() under the same config and seed.
DpRun MakeDp(const Sketch& existing, double epsilon);

// The estimate a stored sketch reports under its pipeline. `pi0` is ignored
// for pipelines without downsampling.
DpEstimate EstimateFor(Pipeline pipeline, const Sketch& sketch, double pi0, uint64_t v);
// As EstimateFor, but empty instead of throwing EstimatorOverflow.
std::optional<DpEstimate> TryEstimateFor(Pipeline pipeline, const Sketch& sketch, double pi0,
                                         uint64_t v);

}  // namespace dpsketch

#endif  // DPSKETCH_DP_H_
