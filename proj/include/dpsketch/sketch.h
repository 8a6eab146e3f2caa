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

#ifndef DPSKETCH_SKETCH_H_
#define DPSKETCH_SKETCH_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "dpsketch/families.h"
#include "dpsketch/hashing.h"
#include "dpsketch/sketch_config.h"

namespace dpsketch {

// Thrown when two sketches cannot be merged; field() names the first
// mismatching attribute.
class IncompatibleSketches : public std::invalid_argument {
 public:
  explicit IncompatibleSketches(std::string field)
      : std::invalid_argument("incompatible sketches: " + field + " differs"),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

using FamilyState = std::variant<HllState, BottomKState, Fm85State, LpcaState,
                                 AdaptiveSamplingState>;

// A hash-based, order-invariant cardinality sketch bound to one seed.
//
// The state depends only on the set of sketch-hash values added, so adds are
// idempotent and commutative and Merge() of two sketches equals the sketch of
// the concatenated streams. Values are copyable and movable; there is no
// internal synchronization.
class Sketch {
 public:
  // Throws std::invalid_argument on an invalid config.
  Sketch(const SketchConfig& config, const Seed& seed);
  // Wraps an already-populated family state (used by deserialization).
  // Throws std::invalid_argument if the state does not match the config.
  Sketch(const SketchConfig& config, const Seed& seed, FamilyState state);

  // Adds a real item. Returns true if the state changed.
  bool Add(std::string_view item) {
    return AddHash(hasher_.Hash(item, HashRole::kSketchHash));
  }
  // Adds phantom item number `index` from the reserved disjoint universe.
  bool AddPhantom(uint64_t index) {
    return AddHash(hasher_.HashPhantom(index, HashRole::kSketchHash));
  }
  // Adds a raw sketch-hash value.
  bool AddHash(HashValue h);

  // Throws IncompatibleSketches unless config and seed agree.
  void Merge(const Sketch& other);

  // Probability that a fresh distinct item changes the state.
  double SamplingProbability() const;
  // The family's base estimator. LPCA throws EstimatorOverflow when full.
  double Estimate() const;

  const SketchConfig& config() const { return config_; }
  const Seed& seed() const { return seed_; }
  const Hasher& hasher() const { return hasher_; }
  const FamilyState& state() const { return state_; }

  template <typename State>
  const State& As() const {
    return std::get<State>(state_);
  }

  // Canonical-form equality: config, seed and state.
  friend bool operator==(const Sketch& a, const Sketch& b) {
    return a.config_ == b.config_ && a.seed_ == b.seed_ && a.state_ == b.state_;
  }

 private:
  SketchConfig config_;
  Seed seed_;
  Hasher hasher_;
  FamilyState state_;
};

// Builds the empty state for a config (no seed binding).
FamilyState MakeEmptyState(const SketchConfig& config);

}  // namespace dpsketch

#endif  // DPSKETCH_SKETCH_H_
