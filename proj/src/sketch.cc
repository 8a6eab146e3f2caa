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

#include "dpsketch/sketch.h"

namespace dpsketch {
namespace {

SketchConfig CheckedConfig(const SketchConfig& config) {
  config.Validate();
  return config.Normalized();
}

bool StateMatchesConfig(const FamilyState& state, const SketchConfig& config) {
  switch (config.family) {
    case Family::kHll:
      if (const auto* s = std::get_if<HllState>(&state)) {
        return s->k() == config.k &&
               s->max_rank() == (1u << config.register_width) - 1;
      }
      return false;
    case Family::kBottomK:
      if (const auto* s = std::get_if<BottomKState>(&state)) return s->k() == config.k;
      return false;
    case Family::kFm85:
      if (const auto* s = std::get_if<Fm85State>(&state)) {
        return s->k() == config.k && s->bitmap_length() == config.bitmap_length;
      }
      return false;
    case Family::kLpca:
      if (const auto* s = std::get_if<LpcaState>(&state)) {
        return s->k() == config.k && s->sampling_rate() == config.sampling_rate;
      }
      return false;
    case Family::kAdaptiveSampling:
      if (const auto* s = std::get_if<AdaptiveSamplingState>(&state)) {
        return s->k() == config.k;
      }
      return false;
  }
  return false;
}

}  // namespace

FamilyState MakeEmptyState(const SketchConfig& config) {
  config.Validate();
  switch (config.family) {
    case Family::kHll:
      return HllState(config.k, config.register_width);
    case Family::kBottomK:
      return BottomKState(config.k);
    case Family::kFm85:
      return Fm85State(config.k, config.bitmap_length);
    case Family::kLpca:
      return LpcaState(config.k, config.sampling_rate);
    case Family::kAdaptiveSampling:
      return AdaptiveSamplingState(config.k);
  }
  throw std::invalid_argument("unknown sketch family");
}

Sketch::Sketch(const SketchConfig& config, const Seed& seed)
    : config_(CheckedConfig(config)),
      seed_(seed),
      hasher_(seed),
      state_(MakeEmptyState(config_)) {}

Sketch::Sketch(const SketchConfig& config, const Seed& seed, FamilyState state)
    : config_(CheckedConfig(config)), seed_(seed), hasher_(seed), state_(std::move(state)) {
  if (!StateMatchesConfig(state_, config_)) {
    throw std::invalid_argument("sketch state does not match its config");
  }
}

bool Sketch::AddHash(HashValue h) {
  return std::visit([h](auto& s) { return s.Update(h); }, state_);
}

void Sketch::Merge(const Sketch& other) {
  if (config_.family != other.config_.family) throw IncompatibleSketches("family");
  if (!(config_ == other.config_)) throw IncompatibleSketches("config");
  if (!(seed_ == other.seed_)) throw IncompatibleSketches("seed");
  std::visit(
      [&other](auto& s) {
        using State = std::decay_t<decltype(s)>;
        s.Merge(std::get<State>(other.state_));
      },
      state_);
}

double Sketch::SamplingProbability() const {
  return std::visit([](const auto& s) { return s.SamplingProbability(); }, state_);
}

double Sketch::Estimate() const {
  return std::visit([](const auto& s) { return s.Estimate(); }, state_);
}

}  // namespace dpsketch
