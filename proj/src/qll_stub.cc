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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dpsketch/bench.h"

namespace dpsketch {
namespace {

constexpr double kTwoToMinus64 = 0x1p-64;

uint32_t SaturatingRegister(double g) {
  constexpr auto kMax = static_cast<double>(std::numeric_limits<uint32_t>::max());
  return g >= kMax ? std::numeric_limits<uint32_t>::max() : static_cast<uint32_t>(g);
}

}  // namespace

double QllStub::DefaultGamma(uint32_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  return 7.49 / std::sqrt(static_cast<double>(k));
}

QllStub::QllStub(uint32_t k, const Seed& seed) : QllStub(k, DefaultGamma(k), seed) {}

QllStub::QllStub(uint32_t k, double gamma, const Seed& seed)
    : gamma_(gamma), log_base_(std::log1p(gamma)), hasher_(seed), registers_(k, 0) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be positive");
  }
}

uint32_t QllStub::GeometricFromHash(HashValue h) const {
  const double u = (static_cast<double>(h.bits) + 0.5) * kTwoToMinus64;
  // u can round up to exactly 1 for the largest hashes; the draw is then 1.
  const double g = u >= 1.0 ? 0.0 : std::floor(-std::log(u) / log_base_);
  return 1 + SaturatingRegister(g);
}

void QllStub::Update(std::string_view item) {
  const auto k = static_cast<uint32_t>(registers_.size());
  for (uint32_t j = 0; j < k; ++j) {
    const uint32_t g = GeometricFromHash(hasher_.HashIndexed(item, j));
    if (g > registers_[j]) registers_[j] = g;
  }
  hash_evaluations_ += k;
}

void QllStub::SimulateStream(uint64_t n, uint64_t stream) {
  if (n == 0) {
    std::fill(registers_.begin(), registers_.end(), 0);
    return;
  }
  const std::string label = "simulate:" + std::to_string(stream);
  const auto nd = static_cast<double>(n);
  const auto k = static_cast<uint32_t>(registers_.size());
  for (uint32_t j = 0; j < k; ++j) {
    const double u = (static_cast<double>(hasher_.HashIndexed(label, j).bits) + 0.5) *
                     kTwoToMinus64;
    // P(max <= g) = (1 - (1 + gamma)^-g)^n; invert at u.
    const double tail = -std::expm1(std::log(u) / nd);
    const double g = std::ceil(-std::log(tail) / log_base_);
    registers_[j] = std::max<uint32_t>(1, SaturatingRegister(std::max(g, 0.0)));
  }
}

uint32_t QllStub::MaxRegister() const {
  return registers_.empty() ? 0 : *std::max_element(registers_.begin(), registers_.end());
}

uint64_t QllStub::TotalSketchSizeBits() const {
  return RegisterSketchSizeBits(k(), MaxRegister());
}

uint64_t RegisterSketchSizeBits(uint32_t k, uint32_t max_register) {
  return uint64_t{k} * static_cast<uint64_t>(std::bit_width(max_register));
}

}  // namespace dpsketch
