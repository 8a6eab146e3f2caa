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

#include "dpsketch/sketch_file.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

namespace dpsketch {
namespace {

constexpr char kMagic[4] = {'D', 'P', 'S', 'K'};

class Writer {
 public:
  void U8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U16(uint16_t v) { Le(v, 2); }
  void U32(uint32_t v) { Le(v, 4); }
  void U64(uint64_t v) { Le(v, 8); }
  void F64(double v) { Le(std::bit_cast<uint64_t>(v), 8); }
  void Bytes(const void* data, size_t size) {
    out_.append(static_cast<const char*>(data), size);
  }
  std::string& str() { return out_; }

 private:
  void Le(uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>(v >> (8 * i)));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  uint8_t U8() { return static_cast<uint8_t>(Le(1)); }
  uint16_t U16() { return static_cast<uint16_t>(Le(2)); }
  uint32_t U32() { return static_cast<uint32_t>(Le(4)); }
  uint64_t U64() { return Le(8); }
  double F64() { return std::bit_cast<double>(Le(8)); }
  std::string_view Bytes(size_t size) {
    Need(size);
    std::string_view out = in_.substr(pos_, size);
    pos_ += size;
    return out;
  }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  void Need(size_t size) const {
    if (in_.size() - pos_ < size) throw FormatError("truncated sketch file");
  }
  uint64_t Le(int bytes) {
    Need(static_cast<size_t>(bytes));
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<size_t>(bytes);
    return v;
  }

  std::string_view in_;
  size_t pos_ = 0;
};

std::string EncodePayload(const FamilyState& state) {
  Writer w;
  std::visit(
      [&w](const auto& s) {
        using State = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<State, HllState>) {
          w.Bytes(s.registers().data(), s.registers().size());
        } else if constexpr (std::is_same_v<State, BottomKState>) {
          w.U32(static_cast<uint32_t>(s.values().size()));
          for (uint64_t v : s.values()) w.U64(v);
        } else if constexpr (std::is_same_v<State, Fm85State>) {
          for (uint64_t b : s.bitmaps()) w.U64(b);
        } else if constexpr (std::is_same_v<State, LpcaState>) {
          for (uint64_t word : s.words()) w.U64(word);
        } else {
          w.U8(static_cast<uint8_t>(s.depth()));
          w.U32(static_cast<uint32_t>(s.values().size()));
          for (uint64_t v : s.values()) w.U64(v);
        }
      },
      state);
  return std::move(w.str());
}

std::vector<uint64_t> ReadWords(Reader& r, uint64_t count) {
  if (count > r.remaining() / 8) throw FormatError("payload shorter than declared");
  std::vector<uint64_t> out(count);
  for (uint64_t& v : out) v = r.U64();
  return out;
}

FamilyState DecodePayload(const SketchConfig& config, std::string_view payload) {
  Reader r(payload);
  FamilyState state = [&]() -> FamilyState {
    switch (config.family) {
      case Family::kHll: {
        const std::string_view bytes = r.Bytes(config.k);
        return HllState::FromRegisters(config.register_width,
                                       std::vector<uint8_t>(bytes.begin(), bytes.end()));
      }
      case Family::kBottomK: {
        const uint32_t count = r.U32();
        return BottomKState::FromValues(config.k, ReadWords(r, count));
      }
      case Family::kFm85:
        return Fm85State::FromBitmaps(config.bitmap_length, ReadWords(r, config.k));
      case Family::kLpca:
        return LpcaState::FromWords(config.k, config.sampling_rate,
                                    ReadWords(r, (uint64_t{config.k} + 63) / 64));
      case Family::kAdaptiveSampling: {
        const uint8_t depth = r.U8();
        const uint32_t count = r.U32();
        return AdaptiveSamplingState::FromValues(config.k, depth, ReadWords(r, count));
      }
    }
    throw FormatError("unknown family");
  }();
  if (r.remaining() != 0) throw FormatError("trailing bytes in payload");
  return state;
}

uint64_t MinimumPayloadLength(const SketchConfig& config) {
  switch (config.family) {
    case Family::kHll:
      return config.k;
    case Family::kBottomK:
      return 4;
    case Family::kFm85:
      return uint64_t{config.k} * 8;
    case Family::kLpca:
      return (uint64_t{config.k} + 63) / 64 * 8;
    case Family::kAdaptiveSampling:
      return 5;
  }
  return 0;
}

bool SameBits(double a, double b) {
  return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

}  // namespace

DpEstimate SketchFile::Estimate() const {
  const double pi0 = std::isnan(epsilon) ? 1.0 : Pi0(epsilon);
  return EstimateFor(pipeline, sketch, pi0, v);
}

bool operator==(const SketchFile& a, const SketchFile& b) {
  return a.sketch == b.sketch && a.pipeline == b.pipeline && SameBits(a.epsilon, b.epsilon) &&
         a.v == b.v;
}

namespace {

// Shared by both directions so that nothing written is unreadable.
void CheckPrivacyFields(const SketchConfig& config, Pipeline pipeline, double epsilon,
                        uint64_t v) {
  if (pipeline == Pipeline::kRaw) {
    if (!std::isnan(epsilon)) throw FormatError("raw sketch carries an epsilon");
  } else if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw FormatError("epsilon must be positive and finite");
  }
  const bool has_phantoms = pipeline == Pipeline::kAnySet || pipeline == Pipeline::kMakeDp;
  if (!has_phantoms && v != 0) throw FormatError("phantom count on a pipeline without phantoms");
  if (pipeline == Pipeline::kLargeSet || pipeline == Pipeline::kAnySet) {
    if (config.family == Family::kLpca && config.sampling_rate != 1.0) {
      throw FormatError("downsampled LPCA must have sampling rate 1");
    }
  }
}

}  // namespace

std::string Serialize(const SketchFile& file) {
  const SketchConfig& c = file.sketch.config();
  CheckPrivacyFields(c, file.pipeline, file.epsilon, file.v);
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U16(kSketchFileVersion);
  w.U8(static_cast<uint8_t>(c.family));
  w.U32(c.k);
  w.U32(c.bitmap_length);
  w.F64(c.sampling_rate);
  w.U8(c.register_width);
  w.Bytes(file.sketch.seed().bytes().data(), Seed::kBytes);
  w.U8(static_cast<uint8_t>(file.pipeline));
  w.F64(file.epsilon);
  w.U64(file.v);
  const std::string payload = EncodePayload(file.sketch.state());
  w.U64(payload.size());
  w.Bytes(payload.data(), payload.size());
  return std::move(w.str());
}

SketchFile Deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (r.Bytes(4) != std::string_view(kMagic, 4)) throw FormatError("not a sketch file");
  const uint16_t version = r.U16();
  if (version != kSketchFileVersion) {
    throw FormatError("unsupported sketch file version " + std::to_string(version));
  }
  const uint8_t family = r.U8();
  if (family < static_cast<uint8_t>(Family::kHll) ||
      family > static_cast<uint8_t>(Family::kAdaptiveSampling)) {
    throw FormatError("unknown family tag " + std::to_string(family));
  }
  SketchConfig config;
  config.family = static_cast<Family>(family);
  config.k = r.U32();
  config.bitmap_length = r.U32();
  config.sampling_rate = r.F64();
  config.register_width = r.U8();
  try {
    config.Validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid config: ") + e.what());
  }
  if (!(config.Normalized() == config)) {
    throw FormatError("config has parameters set that its family does not use");
  }
  Seed::Bytes seed_bytes;
  std::memcpy(seed_bytes.data(), r.Bytes(Seed::kBytes).data(), Seed::kBytes);

  const uint8_t pipeline_tag = r.U8();
  if (pipeline_tag > static_cast<uint8_t>(Pipeline::kMakeDp)) {
    throw FormatError("unknown pipeline tag " + std::to_string(pipeline_tag));
  }
  const auto pipeline = static_cast<Pipeline>(pipeline_tag);
  const double epsilon = r.F64();
  const uint64_t v = r.U64();
  CheckPrivacyFields(config, pipeline, epsilon, v);

  const uint64_t payload_length = r.U64();
  if (payload_length != r.remaining()) throw FormatError("payload length mismatch");
  // Checked before anything of size k is allocated, so a corrupt k cannot
  // trigger a huge allocation.
  if (payload_length < MinimumPayloadLength(config)) {
    throw FormatError("payload too short for k");
  }
  try {
    return SketchFile{
        .sketch = Sketch(config, Seed(seed_bytes), DecodePayload(config, r.Bytes(payload_length))),
        .pipeline = pipeline,
        .epsilon = epsilon,
        .v = v};
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid payload: ") + e.what());
  }
}

std::optional<std::string> MergeMismatch(const SketchFile& a, const SketchFile& b) {
  const SketchConfig& ca = a.sketch.config();
  const SketchConfig& cb = b.sketch.config();
  if (ca.family != cb.family) return "family";
  if (ca.k != cb.k) return "k";
  if (ca.bitmap_length != cb.bitmap_length) return "bitmap_length";
  if (!SameBits(ca.sampling_rate, cb.sampling_rate)) return "sampling_rate";
  if (ca.register_width != cb.register_width) return "register_width";
  if (!(a.sketch.seed() == b.sketch.seed())) return "seed";
  if (a.pipeline != b.pipeline) return "pipeline";
  if (!SameBits(a.epsilon, b.epsilon)) return "epsilon";
  if (a.v != b.v) return "v";
  return std::nullopt;
}

SketchFile MergeFiles(const SketchFile& a, const SketchFile& b) {
  if (auto field = MergeMismatch(a, b)) throw IncompatibleSketches(*field);
  SketchFile out = a;
  out.sketch.Merge(b.sketch);
  return out;
}

}  // namespace dpsketch
