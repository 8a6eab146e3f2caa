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

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "dpsketch/audit.h"
#include "dpsketch/bench.h"
#include "dpsketch/bounds.h"
#include "dpsketch/dp.h"
#include "dpsketch/sketch_file.h"

namespace dpsketch::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr double kLn2 = 0.6931471805599453;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

[[noreturn]] void Usage(const std::string& message) { throw CliError(kExitUsage, message); }

// Flags shared by every command that describes a sketch configuration.
struct ConfigFlags {
  std::string family;
  uint32_t k = 0;
  uint32_t ell = kDefaultFm85BitmapLength;
  double p = 1.0;
  unsigned width = kDefaultHllRegisterWidth;
  CLI::Option* family_opt = nullptr;
  CLI::Option* ell_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* width_opt = nullptr;

  void Register(CLI::App* app) {
    family_opt = app->add_option("--family", family, "hll, bottomk, fm85, lpca or adaptive")
                     ->required();
    app->add_option("--k", k, "registers, values or bitmaps")->required();
    ell_opt = app->add_option("--ell", ell, "FM85 bitmap length");
    p_opt = app->add_option("--p", p, "LPCA sampling rate");
    width_opt = app->add_option("--width", width, "HLL register width in bits");
  }

  // `require_aux` makes --ell mandatory for fm85 and --p for lpca.
  SketchConfig Build(bool require_aux) const {
    const std::optional<Family> f = ParseFamily(family);
    if (!f) Usage("unknown family '" + family + "'");
    if (ell_opt->count() > 0 && *f != Family::kFm85) Usage("--ell applies only to fm85");
    if (p_opt->count() > 0 && *f != Family::kLpca) Usage("--p applies only to lpca");
    if (width_opt->count() > 0 && *f != Family::kHll) Usage("--width applies only to hll");
    if (require_aux && *f == Family::kFm85 && ell_opt->count() == 0) Usage("fm85 needs --ell");
    if (require_aux && *f == Family::kLpca && p_opt->count() == 0) Usage("lpca needs --p");
    if (width > 255) Usage("--width out of range");
    SketchConfig config;
    config.family = *f;
    config.k = k;
    config.bitmap_length = ell;
    config.sampling_rate = p;
    config.register_width = static_cast<uint8_t>(width);
    try {
      config.Validate();
    } catch (const std::invalid_argument& e) {
      Usage(e.what());
    }
    return config.Normalized();
  }
};

Seed ParseSeed(const CLI::Option* opt, const std::string& hex) {
  if (opt->count() == 0) return Seed::Random();
  try {
    return Seed::FromHex(hex);
  } catch (const std::invalid_argument& e) {
    Usage(std::string("--seed-hex: ") + e.what());
  }
}

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) Usage("--epsilon must be positive");
}

std::string ReadAll(const std::string& path, std::istream& in) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw CliError(kExitUnreadable, "cannot read " + path);
  std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (file.bad()) throw CliError(kExitUnreadable, "cannot read " + path);
  return data;
}

SketchFile ReadSketchFile(const std::string& path, std::istream& in) {
  const std::string bytes = ReadAll(path, in);
  try {
    return Deserialize(bytes);
  } catch (const FormatError& e) {
    throw CliError(kExitUnreadable, path + ": " + e.what());
  }
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw CliError(kExitFailure, "cannot write " + path);
}

json NullableEpsilon(double epsilon) {
  return std::isnan(epsilon) ? json(nullptr) : json(epsilon);
}

json EstimateJson(const SketchFile& file) {
  json j;
  const SketchConfig& c = file.sketch.config();
  try {
    const DpEstimate e = file.Estimate();
    j["estimate"] = e.value;
    j["base_estimate"] = e.base_estimate;
    if (e.value < 0.0) {
      j["note"] = "negative estimate reported unclamped; clamping would bias it";
    }
  } catch (const EstimatorOverflow& e) {
    j["estimate"] = nullptr;
    j["base_estimate"] = nullptr;
    j["note"] = e.what();
  }
  j["pipeline"] = PipelineName(file.pipeline);
  j["epsilon"] = NullableEpsilon(file.epsilon);
  if (file.pipeline == Pipeline::kRaw) {
    j["pi0"] = nullptr;
    j["n0"] = nullptr;
  } else {
    const PrivacyParams params = DerivePrivacyParams(file.epsilon, c);
    j["pi0"] = params.pi0;
    j["n0"] = params.n0;
  }
  j["v"] = file.v;
  const bool downsampled =
      file.pipeline == Pipeline::kLargeSet || file.pipeline == Pipeline::kAnySet;
  j["p"] = downsampled ? Pi0(file.epsilon) : 1.0;
  j["family"] = FamilyName(c.family);
  j["k"] = c.k;
  j["sampling_probability"] = file.sketch.SamplingProbability();
  j["seed_hex"] = file.sketch.seed().ToHex();
  return j;
}

std::vector<std::string> ReversedForParse(const std::vector<std::string>& args) {
  return std::vector<std::string>(args.rbegin(), args.rend());
}

// ---------------------------------------------------------------------------

struct BuildFlags {
  ConfigFlags config;
  double epsilon = 0.0;
  std::string pipeline = "raw";
  std::string seed_hex;
  std::string input = "-";
  std::string out;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

int RunBuild(const BuildFlags& flags, std::istream& in, std::ostream& out) {
  const SketchConfig config = flags.config.Build(false);
  const std::optional<Pipeline> pipeline = ParsePipeline(flags.pipeline);
  if (!pipeline || *pipeline == Pipeline::kMakeDp) {
    Usage("--pipeline must be raw, base, large-set or any-set");
  }
  const bool needs_epsilon = *pipeline != Pipeline::kRaw;
  if (needs_epsilon && flags.epsilon_opt->count() == 0) {
    Usage("pipeline " + flags.pipeline + " needs --epsilon");
  }
  if (!needs_epsilon && flags.epsilon_opt->count() > 0) {
    Usage("the raw pipeline takes no --epsilon");
  }
  if (needs_epsilon) CheckEpsilon(flags.epsilon);
  const bool downsampled = *pipeline == Pipeline::kLargeSet || *pipeline == Pipeline::kAnySet;
  if (downsampled && config.family == Family::kLpca && config.sampling_rate != 1.0) {
    Usage("downsampled pipelines run lpca at --p 1");
  }
  const Seed seed = ParseSeed(flags.seed_opt, flags.seed_hex);

  std::vector<std::string> items;
  {
    std::istringstream stream(ReadAll(flags.input, in));
    items = SplitLines(stream);
  }

  std::optional<SketchFile> file;
  json extra;
  switch (*pipeline) {
    case Pipeline::kRaw:
      file = SketchFile{.sketch = BuildSketch(items, config, seed),
                        .pipeline = Pipeline::kRaw,
                        .epsilon = std::nan("")};
      break;
    case Pipeline::kBase: {
      BaseRun run = RunBase(items, config, seed, flags.epsilon);
      const PrivacyStatus& s = *run.status;
      extra["privacy"] = {
          {"pure_dp_not_guaranteed", s.pure_dp_not_guaranteed},
          {"distinct_items", s.distinct_items},
          {"delta", s.delta.delta},
          {"delta_valid", s.delta.valid},
          {"delta_method", BoundMethodName(s.delta.method)},
      };
      file = SketchFile{.sketch = std::move(run.sketch),
                        .pipeline = Pipeline::kBase,
                        .epsilon = flags.epsilon};
      break;
    }
    case Pipeline::kLargeSet: {
      DpRun run = RunLargeSet(items, flags.epsilon, config, seed);
      extra["cardinality_warning"] = run.cardinality_warning;
      file = SketchFile{.sketch = std::move(run.sketch),
                        .pipeline = Pipeline::kLargeSet,
                        .epsilon = flags.epsilon};
      break;
    }
    case Pipeline::kAnySet: {
      DpRun run = RunAnySet(items, flags.epsilon, config, seed);
      file = SketchFile{.sketch = std::move(run.sketch),
                        .pipeline = Pipeline::kAnySet,
                        .epsilon = flags.epsilon,
                        .v = run.v};
      break;
    }
    case Pipeline::kMakeDp:
      break;
  }
  if (!flags.out.empty()) WriteFile(flags.out, Serialize(*file));
  json j = EstimateJson(*file);
  if (!extra.is_null()) j.update(extra);
  out << j.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

int RunMerge(const std::vector<std::string>& inputs, const std::string& out_path,
             std::istream& in, std::ostream& out) {
  if (inputs.size() < 2) Usage("merge needs at least two input files");
  SketchFile merged = ReadSketchFile(inputs[0], in);
  for (size_t i = 1; i < inputs.size(); ++i) {
    const SketchFile next = ReadSketchFile(inputs[i], in);
    if (auto field = MergeMismatch(merged, next)) {
      throw CliError(kExitIncompatible,
                     "cannot merge " + inputs[i] + ": field '" + *field + "' differs");
    }
    merged = MergeFiles(merged, next);
  }
  if (!out_path.empty()) WriteFile(out_path, Serialize(merged));
  out << EstimateJson(merged).dump() << '\n';
  return kExitOk;
}

int RunMakeDp(const std::string& input, double epsilon, const std::string& out_path,
              std::istream& in, std::ostream& out) {
  CheckEpsilon(epsilon);
  const SketchFile file = ReadSketchFile(input, in);
  if (file.pipeline != Pipeline::kRaw && file.pipeline != Pipeline::kBase) {
    throw CliError(kExitAlreadyPrivate,
                   input + " is already privatized (pipeline " +
                       std::string(PipelineName(file.pipeline)) + ")");
  }
  DpRun run = MakeDp(file.sketch, epsilon);
  const SketchFile result{.sketch = std::move(run.sketch),
                          .pipeline = Pipeline::kMakeDp,
                          .epsilon = epsilon,
                          .v = run.v};
  if (!out_path.empty()) WriteFile(out_path, Serialize(result));
  out << EstimateJson(result).dump() << '\n';
  return kExitOk;
}

int RunEstimate(const std::string& input, std::istream& in, std::ostream& out) {
  out << EstimateJson(ReadSketchFile(input, in)).dump() << '\n';
  return kExitOk;
}

int RunBounds(const ConfigFlags& flags, double epsilon, uint64_t n, std::ostream& out) {
  const SketchConfig config = flags.Build(true);
  CheckEpsilon(epsilon);
  const DeltaBound bound = DeltaFor(config, epsilon, n);
  const PrivacyParams params = DerivePrivacyParams(epsilon, config);
  json j;
  j["family"] = FamilyName(config.family);
  j["k"] = config.k;
  if (config.family == Family::kFm85) j["ell"] = config.bitmap_length;
  if (config.family == Family::kLpca) j["p"] = config.sampling_rate;
  j["epsilon"] = epsilon;
  j["n"] = n;
  j["pi0"] = params.pi0;
  j["n0"] = params.n0;
  j["delta"] = bound.delta;
  j["valid"] = bound.valid;
  j["method"] = BoundMethodName(bound.method);
  if (bound.bernstein) j["bernstein"] = *bound.bernstein;
  out << j.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AuditFlags {
  ConfigFlags config;
  std::string kind = "dp";
  double epsilon = kLn2;
  std::string pipeline = "large-set";
  uint64_t n = 16;
  uint64_t trials = 100000;
  std::string seed_hex;
  CLI::Option* seed_opt = nullptr;
  bool self_compare = false;
  unsigned threads = 0;
};

json StatJson(const StatReport& s) {
  return {{"mean", s.mean},
          {"variance", s.variance},
          {"trials", s.trials},
          {"standard_error", s.standard_error}};
}

int RunAudit(const AuditFlags& flags, std::ostream& out) {
  const SketchConfig config = flags.config.Build(false);
  CheckEpsilon(flags.epsilon);
  const std::optional<Pipeline> pipeline = ParsePipeline(flags.pipeline);
  if (!pipeline) Usage("unknown --pipeline '" + flags.pipeline + "'");
  if (flags.trials == 0) Usage("--trials must be positive");
  const Seed seed = ParseSeed(flags.seed_opt, flags.seed_hex);
  json j;
  j["kind"] = flags.kind;
  j["family"] = FamilyName(config.family);
  j["k"] = config.k;
  j["epsilon"] = flags.epsilon;
  j["n"] = flags.n;
  j["trials"] = flags.trials;
  j["seed_hex"] = seed.ToHex();
  if (flags.kind == "dp") {
    if (flags.n == 0) Usage("--n must be positive");
    AuditOptions options{.config = config,
                         .epsilon = flags.epsilon,
                         .pipeline = *pipeline,
                         .n = flags.n,
                         .trials = flags.trials,
                         .seed = seed,
                         .self_compare = flags.self_compare,
                         .threads = flags.threads};
    const AuditReport r = AuditDp(options);
    j["pipeline"] = PipelineName(*pipeline);
    j["epsilon_target"] = r.epsilon_target;
    j["max_log_ratio"] = r.max_log_ratio;
    j["max_log_ratio_ci"] = {r.max_log_ratio_ci.lo, r.max_log_ratio_ci.hi};
    j["min_log_ratio"] = r.min_log_ratio;
    j["min_log_ratio_ci"] = {r.min_log_ratio_ci.lo, r.min_log_ratio_ci.hi};
    j["states_observed"] = r.states_observed;
    j["states_compared"] = r.states_compared;
    j["sparse_mass"] = r.sparse_mass;
    j["violations"] = r.violations.size();
    j["verdict"] = VerdictName(r.verdict);
  } else if (flags.kind == "delta") {
    const ProportionReport r =
        EmpiricalDelta(config, flags.epsilon, flags.n, flags.trials, seed, flags.threads);
    const DeltaBound bound = DeltaFor(config, flags.epsilon, flags.n);
    j["empirical_delta"] = r.estimate;
    j["ci"] = {r.ci.lo, r.ci.hi};
    j["violations"] = r.successes;
    j["closed_form_delta"] = bound.delta;
    j["closed_form_valid"] = bound.valid;
  } else if (flags.kind == "unbiasedness") {
    const UnbiasednessReport r = UnbiasednessCheck(*pipeline, config, flags.epsilon, flags.n,
                                                   flags.trials, seed, flags.threads);
    j["pipeline"] = PipelineName(*pipeline);
    j["stats"] = StatJson(r.stats);
    j["pass"] = r.pass;
  } else if (flags.kind == "variance-ratio") {
    const VarianceRatioReport r = VarianceRatioCheck(config, flags.epsilon, flags.n,
                                                     flags.trials, seed, *pipeline,
                                                     flags.threads);
    j["pipeline"] = PipelineName(*pipeline);
    j["ratio"] = r.ratio;
    j["log_standard_error"] = r.log_standard_error;
    j["dp"] = StatJson(r.dp);
    j["base"] = StatJson(r.base);
  } else {
    Usage("--kind must be dp, delta, unbiasedness or variance-ratio");
  }
  out << j.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

void EmitCsv(const std::string& out_path, std::ostream& out, const std::string& csv) {
  if (out_path.empty()) {
    out << csv;
  } else {
    WriteFile(out_path, csv);
  }
}

}  // namespace

std::vector<std::string> SplitLines(std::istream& in) {
  std::vector<std::string> items;
  std::string line;
  while (std::getline(in, line)) items.push_back(line);
  return items;
}

int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private cardinality sketches", "dpsketch"};
  app.require_subcommand(1);

  BuildFlags build_flags;
  CLI::App* build = app.add_subcommand("build", "sketch a newline-delimited item stream");
  build_flags.config.Register(build);
  build_flags.epsilon_opt = build->add_option("--epsilon", build_flags.epsilon);
  build->add_option("--pipeline", build_flags.pipeline, "raw, base, large-set or any-set");
  build_flags.seed_opt = build->add_option("--seed-hex", build_flags.seed_hex, "64 hex digits");
  build->add_option("--input", build_flags.input, "item file, - for standard input");
  build->add_option("--out", build_flags.out, "sketch file to write");

  std::vector<std::string> merge_inputs;
  std::string merge_out;
  CLI::App* merge = app.add_subcommand("merge", "merge compatible sketch files");
  merge->add_option("inputs", merge_inputs)->required();
  merge->add_option("--out", merge_out);

  std::string makedp_input;
  double makedp_epsilon = 0.0;
  std::string makedp_out;
  CLI::App* makedp = app.add_subcommand("makedp", "privatize an existing sketch file");
  makedp->add_option("input", makedp_input)->required();
  makedp->add_option("--epsilon", makedp_epsilon)->required();
  makedp->add_option("--out", makedp_out);

  std::string estimate_input;
  CLI::App* estimate = app.add_subcommand("estimate", "report a sketch file's estimate");
  estimate->add_option("input", estimate_input)->required();

  ConfigFlags bounds_config;
  double bounds_epsilon = 0.0;
  uint64_t bounds_n = 0;
  CLI::App* bounds = app.add_subcommand("bounds", "closed-form delta for an unmodified sketch");
  bounds_config.Register(bounds);
  bounds->add_option("--epsilon", bounds_epsilon)->required();
  bounds->add_option("--n", bounds_n)->required();

  AuditFlags audit_flags;
  CLI::App* audit = app.add_subcommand("audit", "Monte-Carlo privacy and utility audits");
  audit_flags.config.Register(audit);
  audit->add_option("--kind", audit_flags.kind, "dp, delta, unbiasedness or variance-ratio");
  audit->add_option("--epsilon", audit_flags.epsilon);
  audit->add_option("--pipeline", audit_flags.pipeline);
  audit->add_option("--n", audit_flags.n);
  audit->add_option("--trials", audit_flags.trials);
  audit_flags.seed_opt = audit->add_option("--seed-hex", audit_flags.seed_hex);
  audit->add_flag("--self-compare", audit_flags.self_compare);
  audit->add_option("--threads", audit_flags.threads);

  BenchUpdateOptions update_options;
  std::string update_seed_hex;
  std::string update_out;
  CLI::App* bench_update = app.add_subcommand("bench-update", "update-time benchmark (CSV)");
  bench_update->add_option("--k-values", update_options.k_values)->delimiter(',');
  bench_update->add_option("--updates", update_options.updates);
  bench_update->add_option("--trials", update_options.trials);
  bench_update->add_option("--repetitions", update_options.repetitions);
  bench_update->add_option("--epsilon", update_options.epsilon);
  CLI::Option* update_seed_opt = bench_update->add_option("--seed-hex", update_seed_hex);
  bench_update->add_option("--out", update_out);

  BenchSpaceOptions space_options;
  std::string space_seed_hex;
  std::string space_out;
  CLI::App* bench_space = app.add_subcommand("bench-space", "sketch-size benchmark (CSV)");
  bench_space->add_option("--k-values", space_options.k_values)->delimiter(',');
  bench_space->add_option("--n", space_options.n);
  bench_space->add_option("--epsilon", space_options.epsilon);
  bench_space->add_option("--trials", space_options.trials);
  CLI::Option* space_seed_opt = bench_space->add_option("--seed-hex", space_seed_hex);
  bench_space->add_option("--threads", space_options.threads);
  bench_space->add_option("--out", space_out);

  try {
    std::vector<std::string> reversed = ReversedForParse(args);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return RunBuild(build_flags, in, out);
    if (merge->parsed()) return RunMerge(merge_inputs, merge_out, in, out);
    if (makedp->parsed()) return RunMakeDp(makedp_input, makedp_epsilon, makedp_out, in, out);
    if (estimate->parsed()) return RunEstimate(estimate_input, in, out);
    if (bounds->parsed()) return RunBounds(bounds_config, bounds_epsilon, bounds_n, out);
    if (audit->parsed()) return RunAudit(audit_flags, out);
    if (bench_update->parsed()) {
      CheckEpsilon(update_options.epsilon);
      update_options.seed = ParseSeed(update_seed_opt, update_seed_hex);
      std::ostringstream csv;
      WriteUpdateCsv(BenchUpdate(update_options), csv);
      EmitCsv(update_out, out, csv.str());
      return kExitOk;
    }
    if (bench_space->parsed()) {
      CheckEpsilon(space_options.epsilon);
      space_options.seed = ParseSeed(space_seed_opt, space_seed_hex);
      std::ostringstream csv;
      WriteSpaceCsv(BenchSpace(space_options), csv);
      EmitCsv(space_out, out, csv.str());
      return kExitOk;
    }
  } catch (const CliError& e) {
    err << "dpsketch: " << e.what() << '\n';
    return e.code();
  } catch (const std::invalid_argument& e) {
    err << "dpsketch: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dpsketch: " << e.what() << '\n';
    return kExitFailure;
  }
  err << "dpsketch: no command given\n";
  return kExitUsage;
}

}  // namespace dpsketch::cli
