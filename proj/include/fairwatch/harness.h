// Copyright 2026 The Fairwatch Authors.
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

#ifndef FAIRWATCH_HARNESS_H_
#define FAIRWATCH_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fairwatch/confidence.h"
#include "fairwatch/coverage.h"
#include "fairwatch/dynamics.h"
#include "fairwatch/fairness.h"
#include "fairwatch/shield.h"

namespace fairwatch::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitCap = 4,
};

// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// `key = value` pairs in key order.
using RawConfig = std::map<std::string, std::string>;

// One `key = value` per line; `#` starts a comment; blank lines ignored.
// Duplicate or malformed lines throw ConfigError.
RawConfig parse_config(std::string_view text);
RawConfig load_config_file(const std::filesystem::path& path);

// FNV-1a 64 over the sorted `key=value\n` lines.
std::uint64_t config_hash(const RawConfig& config);
std::string hash_hex(std::uint64_t hash);

// printf("%.17g"), with "inf" / "-inf" / "nan" spelled out.
std::string format_number(double value);

enum class ExperimentKind {
  kSimulate,
  kMonitor,
  kEnforce,
  kCoverage,
  kSynthesizeShield
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSimulate;
  DynamicsSpec dynamics = ConstantDynamics{0.5};

  std::string monitor = "static";
  MeasureKind measure = MeasureKind::kBias;
  Horizon horizon = Horizon(0);
  double delta = 0.05;
  SoundnessMode mode = SoundnessMode::kPointwise;
  std::size_t steps = 100;
  std::size_t function_window = 1;
  std::optional<std::size_t> mixing_time;  // nullopt: estimate from chain
  std::size_t first_checked = 1;

  std::string enforcer = "shield";
  double threshold = 0.5;
  std::size_t window = 10;
  std::optional<Interval> target;
  std::optional<TargetIntervalSchedule> schedule;
  std::string cost = "unit";
  InfeasibleWindowPolicy on_infeasible = InfeasibleWindowPolicy::kError;

  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<std::string> output;

  RawConfig raw;
};

// Validates every key and cross-field constraint. Relative auxiliary file
// paths (kernel, schedule) resolve against `base_dir`. Throws ConfigError
// and std::length_error (resource caps).
ExperimentConfig build_config(const RawConfig& raw,
                              const std::filesystem::path& base_dir = ".");

// Per-trial monitor factory and ground truth for a monitor configuration.
MonitorBuilder make_monitor_builder(const ExperimentConfig& config);
TruthExtractor make_truth(const ExperimentConfig& config);

struct Artifact {
  std::string csv;
  // Key-value sidecar carrying the config hash for schemas without a hash
  // column; empty for coverage reports.
  std::string meta;
  // Non-fatal events (e.g. saturated periodic windows).
  std::vector<std::string> log;
  int exit_code = kExitOk;
};

// Runs the experiment. Deterministic given the config; `jobs` only affects
// speed.
Artifact run_experiment(const ExperimentConfig& config, int jobs = 0);

// Writes to a temporary sibling then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& data);

struct CliOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 0;
};

// Loads, validates and runs a config file, writing the artifact to the
// configured output (stdout when none). Errors print one line
// `error=<kind> <message>` to `err`. Returns the exit code.
int run_cli(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace fairwatch::harness

#endif  // FAIRWATCH_HARNESS_H_
