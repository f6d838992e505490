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

#include "fairwatch/harness.h"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>

#include "fairwatch/enforcers.h"
#include "fairwatch/errors.h"
#include "fairwatch/markov_chain.h"
#include "fairwatch/markov_monitor.h"
#include "fairwatch/monitors.h"
#include "fairwatch/oracle.h"

namespace fairwatch::harness {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char separator) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(separator, start);
    parts.push_back(trim(text.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

double to_double(const std::string& key, const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + text + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + text +
                    "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(to_double(key, part));
  return values;
}

Interval to_interval(const std::string& key, const std::string& text) {
  const auto parts = to_list(key, text);
  if (parts.size() != 2) throw ConfigError(key + ": expected lo,hi");
  const Interval interval{parts[0], parts[1]};
  try {
    validate(interval);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
  return interval;
}

// Reads numbered rows of a small CSV, skipping a header and `#` lines.
std::vector<std::vector<std::string>> read_csv_rows(
    const std::filesystem::path& path, std::size_t columns,
    const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError(key + ": cannot open '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    auto fields = split(body, ',');
    if (first) {
      first = false;
      if (!fields.empty() && !fields[0].empty() &&
          std::isalpha(static_cast<unsigned char>(fields[0][0]))) {
        continue;
      }
    }
    if (fields.size() != columns) {
      throw ConfigError(key + ": expected " + std::to_string(columns) +
                        " columns in '" + body + "'");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    const auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    return it->second;
  }
  std::string require(const std::string& key, const std::string& context) {
    auto value = get(key);
    if (!value) throw ConfigError("missing key '" + key + "' (" + context + ")");
    return *value;
  }
  double number(const std::string& key, double fallback) {
    const auto value = get(key);
    return value ? to_double(key, *value) : fallback;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    const auto value = get(key);
    return value ? to_u64(key, *value) : fallback;
  }
  void reject_unknown() const {
    for (const auto& [key, value] : raw_) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "'");
    }
  }

 private:
  const RawConfig& raw_;
  std::set<std::string> used_;
};

ExperimentKind parse_kind(const std::string& text) {
  if (text == "simulate") return ExperimentKind::kSimulate;
  if (text == "monitor") return ExperimentKind::kMonitor;
  if (text == "enforce") return ExperimentKind::kEnforce;
  if (text == "coverage") return ExperimentKind::kCoverage;
  if (text == "synthesize-shield") return ExperimentKind::kSynthesizeShield;
  throw ConfigError("experiment: unknown kind '" + text +
                    "' (simulate|monitor|enforce|coverage|synthesize-shield)");
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kMonitor: return "monitor";
    case ExperimentKind::kEnforce: return "enforce";
    case ExperimentKind::kCoverage: return "coverage";
    case ExperimentKind::kSynthesizeShield: return "synthesize-shield";
  }
  return "?";
}

MarkovDynamics read_markov(Reader& r, const std::filesystem::path& base_dir) {
  MarkovDynamics markov;
  markov.biases = to_list("biases", r.require("biases", "markov dynamics"));
  const std::size_t n = markov.biases.size();
  if (n == 0) throw ConfigError("biases: at least one coin required");
  markov.kernel.assign(n, {std::vector<double>(n, 0.0),
                           std::vector<double>(n, 0.0)});
  const auto kernel_path = r.get("kernel");
  const auto switch_text = r.get("switch");
  if (kernel_path.has_value() == switch_text.has_value()) {
    throw ConfigError("markov dynamics need exactly one of 'kernel' (CSV "
                      "coin,outcome,next,probability) or 'switch'");
  }
  if (kernel_path) {
    const auto rows = read_csv_rows(base_dir / *kernel_path, 4, "kernel");
    for (const auto& row : rows) {
      const auto k = to_u64("kernel", row[0]);
      const auto x = to_u64("kernel", row[1]);
      const auto next = to_u64("kernel", row[2]);
      if (k >= n || x > 1 || next >= n) {
        throw ConfigError("kernel: row out of range: " + row[0] + "," +
                          row[1] + "," + row[2]);
      }
      markov.kernel[k][x][next] = to_double("kernel", row[3]);
    }
  } else {
    // Stay with probability 1 - switch, move uniformly to another coin.
    const double eps = to_double("switch", *switch_text);
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("switch: must lie in [0, 1]");
    if (n == 1 && eps > 0.0) throw ConfigError("switch: needs two coins");
    for (std::size_t k = 0; k < n; ++k) {
      for (auto& row : markov.kernel[k]) {
        for (std::size_t next = 0; next < n; ++next) {
          row[next] = next == k ? 1.0 - eps
                                : eps / static_cast<double>(n - 1);
        }
      }
    }
  }
  const std::string initial = r.get("initial").value_or("stationary");
  if (initial == "stationary") {
    markov.initial.assign(n, 1.0 / static_cast<double>(n));
    const DynamicsSpec provisional = markov;
    try {
      validate(provisional);
      const InducedChain chain = induced_chain(provisional);
      markov.initial = coin_marginals(chain, stationary_distribution(chain));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("initial=stationary: ") + e.what());
    }
  } else {
    markov.initial = to_list("initial", initial);
  }
  return markov;
}

DynamicsSpec read_dynamics(Reader& r, const std::filesystem::path& base_dir) {
  const std::string kind = r.get("dynamics").value_or("constant");
  DynamicsSpec dynamics;
  if (kind == "constant") {
    dynamics = ConstantDynamics{r.number("bias", 0.5)};
  } else if (kind == "additive") {
    dynamics = AdditiveDynamics{r.number("initial_bias", 0.5),
                                r.number("shift_tail", 0.0),
                                r.number("shift_head", 0.0)};
  } else if (kind == "scripted") {
    dynamics = ScriptedDynamics{to_list("script", r.require("script", "scripted dynamics"))};
  } else if (kind == "markov") {
    dynamics = read_markov(r, base_dir);
  } else {
    throw ConfigError("dynamics: unknown kind '" + kind +
                      "' (constant|markov|additive|scripted)");
  }
  try {
    validate(dynamics);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dynamics: ") + e.what());
  }
  return dynamics;
}

TargetIntervalSchedule read_schedule(const std::filesystem::path& path) {
  TargetIntervalSchedule schedule;
  for (const auto& row : read_csv_rows(path, 3, "schedule")) {
    const auto t = to_u64("schedule", row[0]);
    if (t == 0) throw ConfigError("schedule: times start at 1");
    schedule.set(t, to_interval("schedule", row[1] + "," + row[2]));
  }
  return schedule;
}

bool is_markov(const DynamicsSpec& d) {
  return std::holds_alternative<MarkovDynamics>(d);
}

const ConstantDynamics& require_constant(const ExperimentConfig& c,
                                         const std::string& who) {
  const auto* constant = std::get_if<ConstantDynamics>(&c.dynamics);
  if (constant == nullptr) {
    throw ConfigError(who + " assumes a single coin of constant bias "
                      "(dynamics = constant)");
  }
  return *constant;
}

void check_monitor(const ExperimentConfig& c) {
  const std::string& m = c.monitor;
  if (m == "exact") {
    if (c.measure != MeasureKind::kOutcome || c.horizon != Horizon(0)) {
      if (c.measure == MeasureKind::kOutcome && c.horizon.is_infinite()) {
        throw ConfigError("exact monitor: no sound monitor exists for outcome "
                          "fairness at infinite horizon without assumptions "
                          "on the dynamics");
      }
      throw ConfigError("exact monitor observes outcome fairness at horizon 0 "
                        "only");
    }
  } else if (m == "static") {
    // Any measure and horizon; soundness assumes a constant coin.
  } else if (m == "hmm") {
    if (!c.horizon.is_infinite()) {
      throw ConfigError("hmm monitor: hidden Markov processes are monitored "
                        "only in the long-run limit (horizon = inf)");
    }
    if (!c.mixing_time && !is_markov(c.dynamics)) {
      throw ConfigError("hmm monitor: mixing_time = auto needs markov "
                        "dynamics to estimate from");
    }
    if (c.function_window == 0) throw ConfigError("function_window must be >= 1");
  } else if (m == "markov") {
    if (!is_markov(c.dynamics)) {
      throw ConfigError("markov monitor: requires observed markov dynamics "
                        "(coin labels must be visible)");
    }
    if (c.horizon.is_infinite()) {
      throw ConfigError("markov monitor: finite horizon required");
    }
    if (c.horizon.steps() > kMaxMarkovHorizon) {
      throw std::length_error("markov monitor horizon " +
                              std::to_string(c.horizon.steps()) +
                              " exceeds the cap " +
                              std::to_string(kMaxMarkovHorizon));
    }
    const auto coins = std::get<MarkovDynamics>(c.dynamics).coins();
    if (coins > kMaxMarkovCoins) {
      throw std::length_error("markov monitor supports at most " +
                              std::to_string(kMaxMarkovCoins) + " coins");
    }
  } else if (m == "additive") {
    if (!std::holds_alternative<AdditiveDynamics>(c.dynamics)) {
      throw ConfigError("additive monitor: requires additive dynamics (known "
                        "shifts)");
    }
    if (c.horizon != Horizon(0) || c.measure == MeasureKind::kOutcome) {
      throw ConfigError("additive monitor: supports current and bias fairness "
                        "at horizon 0");
    }
  } else {
    throw ConfigError("monitor: unknown kind '" + m +
                      "' (exact|static|markov|hmm|additive)");
  }
}

void check_enforcer(const ExperimentConfig& c) {
  const std::string& e = c.enforcer;
  auto need_target = [&] {
    if (!c.target) throw ConfigError(e + " enforcer: 'target = lo,hi' required");
  };
  if (e == "constant-bias") {
    if (!c.target && !c.schedule) {
      throw ConfigError("constant-bias enforcer: 'target' or 'schedule' "
                        "required");
    }
  } else if (e == "threshold") {
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
      throw ConfigError("threshold: must lie in [0, 1]");
    }
  } else if (e == "delta") {
    require_constant(c, "delta enforcer");
    need_target();
    if (c.steps > c.window) {
      throw ConfigError("delta enforcer: steps must not exceed the window");
    }
  } else if (e == "shield" || e == "periodic") {
    require_constant(c, e + " enforcer");
    need_target();
  } else if (e == "dynamic") {
    if (!is_count_determined(c.dynamics)) {
      throw ConfigError("dynamic shield: dynamics must be count-determined "
                        "(constant, additive or scripted)");
    }
    need_target();
  } else {
    throw ConfigError("enforcer: unknown kind '" + e +
                      "' (constant-bias|threshold|delta|shield|periodic|"
                      "dynamic)");
  }
}

std::string sanitize(std::string text) {
  for (char& ch : text) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return text;
}

void write_row(std::ostringstream& out) { out << '\n'; }

template <class First, class... Rest>
void write_row(std::ostringstream& out, const First& first,
               const Rest&... rest) {
  if constexpr (std::is_floating_point_v<First>) {
    out << format_number(first);
  } else {
    out << first;
  }
  if constexpr (sizeof...(rest) > 0) out << ',';
  write_row(out, rest...);
}

std::string meta_for(const ExperimentConfig& c) {
  return "config_hash=" + hash_hex(config_hash(c.raw)) +
         "\nexperiment=" + kind_name(c.kind) + "\n";
}

Artifact run_simulate(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "t,bias,outcome\n";
  Simulator simulator(c.dynamics, c.seed);
  for (std::size_t t = 1; t <= c.steps; ++t) {
    const auto toss = simulator.next();
    write_row(out, t, toss.bias, toss.outcome);
  }
  return {out.str(), meta_for(c), {}, kExitOk};
}

Artifact run_monitor(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "t,measure,horizon,mode,lo,hi,estimate\n";
  Simulator simulator(c.dynamics, c.seed);
  TrialMonitor monitor = make_monitor_builder(c)();
  const std::string measure(to_string(c.measure));
  const std::string horizon = c.horizon.to_string();
  const std::string mode(to_string(c.mode));
  for (std::size_t t = 1; t <= c.steps; ++t) {
    const auto toss = simulator.next();
    const auto v = monitor(toss, simulator.last_label());
    write_row(out, t, measure, horizon, mode, v.lo, v.hi, v.estimate);
  }
  return {out.str(), meta_for(c), {}, kExitOk};
}

Artifact run_coverage(const ExperimentConfig& c, int jobs) {
  if (c.steps == 0) throw ConfigError("coverage: steps must be >= 1");
  CoverageSetup setup;
  setup.monitor = make_monitor_builder(c);
  setup.dynamics = c.dynamics;
  setup.truth = make_truth(c);
  setup.horizon = c.steps;
  setup.trials = c.trials;
  setup.delta = c.delta;
  setup.mode = c.mode;
  setup.first_checked = c.first_checked;
  setup.seed = c.seed;
  const CoverageReport report = empirical_coverage(setup, jobs);
  std::ostringstream out;
  out << "config_hash,trials,hits,rate,margin\n";
  write_row(out, hash_hex(config_hash(c.raw)), report.trials, report.hits,
            report.rate, report.margin);
  return {out.str(), {}, {}, kExitOk};
}

struct EnforcementRow {
  BiasOutcomePair raw;
  BiasOutcomePair enforced;
  double cost = 0.0;
};

Artifact run_enforce(const ExperimentConfig& c) {
  const CostModel cost = CostModel::parse(c.cost);
  std::vector<EnforcementRow> rows;
  rows.reserve(c.steps);
  Artifact artifact;
  const std::string& e = c.enforcer;

  if (e == "constant-bias") {
    const TargetIntervalSchedule schedule =
        c.schedule ? *c.schedule
                   : TargetIntervalSchedule::constant(*c.target, c.steps);
    if (!schedule.intersection()) {
      throw InfeasibleError("target intervals have an empty intersection");
    }
    ConstantBiasEnforcer enforcer(schedule);
    Simulator simulator(c.dynamics, c.seed);
    Rng retoss(trial_seed(c.seed, 1));
    for (std::size_t t = 1; t <= c.steps; ++t) {
      const auto raw = simulator.next();
      rows.push_back({raw, enforcer.step(raw, retoss), 0.0});
    }
  } else if (e == "threshold") {
    std::optional<ThresholdOutcomeEnforcer> enforcer;
    if (c.schedule || c.target) {
      const TargetIntervalSchedule schedule =
          c.schedule ? *c.schedule
                     : TargetIntervalSchedule::constant(*c.target, c.steps);
      try {
        enforcer.emplace(c.threshold, schedule);
      } catch (const std::invalid_argument& err) {
        throw InfeasibleError(err.what());
      }
    } else {
      enforcer.emplace(c.threshold);
    }
    Simulator simulator(c.dynamics, c.seed);
    for (std::size_t t = 1; t <= c.steps; ++t) {
      const auto raw = simulator.next();
      const int out = enforcer->step(raw.outcome);
      rows.push_back({raw, {raw.bias, out}, cost(raw.bias, raw.outcome, out)});
    }
  } else if (e == "delta") {
    const double p = require_constant(c, "delta enforcer").bias;
    auto table = std::make_shared<const ReachTable>(
        ReachTable::build(p, c.window, *c.target));
    if (table->at(0, 0) <= 0.0) {
      throw InfeasibleError("the unenforced process cannot reach the target");
    }
    DeltaEnforcer enforcer(table, c.delta);
    Simulator simulator(c.dynamics, c.seed);
    for (std::size_t t = 1; t <= c.steps; ++t) {
      const auto raw = simulator.next();
      const int out = enforcer.step(raw.outcome);
      rows.push_back({raw, {raw.bias, out}, cost(raw.bias, raw.outcome, out)});
    }
  } else if (e == "shield" || e == "dynamic") {
    Shield shield = dynamic_shield(c.dynamics, c.window, *c.target, cost);
    if (!shield.table().feasible()) {
      throw InfeasibleError("no enforcer can meet the target (v(0,0) = inf)");
    }
    const BiasMap bias = bias_map_for(c.dynamics);
    Rng rng(c.seed);
    for (std::size_t t = 0; t < c.steps; ++t) {
      const double p = bias(t, shield.heads());
      const BiasOutcomePair raw{p, rng.bernoulli(p)};
      const ShieldStep step = shield.step(raw);
      rows.push_back({raw, step.enforced, step.cost});
    }
  } else if (e == "periodic") {
    const double p = require_constant(c, "periodic shield").bias;
    PeriodicShield shield(c.window, *c.target, BiasMap::constant(p), cost,
                          c.on_infeasible);
    Simulator simulator(c.dynamics, c.seed);
    for (std::size_t t = 1; t <= c.steps; ++t) {
      const auto raw = simulator.next();
      const ShieldStep step = shield.step(raw);
      rows.push_back({raw, step.enforced, step.cost});
    }
    for (const auto& event : shield.events()) {
      artifact.log.push_back(
          "saturated window at t=" + std::to_string(event.window_start) +
          ": requested heads [" + std::to_string(event.requested.lo) + "," +
          std::to_string(event.requested.hi) + "], used [" +
          std::to_string(event.used.lo) + "," + std::to_string(event.used.hi) +
          "]");
    }
  }

  std::ostringstream out;
  out << "t,raw_bias,raw_outcome,enf_bias,enf_outcome,step_cost,"
         "fairness_after\n";
  RunningFairness fairness;
  const MeasureKind reported =
      e == "constant-bias" ? MeasureKind::kBias : MeasureKind::kOutcome;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    fairness.push(row.enforced);
    write_row(out, i + 1, row.raw.bias, row.raw.outcome, row.enforced.bias,
              row.enforced.outcome, row.cost, fairness.evaluate(reported));
  }
  artifact.csv = out.str();
  artifact.meta = meta_for(c);
  return artifact;
}

Artifact run_synthesize(const ExperimentConfig& c) {
  const CostModel cost = CostModel::parse(c.cost);
  const ValueTable table = synthesize_value_table(bias_map_for(c.dynamics),
                                                  c.window, *c.target, cost);
  std::ostringstream out;
  table.write_csv(out);
  Artifact artifact{out.str(), meta_for(c), {}, kExitOk};
  if (!table.feasible()) {
    artifact.exit_code = kExitInfeasible;
    artifact.log.push_back("v(0,0) = inf: no outcome enforcer can meet the "
                           "target from the start");
  }
  return artifact;
}

}  // namespace

RawConfig parse_config(std::string_view text) {
  RawConfig config;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end - start);
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (!body.empty()) {
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": expected 'key = value'");
      }
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(line_number) + ": empty key");
      }
      if (!config.emplace(key, value).second) {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": duplicate key '" + key + "'");
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return config;
}

RawConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::uint64_t config_hash(const RawConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::string_view bytes) {
    for (unsigned char ch : bytes) {
      hash ^= ch;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : config) {
    if (key == "output") continue;
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

ExperimentConfig build_config(const RawConfig& raw,
                              const std::filesystem::path& base_dir) {
  Reader r(raw);
  ExperimentConfig c;
  c.raw = raw;
  c.kind = parse_kind(r.require("experiment", "experiment kind"));
  c.dynamics = read_dynamics(r, base_dir);

  try {
    if (auto v = r.get("measure")) c.measure = parse_measure(*v);
    if (auto v = r.get("horizon")) c.horizon = parse_horizon(*v);
    if (auto v = r.get("mode")) c.mode = parse_mode(*v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.delta = r.number("delta", c.delta);
  if (!(c.delta > 0.0 && c.delta < 1.0)) {
    throw ConfigError("delta: must lie in (0, 1)");
  }
  c.monitor = r.get("monitor").value_or(c.monitor);
  c.function_window = r.integer("function_window", c.function_window);
  if (auto v = r.get("mixing_time"); v && *v != "auto") {
    c.mixing_time = r.integer("mixing_time", 1);
    if (*c.mixing_time == 0) throw ConfigError("mixing_time: must be >= 1");
  }
  c.first_checked = r.integer("first_checked", c.first_checked);

  c.enforcer = r.get("enforcer").value_or(c.enforcer);
  c.threshold = r.number("threshold", c.threshold);
  c.window = r.integer("window", c.window);
  if (c.window == 0) throw ConfigError("window: must be >= 1");
  if (auto v = r.get("target")) c.target = to_interval("target", *v);
  if (auto v = r.get("schedule")) c.schedule = read_schedule(base_dir / *v);
  c.cost = r.get("cost").value_or(c.cost);
  if (c.cost != "unit" && c.cost != "bias-weighted") {
    throw ConfigError("cost: expected unit or bias-weighted");
  }
  if (auto v = r.get("on_infeasible")) {
    if (*v == "error") {
      c.on_infeasible = InfeasibleWindowPolicy::kError;
    } else if (*v == "saturate") {
      c.on_infeasible = InfeasibleWindowPolicy::kSaturate;
    } else {
      throw ConfigError("on_infeasible: expected error or saturate");
    }
  }

  const bool windowed = c.kind == ExperimentKind::kEnforce &&
                        (c.enforcer == "delta" || c.enforcer == "shield" ||
                         c.enforcer == "dynamic");
  c.steps = r.integer("steps", windowed ? c.window : c.steps);
  c.trials = r.integer("trials", c.trials);
  c.seed = r.integer("seed", c.seed);
  c.output = r.get("output");
  r.reject_unknown();

  switch (c.kind) {
    case ExperimentKind::kMonitor:
      check_monitor(c);
      break;
    case ExperimentKind::kCoverage:
      check_monitor(c);
      if (c.trials == 0) throw ConfigError("trials: must be >= 1");
      make_truth(c);
      break;
    case ExperimentKind::kEnforce:
      check_enforcer(c);
      break;
    case ExperimentKind::kSynthesizeShield:
      if (!is_count_determined(c.dynamics)) {
        throw ConfigError("synthesize-shield: dynamics must be "
                          "count-determined (constant, additive or scripted)");
      }
      if (!c.target) throw ConfigError("synthesize-shield: 'target' required");
      break;
    case ExperimentKind::kSimulate:
      break;
  }
  return c;
}

MonitorBuilder make_monitor_builder(const ExperimentConfig& c) {
  const std::string& m = c.monitor;
  if (m == "exact") {
    return [] {
      auto monitor = std::make_shared<ExactOutcomeMonitor>();
      return TrialMonitor([monitor](const BiasOutcomePair& toss,
                                    std::optional<std::size_t>) {
        return monitor->observe(toss.outcome);
      });
    };
  }
  if (m == "static") {
    const StaticMonitorOptions options{c.measure, c.horizon, c.mode, c.delta};
    return [options] {
      auto monitor = std::make_shared<StaticMonitor>(options);
      return TrialMonitor([monitor](const BiasOutcomePair& toss,
                                    std::optional<std::size_t>) {
        return monitor->observe(toss.outcome);
      });
    };
  }
  if (m == "hmm") {
    HmmMonitorOptions options;
    options.window = c.function_window;
    options.mode = c.mode;
    options.delta = c.delta;
    options.mixing_time =
        c.mixing_time ? *c.mixing_time
                      : estimate_mixing_time(induced_chain(c.dynamics));
    return [options] {
      auto monitor = std::make_shared<HmmMonitor>(options);
      return TrialMonitor([monitor](const BiasOutcomePair& toss,
                                    std::optional<std::size_t>) {
        return monitor->observe(toss.outcome);
      });
    };
  }
  if (m == "markov") {
    const MarkovMonitorOptions options{
        std::get<MarkovDynamics>(c.dynamics).coins(), c.horizon.steps(),
        c.mode, c.delta};
    const MeasureKind measure = c.measure;
    return [options, measure] {
      auto monitor = std::make_shared<MarkovMonitor>(options);
      return TrialMonitor([monitor, measure](const BiasOutcomePair& toss,
                                             std::optional<std::size_t> label) {
        if (!label) throw std::invalid_argument("markov monitor needs labels");
        const MarkovVerdict v = monitor->observe(*label, toss.outcome);
        switch (measure) {
          case MeasureKind::kCurrent: return v.current;
          case MeasureKind::kBias: return v.bias;
          case MeasureKind::kOutcome: return v.outcome;
        }
        return v.bias;
      });
    };
  }
  if (m == "additive") {
    const auto& a = std::get<AdditiveDynamics>(c.dynamics);
    const AdditiveMonitorOptions options{a.shift_on_tail, a.shift_on_head,
                                         c.mode, c.delta};
    const bool current = c.measure == MeasureKind::kCurrent;
    return [options, current] {
      auto monitor = std::make_shared<AdditiveMonitor>(options);
      return TrialMonitor([monitor, current](const BiasOutcomePair& toss,
                                             std::optional<std::size_t>) {
        const AdditiveVerdict v = monitor->observe(toss.outcome);
        return current ? v.current : v.bias;
      });
    };
  }
  throw ConfigError("monitor: unknown kind '" + m + "'");
}

TruthExtractor make_truth(const ExperimentConfig& c) {
  const MeasureKind measure = c.measure;
  const Horizon horizon = c.horizon;
  if (c.monitor == "exact") {
    return [](std::span<const BiasOutcomePair> prefix) {
      return outcome_fairness(prefix);
    };
  }
  if (c.monitor == "additive") {
    if (measure == MeasureKind::kCurrent) {
      return [](std::span<const BiasOutcomePair> prefix) {
        return prefix.back().bias;
      };
    }
    return [](std::span<const BiasOutcomePair> prefix) {
      return bias_fairness(prefix);
    };
  }
  if (const auto* constant = std::get_if<ConstantDynamics>(&c.dynamics)) {
    const double p = constant->bias;
    if (measure != MeasureKind::kOutcome || horizon.is_infinite()) {
      return [p](std::span<const BiasOutcomePair>) { return p; };
    }
    const double h = static_cast<double>(horizon.steps());
    return [p, h](std::span<const BiasOutcomePair> prefix) {
      double heads = 0.0;
      for (const auto& w : prefix) heads += w.outcome;
      return (heads + h * p) / (static_cast<double>(prefix.size()) + h);
    };
  }
  if (horizon.is_infinite()) {
    if (!is_markov(c.dynamics)) {
      throw ConfigError("no ground truth for the long-run limit of " +
                        describe(c.dynamics));
    }
    const InducedChain chain = induced_chain(c.dynamics);
    const double rate =
        stationary_head_rate(chain, stationary_distribution(chain));
    return [rate](std::span<const BiasOutcomePair>) { return rate; };
  }
  if (horizon.steps() > oracle::kMaxFairnessHorizon) {
    throw std::length_error("ground truth enumeration limited to horizon " +
                            std::to_string(oracle::kMaxFairnessHorizon));
  }
  const DynamicsSpec dynamics = c.dynamics;
  const std::size_t h = horizon.steps();
  return [dynamics, h, measure](std::span<const BiasOutcomePair> prefix) {
    return oracle::exact_runtime_fairness(dynamics, prefix, h, measure);
  };
}

Artifact run_experiment(const ExperimentConfig& config, int jobs) {
  switch (config.kind) {
    case ExperimentKind::kSimulate: return run_simulate(config);
    case ExperimentKind::kMonitor: return run_monitor(config);
    case ExperimentKind::kCoverage: return run_coverage(config, jobs);
    case ExperimentKind::kEnforce: return run_enforce(config);
    case ExperimentKind::kSynthesizeShield: return run_synthesize(config);
  }
  throw std::logic_error("unhandled experiment kind");
}

void write_atomic(const std::filesystem::path& path, const std::string& data) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + temp.string() + "'");
    out << data;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + temp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw std::runtime_error("cannot rename onto '" + path.string() +
                             "': " + ec.message());
  }
}

int run_cli(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    RawConfig raw = load_config_file(options.config);
    if (options.seed) raw["seed"] = std::to_string(*options.seed);
    if (options.out) raw["output"] = *options.out;
    const ExperimentConfig config =
        build_config(raw, options.config.parent_path());
    const Artifact artifact = run_experiment(config, options.jobs);
    for (const auto& line : artifact.log) err << "note: " << sanitize(line) << '\n';
    if (config.output) {
      const std::filesystem::path path = *config.output;
      write_atomic(path, artifact.csv);
      if (!artifact.meta.empty()) {
        std::filesystem::path meta = path;
        meta += ".meta";
        write_atomic(meta, artifact.meta);
      }
    } else {
      out << artifact.csv;
    }
    if (artifact.exit_code == kExitInfeasible) {
      err << "error=infeasible value table is infinite at the start state\n";
    }
    return artifact.exit_code;
  } catch (const ConfigError& e) {
    err << "error=config " << sanitize(e.what()) << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "error=infeasible " << sanitize(e.what()) << '\n';
    return kExitInfeasible;
  } catch (const std::length_error& e) {
    err << "error=cap " << sanitize(e.what()) << '\n';
    return kExitCap;
  } catch (const std::invalid_argument& e) {
    err << "error=config " << sanitize(e.what()) << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error=internal " << sanitize(e.what()) << '\n';
    return kExitInternal;
  }
}

}  // namespace fairwatch::harness
