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

#include "fairwatch/shield.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "fairwatch/errors.h"

namespace fairwatch {

namespace {

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

double parse_double(std::string_view text) {
  if (text == "inf") return kInfiniteCost;
  std::string copy(text);
  std::size_t used = 0;
  const double value = std::stod(copy, &used);
  if (used != copy.size()) {
    throw std::invalid_argument("malformed number '" + copy + "'");
  }
  return value;
}

// a + b with +inf saturating.
double saturating_add(double a, double b) {
  if (a == kInfiniteCost || b == kInfiniteCost) return kInfiniteCost;
  return a + b;
}

// weight * value where a zero weight neutralizes an infinite value.
double weighted(double weight, double value) {
  if (weight == 0.0) return 0.0;
  if (value == kInfiniteCost) return kInfiniteCost;
  return weight * value;
}

}  // namespace

BiasMap::BiasMap(Function function, std::string descriptor)
    : function_(std::move(function)), descriptor_(std::move(descriptor)) {
  if (!function_) throw std::invalid_argument("bias map function required");
}

BiasMap BiasMap::constant(double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    throw std::invalid_argument("bias must lie in [0, 1]");
  }
  return BiasMap([bias](std::size_t, std::size_t) { return bias; },
                 "constant:" + format_double(bias));
}

BiasMap BiasMap::additive(const AdditiveDynamics& dynamics) {
  return BiasMap(
      [dynamics](std::size_t t, std::size_t h) {
        const double value =
            dynamics.initial_bias +
            static_cast<double>(h) * dynamics.shift_on_head +
            static_cast<double>(t - h) * dynamics.shift_on_tail;
        return std::clamp(value, 0.0, 1.0);
      },
      "additive:" + format_double(dynamics.initial_bias) + ":" +
          format_double(dynamics.shift_on_tail) + ":" +
          format_double(dynamics.shift_on_head));
}

BiasMap BiasMap::scripted(std::vector<double> biases) {
  const std::size_t length = biases.size();
  return BiasMap(
      [biases = std::move(biases)](std::size_t t, std::size_t) {
        if (t >= biases.size()) {
          throw std::out_of_range("scripted bias map exhausted at t=" +
                                  std::to_string(t));
        }
        return biases[t];
      },
      "scripted:len=" + std::to_string(length));
}

double BiasMap::operator()(std::size_t t, std::size_t h) const {
  return function_(t, h);
}

BiasMap bias_map_for(const DynamicsSpec& dynamics) {
  const DynamicsSpec canonical = canonicalize(dynamics);
  if (const auto* c = std::get_if<ConstantDynamics>(&canonical)) {
    return BiasMap::constant(c->bias);
  }
  if (const auto* a = std::get_if<AdditiveDynamics>(&canonical)) {
    return BiasMap::additive(*a);
  }
  if (const auto* s = std::get_if<ScriptedDynamics>(&canonical)) {
    return BiasMap::scripted(s->biases);
  }
  throw std::invalid_argument(
      "shield synthesis requires count-determined dynamics (bias a function "
      "of tosses and heads); got " +
      describe(dynamics));
}

CostModel::CostModel(Function flip_cost, std::string descriptor)
    : flip_cost_(std::move(flip_cost)), descriptor_(std::move(descriptor)) {
  if (!flip_cost_) throw std::invalid_argument("flip cost function required");
}

CostModel CostModel::unit() {
  return CostModel([](double, int, int) { return 1.0; }, "unit");
}

CostModel CostModel::bias_weighted() {
  return CostModel(
      [](double bias, int from, int) { return from == 1 ? bias : 1.0 - bias; },
      "bias-weighted");
}

CostModel CostModel::parse(const std::string& name) {
  if (name == "unit") return unit();
  if (name == "bias-weighted") return bias_weighted();
  throw std::invalid_argument("unknown cost model '" + name +
                              "' (expected unit or bias-weighted)");
}

double CostModel::operator()(double bias, int from, int to) const {
  if (from == to) return 0.0;
  const double c = flip_cost_(bias, from, to);
  if (!(c >= 0.0)) throw std::domain_error("flip cost must be non-negative");
  return c;
}

ValueTable synthesize_value_table(const BiasMap& bias, std::size_t window,
                                  const HeadsRange& target_heads,
                                  const CostModel& cost) {
  if (window == 0) throw std::invalid_argument("window must be >= 1");
  ValueTable table;
  table.window_ = window;
  table.target_ = target_heads;
  const double length = static_cast<double>(window);
  table.interval_ = target_heads.empty()
                        ? Interval{1.0, 0.0}
                        : Interval{std::max(0.0, target_heads.lo / length),
                                   std::min(1.0, target_heads.hi / length)};
  table.bias_descriptor_ = bias.descriptor();
  table.cost_descriptor_ = cost.descriptor();
  table.rows_.resize(window + 1);

  auto& last = table.rows_[window];
  last.resize(window + 1);
  for (std::size_t h = 0; h <= window; ++h) {
    last[h] = target_heads.contains(static_cast<std::int64_t>(h))
                  ? 0.0
                  : kInfiniteCost;
  }
  for (std::size_t t = window; t-- > 0;) {
    const auto& next = table.rows_[t + 1];
    auto& row = table.rows_[t];
    row.resize(t + 1);
    for (std::size_t h = 0; h <= t; ++h) {
      const double p = bias(t, h);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("bias map returned a value outside [0, 1]");
      }
      const double on_head =
          std::min(next[h + 1], saturating_add(cost(p, 1, 0), next[h]));
      const double on_tail =
          std::min(next[h], saturating_add(cost(p, 0, 1), next[h + 1]));
      row[h] = saturating_add(weighted(p, on_head), weighted(1.0 - p, on_tail));
    }
  }
  return table;
}

ValueTable synthesize_value_table(const BiasMap& bias, std::size_t window,
                                  const Interval& target,
                                  const CostModel& cost) {
  validate(target);
  ValueTable table = synthesize_value_table(
      bias, window, heads_range(target, window), cost);
  table.interval_ = target;
  return table;
}

void ValueTable::write_csv(std::ostream& out) const {
  out << "# fairwatch-value-table v1\n";
  out << "# T=" << window_ << "\n";
  out << "# interval=" << format_double(interval_.lo) << ","
      << format_double(interval_.hi) << "\n";
  out << "# heads=" << target_.lo << "," << target_.hi << "\n";
  out << "# bias_map=" << bias_descriptor_ << "\n";
  out << "# cost=" << cost_descriptor_ << "\n";
  out << "t,h,v\n";
  for (std::size_t t = 0; t <= window_; ++t) {
    for (std::size_t h = 0; h <= t; ++h) {
      out << t << "," << h << "," << format_double(rows_[t][h]) << "\n";
    }
  }
}

ValueTable ValueTable::read_csv(std::istream& in) {
  ValueTable table;
  std::string line;
  if (!std::getline(in, line) || line != "# fairwatch-value-table v1") {
    throw std::invalid_argument("not a fairwatch value table (bad header)");
  }
  bool have_window = false;
  std::size_t expected_rows = 0;
  std::size_t seen_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "T") {
        table.window_ = std::stoull(value);
        have_window = true;
        table.rows_.assign(table.window_ + 1, {});
        for (std::size_t t = 0; t <= table.window_; ++t) {
          table.rows_[t].assign(t + 1, kInfiniteCost);
        }
        expected_rows = (table.window_ + 1) * (table.window_ + 2) / 2;
      } else if (key == "interval" || key == "heads") {
        const auto comma = value.find(',');
        if (comma == std::string::npos) {
          throw std::invalid_argument("malformed " + key + " line");
        }
        if (key == "interval") {
          table.interval_ = {parse_double(value.substr(0, comma)),
                             parse_double(value.substr(comma + 1))};
        } else {
          table.target_ = {std::stoll(value.substr(0, comma)),
                           std::stoll(value.substr(comma + 1))};
        }
      } else if (key == "bias_map") {
        table.bias_descriptor_ = value;
      } else if (key == "cost") {
        table.cost_descriptor_ = value;
      }
      continue;
    }
    if (line == "t,h,v") continue;
    if (!have_window) throw std::invalid_argument("value table lacks T");
    std::istringstream fields(line);
    std::string t_text, h_text, v_text;
    if (!std::getline(fields, t_text, ',') ||
        !std::getline(fields, h_text, ',') || !std::getline(fields, v_text)) {
      throw std::invalid_argument("malformed value table row '" + line + "'");
    }
    const std::size_t t = std::stoull(t_text);
    const std::size_t h = std::stoull(h_text);
    if (t > table.window_ || h > t) {
      throw std::invalid_argument("value table row out of range: " + line);
    }
    table.rows_[t][h] = parse_double(v_text);
    ++seen_rows;
  }
  if (!have_window || seen_rows != expected_rows) {
    throw std::invalid_argument("value table is incomplete");
  }
  return table;
}

Shield::Shield(std::shared_ptr<const ValueTable> table, BiasMap bias,
               CostModel cost)
    : table_(std::move(table)), bias_(std::move(bias)), cost_(std::move(cost)) {
  if (!table_) throw std::invalid_argument("value table required");
}

int Shield::decide(std::size_t t, std::size_t h, int raw_outcome) const {
  const int other = 1 - raw_outcome;
  const double p = bias_(t, h);
  const double keep = table_->at(t + 1, h + static_cast<std::size_t>(raw_outcome));
  const double flip = saturating_add(
      cost_(p, raw_outcome, other),
      table_->at(t + 1, h + static_cast<std::size_t>(other)));
  if (keep == kInfiniteCost && flip == kInfiniteCost) {
    throw InfeasibleError("no enforced outcome keeps the window feasible at t=" +
                          std::to_string(t) + ", h=" + std::to_string(h));
  }
  return keep <= flip ? raw_outcome : other;
}

ShieldStep Shield::step(const BiasOutcomePair& raw) {
  validate(raw);
  ShieldStep result{raw, 0.0, false};
  if (steps_ < table_->window()) {
    const int enforced = decide(steps_, heads_, raw.outcome);
    if (enforced != raw.outcome) {
      result.enforced.outcome = enforced;
      result.flipped = true;
      result.cost = cost_(bias_(steps_, heads_), raw.outcome, enforced);
    }
  }
  ++steps_;
  heads_ += static_cast<std::size_t>(result.enforced.outcome);
  total_cost_ += result.cost;
  return result;
}

HeadsRange window_target(const Interval& target, std::size_t window,
                         std::size_t window_start, std::size_t heads_so_far) {
  const HeadsRange overall = heads_range(target, window_start + window);
  const auto offset = static_cast<std::int64_t>(heads_so_far);
  HeadsRange local{overall.lo - offset, overall.hi - offset};
  local.lo = std::max<std::int64_t>(local.lo, 0);
  local.hi = std::min<std::int64_t>(local.hi, static_cast<std::int64_t>(window));
  return local;
}

PeriodicShield::PeriodicShield(std::size_t window, const Interval& target,
                               BiasMap bias, CostModel cost,
                               InfeasibleWindowPolicy policy)
    : window_(window),
      target_(target),
      bias_(std::move(bias)),
      cost_(std::move(cost)),
      policy_(policy) {
  if (window_ == 0) throw std::invalid_argument("window must be >= 1");
  validate(target_);
}

void PeriodicShield::start_window() {
  const HeadsRange requested =
      window_target(target_, window_, steps_, heads_);
  HeadsRange used = requested;
  if (requested.empty()) {
    if (policy_ == InfeasibleWindowPolicy::kError) {
      throw InfeasibleError(
          "window starting at t=" + std::to_string(steps_) +
          " cannot reach the target with " + std::to_string(heads_) +
          " accumulated heads");
    }
    // Head count closest to the target fraction at the window end, then
    // clipped to what one window can add.
    const double length = static_cast<double>(steps_ + window_);
    const double wanted = std::round(0.5 * (target_.lo + target_.hi) * length) -
                          static_cast<double>(heads_);
    const auto top = static_cast<std::int64_t>(window_);
    const auto heads = std::clamp(static_cast<std::int64_t>(wanted),
                                  std::int64_t{0}, top);
    used = HeadsRange{heads, heads};
    events_.push_back({steps_, requested, used});
  }
  auto table = std::make_shared<const ValueTable>(
      synthesize_value_table(bias_, window_, used, cost_));
  current_ = std::make_unique<Shield>(std::move(table), bias_, cost_);
}

ShieldStep PeriodicShield::step(const BiasOutcomePair& raw) {
  if (steps_ % window_ == 0) start_window();
  const ShieldStep result = current_->step(raw);
  ++steps_;
  heads_ += static_cast<std::size_t>(result.enforced.outcome);
  total_cost_ += result.cost;
  return result;
}

Shield dynamic_shield(const DynamicsSpec& dynamics, std::size_t window,
                      const Interval& target, const CostModel& cost) {
  validate(dynamics);
  BiasMap bias = bias_map_for(dynamics);
  auto table = std::make_shared<const ValueTable>(
      synthesize_value_table(bias, window, target, cost));
  return Shield(std::move(table), std::move(bias), cost);
}

}  // namespace fairwatch
