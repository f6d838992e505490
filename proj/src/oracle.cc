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

#include "fairwatch/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairwatch::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool condition, const std::string& message) {
  if (!condition) throw std::length_error(message);
}

bool lands_in(const Interval& target, std::size_t heads, std::size_t length) {
  const double fraction =
      static_cast<double>(heads) / static_cast<double>(length);
  return fraction >= target.lo - kFairnessTolerance &&
         fraction <= target.hi + kFairnessTolerance;
}

struct TreeSearch {
  const HistoryBias& bias;
  std::size_t window;
  const Interval& target;
  const FlipCost& cost;
  std::vector<int> history;

  double flip(double p, int from, int to) const {
    return from == to ? 0.0 : cost(p, from, to);
  }

  // Optimal expected cost from the current history node.
  double solve() {
    if (history.size() == window) {
      std::size_t heads = 0;
      for (int x : history) heads += static_cast<std::size_t>(x);
      return lands_in(target, heads, window) ? 0.0 : kInf;
    }
    const double p = bias(history);
    double children[2];
    for (int e = 0; e < 2; ++e) {
      history.push_back(e);
      children[e] = solve();
      history.pop_back();
    }
    double total = 0.0;
    for (int raw = 0; raw < 2; ++raw) {
      const double weight = raw == 1 ? p : 1.0 - p;
      if (weight == 0.0) continue;
      double best = kInf;
      for (int e = 0; e < 2; ++e) {
        if (children[e] == kInf) continue;
        best = std::min(best, flip(p, raw, e) + children[e]);
      }
      if (best == kInf) return kInf;
      total += weight * best;
    }
    return total;
  }
};

struct Continuation {
  const DynamicsSpec& dynamics;
  MeasureKind measure;
  std::vector<BiasOutcomePair> trace;

  double value_of_trace() const {
    if (trace.empty()) throw std::domain_error("measure of an empty trace");
    const double n = static_cast<double>(trace.size());
    switch (measure) {
      case MeasureKind::kOutcome: {
        double heads = 0.0;
        for (const auto& w : trace) heads += w.outcome;
        return heads / n;
      }
      case MeasureKind::kBias: {
        long double sum = 0.0L;
        for (const auto& w : trace) sum += w.bias;
        return static_cast<double>(sum / n);
      }
      case MeasureKind::kCurrent:
        return trace.back().bias;
    }
    return 0.0;
  }

  // (bias, probability) pairs for the next coin.
  std::vector<std::pair<double, double>> next_coins() const {
    const std::size_t t = trace.size();
    std::vector<std::pair<double, double>> coins;
    if (const auto* c = std::get_if<ConstantDynamics>(&dynamics)) {
      coins.emplace_back(c->bias, 1.0);
    } else if (const auto* m = std::get_if<MarkovDynamics>(&dynamics)) {
      std::vector<double> law;
      if (t == 0) {
        law = m->initial;
      } else {
        const auto& last = trace.back();
        std::size_t label = m->biases.size();
        for (std::size_t k = 0; k < m->biases.size(); ++k) {
          if (m->biases[k] == last.bias) label = k;
        }
        if (label == m->biases.size()) {
          throw std::invalid_argument("prefix bias is not a coin of the chain");
        }
        law = m->kernel[label][static_cast<std::size_t>(last.outcome)];
      }
      for (std::size_t k = 0; k < law.size(); ++k) {
        if (law[k] > 0.0) coins.emplace_back(m->biases[k], law[k]);
      }
    } else if (const auto* a = std::get_if<AdditiveDynamics>(&dynamics)) {
      if (t == 0) {
        coins.emplace_back(a->initial_bias, 1.0);
      } else {
        const auto& last = trace.back();
        const double step =
            last.outcome == 1 ? a->shift_on_head : a->shift_on_tail;
        coins.emplace_back(std::clamp(last.bias + step, 0.0, 1.0), 1.0);
      }
    } else {
      const auto& s = std::get<ScriptedDynamics>(dynamics);
      if (t >= s.biases.size()) {
        throw std::invalid_argument("scripted dynamics too short for horizon");
      }
      coins.emplace_back(s.biases[t], 1.0);
    }
    return coins;
  }

  double expectation(std::size_t remaining) {
    if (remaining == 0) return value_of_trace();
    double total = 0.0;
    for (const auto& [bias, weight] : next_coins()) {
      for (int x = 0; x < 2; ++x) {
        const double px = x == 1 ? bias : 1.0 - bias;
        if (px == 0.0) continue;
        trace.push_back({bias, x});
        total += weight * px * expectation(remaining - 1);
        trace.pop_back();
      }
    }
    return total;
  }
};

}  // namespace

double enumerate_reach_probability(double bias, std::size_t window,
                                   const Interval& target, std::size_t t,
                                   std::size_t h) {
  if (t > window || h > t) throw std::invalid_argument("state out of range");
  const std::size_t suffix = window - t;
  require(suffix <= kMaxReachSuffix,
          "reach enumeration limited to " + std::to_string(kMaxReachSuffix) +
              " remaining tosses");
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << suffix); ++mask) {
    std::size_t heads = 0;
    double weight = 1.0;
    for (std::size_t i = 0; i < suffix; ++i) {
      const bool head = (mask >> i) & 1U;
      heads += head ? 1 : 0;
      weight *= head ? bias : 1.0 - bias;
    }
    if (lands_in(target, h + heads, window)) total += weight;
  }
  return total;
}

HistoryBias history_bias(const DynamicsSpec& dynamics) {
  if (const auto* c = std::get_if<ConstantDynamics>(&dynamics)) {
    const double p = c->bias;
    return [p](std::span<const int>) { return p; };
  }
  if (const auto* a = std::get_if<AdditiveDynamics>(&dynamics)) {
    const AdditiveDynamics d = *a;
    return [d](std::span<const int> history) {
      double value = d.initial_bias;
      for (int x : history) value += x == 1 ? d.shift_on_head : d.shift_on_tail;
      return std::min(1.0, std::max(0.0, value));
    };
  }
  if (const auto* s = std::get_if<ScriptedDynamics>(&dynamics)) {
    const std::vector<double> biases = s->biases;
    return [biases](std::span<const int> history) {
      return biases.at(history.size());
    };
  }
  throw std::invalid_argument("history bias needs constant, additive or "
                              "scripted dynamics");
}

double enumerate_optimal_cost(const HistoryBias& bias, std::size_t window,
                              const Interval& target, const FlipCost& cost) {
  if (window == 0) throw std::invalid_argument("window must be >= 1");
  require(window <= kMaxCostWindow,
          "cost enumeration limited to windows of " +
              std::to_string(kMaxCostWindow));
  TreeSearch search{bias, window, target, cost, {}};
  search.history.reserve(window);
  return search.solve();
}

double exact_runtime_fairness(const DynamicsSpec& dynamics,
                              std::span<const BiasOutcomePair> prefix,
                              std::size_t horizon, MeasureKind measure) {
  require(horizon <= kMaxFairnessHorizon,
          "runtime fairness enumeration limited to horizon " +
              std::to_string(kMaxFairnessHorizon));
  Continuation walk{dynamics, measure,
                    std::vector<BiasOutcomePair>(prefix.begin(), prefix.end())};
  return walk.expectation(horizon);
}

}  // namespace fairwatch::oracle
