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

#include "fairwatch/markov_monitor.h"

#include <algorithm>
#include <stdexcept>
#include <string>


namespace fairwatch {

namespace {

void check_caps(std::size_t coins, std::size_t horizon) {
  if (coins == 0) throw std::invalid_argument("at least one coin required");
  if (coins > kMaxMarkovCoins || horizon > kMaxMarkovHorizon) {
    throw std::length_error(
        "markov monitor supports at most " + std::to_string(kMaxMarkovCoins) +
        " coins and horizon " + std::to_string(kMaxMarkovHorizon) + ", got " +
        std::to_string(coins) + " coins and horizon " +
        std::to_string(horizon));
  }
}

enum class End { kLower, kUpper };

double pick(const Interval& interval, End end) {
  return end == End::kLower ? interval.lo : interval.hi;
}

// Evaluates E[p_{t+j} | (label, outcome)] for j = 0..horizon with every
// quantity at its `end` endpoint. Complements 1 - p use the opposite end.
std::vector<double> propagate(const TransitionBounds& bounds,
                              std::size_t label, int outcome,
                              std::size_t horizon, End end) {
  const std::size_t n = bounds.coins;
  const End opposite = end == End::kLower ? End::kUpper : End::kLower;
  std::vector<double> values;
  values.reserve(horizon + 1);
  values.push_back(pick(bounds.bias[label], end));
  if (horizon == 0) return values;

  std::vector<double> coin_mass(n);
  for (std::size_t k = 0; k < n; ++k) {
    coin_mass[k] = pick(bounds.kernel(label, outcome, k), end);
  }
  std::vector<double> next(n);
  for (std::size_t j = 1; j <= horizon; ++j) {
    if (j > 1) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        if (coin_mass[k] == 0.0) continue;
        const double heads = pick(bounds.bias[k], end);
        const double tails = 1.0 - pick(bounds.bias[k], opposite);
        for (std::size_t k2 = 0; k2 < n; ++k2) {
          next[k2] += coin_mass[k] *
                      (heads * pick(bounds.kernel(k, 1, k2), end) +
                       tails * pick(bounds.kernel(k, 0, k2), end));
        }
      }
      // Each true entry is a probability, so clipping keeps the bound sound.
      for (std::size_t k = 0; k < n; ++k) coin_mass[k] = std::min(next[k], 1.0);
    }
    double expectation = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      expectation += coin_mass[k] * pick(bounds.bias[k], end);
    }
    values.push_back(std::min(expectation, 1.0));
  }
  return values;
}

}  // namespace

TransitionBounds TransitionBounds::unknown(std::size_t coins) {
  TransitionBounds bounds;
  bounds.coins = coins;
  bounds.bias.assign(coins, Interval::unit());
  bounds.next_coin.assign(2 * coins * coins, Interval::unit());
  return bounds;
}

TransitionBounds TransitionBounds::exact(const MarkovDynamics& dynamics) {
  TransitionBounds bounds = unknown(dynamics.coins());
  for (std::size_t k = 0; k < dynamics.coins(); ++k) {
    bounds.bias[k] = {dynamics.biases[k], dynamics.biases[k]};
    for (int x = 0; x < 2; ++x) {
      for (std::size_t k2 = 0; k2 < dynamics.coins(); ++k2) {
        const double p = dynamics.transition(k, x, k2);
        bounds.kernel(k, x, k2) = {p, p};
      }
    }
  }
  return bounds;
}

std::vector<Interval> expected_future_bias_bounds(
    const TransitionBounds& bounds, std::size_t label, int outcome,
    std::size_t horizon) {
  check_caps(bounds.coins, horizon);
  if (label >= bounds.coins) throw std::out_of_range("unknown coin label");
  const auto lower = propagate(bounds, label, outcome, horizon, End::kLower);
  const auto upper = propagate(bounds, label, outcome, horizon, End::kUpper);
  std::vector<Interval> result(horizon + 1);
  for (std::size_t j = 0; j <= horizon; ++j) {
    result[j] = {std::clamp(lower[j], 0.0, 1.0),
                 std::clamp(upper[j], 0.0, 1.0)};
  }
  return result;
}

Interval current_fairness_bounds(const TransitionBounds& bounds,
                                 std::size_t label, int outcome,
                                 std::size_t horizon) {
  return expected_future_bias_bounds(bounds, label, outcome, horizon).back();
}

MarkovMonitor::MarkovMonitor(const MarkovMonitorOptions& options)
    : options_(options) {
  check_caps(options_.coins, options_.horizon);
  validate_delta(options_.delta);
  const std::size_t n = options_.coins;
  visits_.assign(n, 0);
  heads_.assign(n, 0);
  exits_.assign(2 * n, 0);
  transitions_.assign(2 * n * n, 0);
}

std::size_t MarkovMonitor::monitored_quantities() const {
  const std::size_t n = options_.coins;
  return n + 2 * n * n;
}

double MarkovMonitor::per_quantity_delta() const {
  return options_.delta / static_cast<double>(monitored_quantities());
}

Interval MarkovMonitor::mean_bounds(std::uint64_t successes,
                                    std::uint64_t trials) const {
  if (trials == 0) return Interval::unit();
  const double eps = mean_radius(trials, per_quantity_delta(), options_.mode);
  const double mean =
      static_cast<double>(successes) / static_cast<double>(trials);
  return {std::max(0.0, mean - eps), std::min(1.0, mean + eps)};
}

TransitionBounds MarkovMonitor::bounds() const {
  const std::size_t n = options_.coins;
  TransitionBounds bounds = TransitionBounds::unknown(n);
  for (std::size_t k = 0; k < n; ++k) {
    bounds.bias[k] = mean_bounds(heads_[k], visits_[k]);
    for (int x = 0; x < 2; ++x) {
      const std::size_t pair = 2 * k + static_cast<std::size_t>(x);
      for (std::size_t k2 = 0; k2 < n; ++k2) {
        bounds.kernel(k, x, k2) =
            mean_bounds(transitions_[pair * n + k2], exits_[pair]);
      }
    }
  }
  return bounds;
}

MarkovVerdict MarkovMonitor::observe(std::size_t label, int outcome) {
  const std::size_t n = options_.coins;
  if (label >= n) throw std::out_of_range("coin label out of range");
  if (outcome != 0 && outcome != 1) {
    throw std::invalid_argument("outcome must be 0 or 1");
  }
  if (last_pair_) {
    ++exits_[*last_pair_];
    ++transitions_[*last_pair_ * n + label];
  }
  ++visits_[label];
  heads_[label] += static_cast<std::uint64_t>(outcome);
  total_heads_ += static_cast<std::uint64_t>(outcome);
  last_pair_ = 2 * label + static_cast<std::size_t>(outcome);
  ++steps_;

  // Point estimates: empirical frequencies, with uninformed defaults for
  // states never seen.
  TransitionBounds point = TransitionBounds::unknown(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = visits_[k] == 0 ? 0.5
                                     : static_cast<double>(heads_[k]) /
                                           static_cast<double>(visits_[k]);
    point.bias[k] = {p, p};
    for (int x = 0; x < 2; ++x) {
      const std::size_t pair = 2 * k + static_cast<std::size_t>(x);
      for (std::size_t k2 = 0; k2 < n; ++k2) {
        const double q =
            exits_[pair] == 0
                ? 1.0 / static_cast<double>(n)
                : static_cast<double>(transitions_[pair * n + k2]) /
                      static_cast<double>(exits_[pair]);
        point.kernel(k, x, k2) = {q, q};
      }
    }
  }

  MarkovVerdict verdict;
  verdict.transitions = bounds();
  const std::size_t h = options_.horizon;
  const auto future =
      expected_future_bias_bounds(verdict.transitions, label, outcome, h);
  const auto future_point = expected_future_bias_bounds(point, label, outcome, h);

  verdict.current = make_interval(future[h].lo, future[h].hi,
                                  future_point[h].lo, options_.delta,
                                  options_.mode);

  // Realized part from visit counts; expected part from the future biases.
  double realized_lo = 0.0;
  double realized_hi = 0.0;
  double realized_point = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double visits = static_cast<double>(visits_[k]);
    realized_lo += visits * verdict.transitions.bias[k].lo;
    realized_hi += visits * verdict.transitions.bias[k].hi;
    realized_point += visits * point.bias[k].lo;
  }
  double future_lo = 0.0;
  double future_hi = 0.0;
  double future_mid = 0.0;
  for (std::size_t j = 1; j <= h; ++j) {
    future_lo += future[j].lo;
    future_hi += future[j].hi;
    future_mid += future_point[j].lo;
  }
  const double total = static_cast<double>(steps_ + h);
  verdict.bias = make_interval((realized_lo + future_lo) / total,
                               (realized_hi + future_hi) / total,
                               (realized_point + future_mid) / total,
                               options_.delta, options_.mode);
  const double heads = static_cast<double>(total_heads_);
  verdict.outcome = make_interval((heads + future_lo) / total,
                                  (heads + future_hi) / total,
                                  (heads + future_mid) / total,
                                  options_.delta, options_.mode);
  return verdict;
}

}  // namespace fairwatch
