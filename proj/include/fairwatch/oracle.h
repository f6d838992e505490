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

#ifndef FAIRWATCH_ORACLE_H_
#define FAIRWATCH_ORACLE_H_

// Brute-force references. Exponential time, hard size caps, and no shared
// code with the dynamic programs and monitors they check.

#include <cstddef>
#include <functional>
#include <span>

#include "fairwatch/dynamics.h"
#include "fairwatch/fairness.h"

namespace fairwatch::oracle {

inline constexpr std::size_t kMaxReachSuffix = 24;
inline constexpr std::size_t kMaxCostWindow = 12;
inline constexpr std::size_t kMaxFairnessHorizon = 8;

// Probability that a constant coin with bias p ends the window of length T
// with head fraction in `target`, given t tosses with h heads, by summing
// over every suffix. Throws std::length_error when T - t exceeds the cap.
double enumerate_reach_probability(double bias, std::size_t window,
                                   const Interval& target, std::size_t t,
                                   std::size_t h);

// Head-probability of the next coin given the full enforced history.
using HistoryBias = std::function<double(std::span<const int> history)>;
// Flip cost c(bias, from, to).
using FlipCost = std::function<double(double bias, int from, int to)>;

// History-level bias for constant, additive (shifts accumulated then
// clamped) and scripted dynamics. Throws std::invalid_argument otherwise.
HistoryBias history_bias(const DynamicsSpec& dynamics);

// Minimal expected enforcement cost over all deterministic history-dependent
// outcome-enforcement policies, by backward induction over the full binary
// history tree. +inf when no policy meets the target. Throws
// std::length_error for T above the cap.
double enumerate_optimal_cost(const HistoryBias& bias, std::size_t window,
                              const Interval& target, const FlipCost& cost);

// E[measure(W_{1:t+h}) | w_{1:t}] by enumerating every (coin, outcome)
// continuation of length h. Markov coins are identified by their bias.
// Throws std::length_error for h above the cap and std::invalid_argument
// when the prefix is inconsistent with the dynamics.
double exact_runtime_fairness(const DynamicsSpec& dynamics,
                              std::span<const BiasOutcomePair> prefix,
                              std::size_t horizon, MeasureKind measure);

}  // namespace fairwatch::oracle

#endif  // FAIRWATCH_ORACLE_H_
