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

#ifndef FAIRWATCH_COVERAGE_H_
#define FAIRWATCH_COVERAGE_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "fairwatch/confidence.h"
#include "fairwatch/dynamics.h"
#include "fairwatch/fairness.h"
#include "fairwatch/rng.h"

namespace fairwatch {

// Worker count: `jobs` if positive, otherwise the OpenMP default.
inline int resolve_jobs(int jobs) {
  return jobs > 0 ? jobs : omp_get_max_threads();
}

// Runs fn(i) for i in [0, trials) in order and returns the results indexed
// by trial. Reference for parallel_map_trials.
template <class Fn>
auto serial_map_trials(std::size_t trials, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  std::vector<decltype(fn(std::size_t{0}))> results(trials);
  for (std::size_t i = 0; i < trials; ++i) results[i] = fn(i);
  return results;
}

// Same contract as serial_map_trials with trials spread over `jobs` OpenMP
// threads. fn must derive all randomness from its trial index. The first
// exception thrown by any trial is rethrown after the loop.
template <class Fn>
auto parallel_map_trials(std::size_t trials, int jobs, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  std::vector<decltype(fn(std::size_t{0}))> results(trials);
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_jobs(jobs))
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fairwatch_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// Per-trial monitor: consumes one toss (and the Markov coin label when
// known) and returns the current verdict.
using TrialMonitor = std::function<ConfidenceInterval(
    const BiasOutcomePair& toss, std::optional<std::size_t> label)>;
using MonitorBuilder = std::function<TrialMonitor()>;
// True value of the monitored quantity after the given prefix.
using TruthExtractor =
    std::function<double(std::span<const BiasOutcomePair> prefix)>;

struct CoverageSetup {
  MonitorBuilder monitor;
  DynamicsSpec dynamics;
  TruthExtractor truth;
  std::size_t horizon = 1000;
  std::size_t trials = 1000;
  double delta = 0.05;
  // Pointwise checks only t = horizon; uniform checks every t from
  // `first_checked` to horizon.
  SoundnessMode mode = SoundnessMode::kPointwise;
  std::size_t first_checked = 1;
  std::uint64_t seed = 0;
};

struct CoverageReport {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double rate = 0.0;
  // Three binomial standard deviations of the rate at 1 - delta.
  double margin = 0.0;
};

inline double binomial_margin(double delta, std::size_t trials) {
  return 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
}

// One seeded trial: true when the truth stayed inside the verdicts that
// the mode requires.
inline bool coverage_trial(const CoverageSetup& setup, std::size_t index) {
  Simulator simulator(setup.dynamics, trial_seed(setup.seed, index));
  TrialMonitor monitor = setup.monitor();
  std::vector<BiasOutcomePair> trace;
  trace.reserve(setup.horizon);
  for (std::size_t t = 1; t <= setup.horizon; ++t) {
    const BiasOutcomePair toss = simulator.next();
    trace.push_back(toss);
    const ConfidenceInterval verdict = monitor(toss, simulator.last_label());
    const bool checked = setup.mode == SoundnessMode::kUniform
                             ? t >= setup.first_checked
                             : t == setup.horizon;
    if (checked && !verdict.contains(setup.truth(trace))) return false;
  }
  return true;
}

inline CoverageReport summarize_coverage(const std::vector<char>& hits,
                                         double delta) {
  CoverageReport report;
  report.trials = hits.size();
  for (char h : hits) report.hits += h ? 1 : 0;
  report.rate = report.trials == 0 ? 0.0
                                   : static_cast<double>(report.hits) /
                                         static_cast<double>(report.trials);
  report.margin = report.trials == 0 ? 0.0 : binomial_margin(delta, report.trials);
  return report;
}

// Fraction of seeded trials whose verdicts contain the truth. Deterministic
// for a given seed regardless of `jobs`.
inline CoverageReport empirical_coverage(const CoverageSetup& setup,
                                         int jobs = 0) {
  if (setup.trials == 0) throw std::invalid_argument("trials must be >= 1");
  const auto hits = parallel_map_trials(setup.trials, jobs, [&](std::size_t i) {
    return static_cast<char>(coverage_trial(setup, i));
  });
  return summarize_coverage(hits, setup.delta);
}

inline CoverageReport empirical_coverage_serial(const CoverageSetup& setup) {
  if (setup.trials == 0) throw std::invalid_argument("trials must be >= 1");
  const auto hits = serial_map_trials(setup.trials, [&](std::size_t i) {
    return static_cast<char>(coverage_trial(setup, i));
  });
  return summarize_coverage(hits, setup.delta);
}

}  // namespace fairwatch

#endif  // FAIRWATCH_COVERAGE_H_
