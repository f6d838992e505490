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

#ifndef FAIRWATCH_MARKOV_CHAIN_H_
#define FAIRWATCH_MARKOV_CHAIN_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fairwatch/dynamics.h"

namespace fairwatch {

// Two-phase Markov chain encoding a Markov coin process.
//
// States 0..n-1 are coin states "coin k is about to be tossed"; state
// n + 2k + x is the pair state "coin k was tossed with outcome x". A coin
// state moves to its pair states with weights p^x (1-p)^(1-x); a pair state
// (k, x) moves to coin state k' with the kernel probability. The initial
// distribution puts the first-coin law on coin states and zero elsewhere.
struct InducedChain {
  std::size_t coins = 0;
  Eigen::MatrixXd transition;
  Eigen::VectorXd initial;

  std::size_t size() const { return 3 * coins; }
  std::size_t coin_state(std::size_t k) const { return k; }
  std::size_t pair_state(std::size_t k, int outcome) const {
    return coins + 2 * k + static_cast<std::size_t>(outcome);
  }
};

// Likelihood of `outcome` under a coin with head-probability `bias`.
inline double outcome_likelihood(double bias, int outcome) {
  return outcome == 1 ? bias : 1.0 - bias;
}

// Throws std::invalid_argument for non-Markov dynamics.
InducedChain induced_chain(const DynamicsSpec& dynamics);

// One toss of the process as a chain on pair states: row (k, x), column
// (k', x') holds kernel(k, x, k') * likelihood(p^(k'), x'). This is the
// two-step kernel of the induced chain restricted to pair states.
Eigen::MatrixXd toss_kernel(const InducedChain& chain);

// Stationary distribution over all 3n states of the induced chain (each
// phase carries mass 1/2, and pi * M = pi). Requires the toss-level chain
// to have a single recurrent class which is aperiodic; throws
// std::runtime_error otherwise.
Eigen::VectorXd stationary_distribution(const InducedChain& chain);

// Distribution of the coin about to be tossed under `stationary`.
std::vector<double> coin_marginals(const InducedChain& chain,
                                   const Eigen::VectorXd& stationary);

// Long-run head rate under `stationary`.
double stationary_head_rate(const InducedChain& chain,
                            const Eigen::VectorXd& stationary);

// Smallest k such that every start state of the toss-level chain is within
// total variation `tolerance` of stationarity after k tosses. Throws
// std::runtime_error when `max_steps` is exceeded.
std::size_t estimate_mixing_time(const InducedChain& chain,
                                 double tolerance = 0.25,
                                 std::size_t max_steps = 1'000'000);

}  // namespace fairwatch

#endif  // FAIRWATCH_MARKOV_CHAIN_H_
