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

#include "fairwatch/markov_chain.h"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace fairwatch {

namespace {

const MarkovDynamics& require_markov(const DynamicsSpec& dynamics) {
  const auto* markov = std::get_if<MarkovDynamics>(&dynamics);
  if (markov == nullptr) {
    throw std::invalid_argument("induced chain requires Markov dynamics, got " +
                                describe(dynamics));
  }
  return *markov;
}

// States reachable from `start` along positive-probability edges.
std::vector<bool> reachable_from(const Eigen::MatrixXd& kernel,
                                 Eigen::Index start) {
  const Eigen::Index m = kernel.rows();
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  std::queue<Eigen::Index> frontier;
  frontier.push(start);
  seen[static_cast<std::size_t>(start)] = true;
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < m; ++v) {
      if (kernel(u, v) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

// Members of the unique recurrent class; throws if there is not exactly one
// or if it is periodic.
std::vector<bool> single_aperiodic_class(const Eigen::MatrixXd& kernel) {
  const Eigen::Index m = kernel.rows();
  std::vector<std::vector<bool>> reach;
  reach.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index s = 0; s < m; ++s) reach.push_back(reachable_from(kernel, s));

  std::vector<bool> recurrent(static_cast<std::size_t>(m), false);
  for (Eigen::Index s = 0; s < m; ++s) {
    bool closed = true;
    for (Eigen::Index r = 0; r < m && closed; ++r) {
      if (reach[s][r] && !reach[r][s]) closed = false;
    }
    recurrent[static_cast<std::size_t>(s)] = closed;
  }
  Eigen::Index anchor = -1;
  for (Eigen::Index s = 0; s < m; ++s) {
    if (!recurrent[s]) continue;
    if (anchor < 0) {
      anchor = s;
    } else if (!reach[anchor][s]) {
      throw std::runtime_error("chain is reducible: more than one recurrent "
                               "class");
    }
  }
  if (anchor < 0) throw std::runtime_error("chain has no recurrent class");

  // Period = gcd of level differences along edges inside the class.
  std::vector<long> level(static_cast<std::size_t>(m), -1);
  std::queue<Eigen::Index> frontier;
  level[anchor] = 0;
  frontier.push(anchor);
  long period = 0;
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < m; ++v) {
      if (kernel(u, v) <= 0.0 || !recurrent[v]) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      } else {
        period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  if (period != 1) {
    throw std::runtime_error("chain is periodic with period " +
                             std::to_string(period));
  }
  return recurrent;
}

Eigen::RowVectorXd toss_stationary(const Eigen::MatrixXd& kernel) {
  single_aperiodic_class(kernel);
  const Eigen::Index m = kernel.rows();
  Eigen::MatrixXd system =
      kernel.transpose() - Eigen::MatrixXd::Identity(m, m);
  system.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;
  Eigen::VectorXd pi = system.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (pi(i) < 0.0) pi(i) = 0.0;
  }
  pi /= pi.sum();
  const double residual =
      (pi.transpose() * kernel - pi.transpose()).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw std::runtime_error("stationary solve did not converge (residual " +
                             std::to_string(residual) + ")");
  }
  return pi.transpose();
}

}  // namespace

InducedChain induced_chain(const DynamicsSpec& dynamics) {
  const MarkovDynamics& markov = require_markov(dynamics);
  validate(dynamics);
  const std::size_t n = markov.coins();
  InducedChain chain;
  chain.coins = n;
  const auto size = static_cast<Eigen::Index>(chain.size());
  chain.transition = Eigen::MatrixXd::Zero(size, size);
  chain.initial = Eigen::VectorXd::Zero(size);
  for (std::size_t k = 0; k < n; ++k) {
    chain.initial(static_cast<Eigen::Index>(chain.coin_state(k))) =
        markov.initial[k];
    for (int x = 0; x < 2; ++x) {
      const auto pair = static_cast<Eigen::Index>(chain.pair_state(k, x));
      chain.transition(static_cast<Eigen::Index>(chain.coin_state(k)), pair) =
          outcome_likelihood(markov.biases[k], x);
      for (std::size_t next = 0; next < n; ++next) {
        chain.transition(pair, static_cast<Eigen::Index>(
                                   chain.coin_state(next))) =
            markov.transition(k, x, next);
      }
    }
  }
  return chain;
}

Eigen::MatrixXd toss_kernel(const InducedChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.coins);
  // Pair -> coin block times coin -> pair block.
  const Eigen::MatrixXd pair_to_coin = chain.transition.block(n, 0, 2 * n, n);
  const Eigen::MatrixXd coin_to_pair = chain.transition.block(0, n, n, 2 * n);
  return pair_to_coin * coin_to_pair;
}

Eigen::VectorXd stationary_distribution(const InducedChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.coins);
  const Eigen::RowVectorXd pairs = toss_stationary(toss_kernel(chain));
  const Eigen::RowVectorXd coins =
      pairs * chain.transition.block(n, 0, 2 * n, n);
  Eigen::VectorXd pi(3 * n);
  pi.head(n) = 0.5 * coins.transpose();
  pi.tail(2 * n) = 0.5 * pairs.transpose();
  return pi;
}

std::vector<double> coin_marginals(const InducedChain& chain,
                                   const Eigen::VectorXd& stationary) {
  std::vector<double> marginals(chain.coins);
  double total = 0.0;
  for (std::size_t k = 0; k < chain.coins; ++k) {
    marginals[k] = stationary(static_cast<Eigen::Index>(chain.coin_state(k)));
    total += marginals[k];
  }
  for (double& m : marginals) m /= total;
  return marginals;
}

double stationary_head_rate(const InducedChain& chain,
                            const Eigen::VectorXd& stationary) {
  double heads = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < chain.coins; ++k) {
    for (int x = 0; x < 2; ++x) {
      const double mass =
          stationary(static_cast<Eigen::Index>(chain.pair_state(k, x)));
      total += mass;
      if (x == 1) heads += mass;
    }
  }
  return heads / total;
}

std::size_t estimate_mixing_time(const InducedChain& chain, double tolerance,
                                 std::size_t max_steps) {
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw std::invalid_argument("mixing tolerance must lie in (0, 1)");
  }
  const Eigen::MatrixXd kernel = toss_kernel(chain);
  const Eigen::RowVectorXd pi = toss_stationary(kernel);
  Eigen::MatrixXd power = kernel;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    double worst = 0.0;
    for (Eigen::Index row = 0; row < power.rows(); ++row) {
      worst = std::max(worst, 0.5 * (power.row(row) - pi).cwiseAbs().sum());
    }
    if (worst <= tolerance) return k;
    power = power * kernel;
  }
  throw std::runtime_error("mixing time exceeds " + std::to_string(max_steps) +
                           " steps");
}

}  // namespace fairwatch
