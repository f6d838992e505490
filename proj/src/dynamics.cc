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

#include "fairwatch/dynamics.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fairwatch {

namespace {

void validate_probability_vector(std::span<const double> values,
                                 std::size_t expected_size,
                                 const char* what) {
  if (values.size() != expected_size) {
    throw std::invalid_argument(std::string(what) + " has wrong length");
  }
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string(what) +
                                  " has a negative entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument(std::string(what) + " does not sum to 1");
  }
}

void validate_bias(double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    throw std::invalid_argument("bias must lie in [0, 1]");
  }
}

// Index of a point mass, if `values` is one.
std::optional<std::size_t> point_mass(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - 1.0) <= kProbabilityTolerance) return i;
  }
  return std::nullopt;
}

double draw_bias(const DynamicsSpec& dynamics, const BiasOutcomePair* last,
                 std::optional<std::size_t> last_label, std::size_t t,
                 Rng& rng, std::optional<std::size_t>& label) {
  label.reset();
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConstantDynamics>) {
          return d.bias;
        } else if constexpr (std::is_same_v<T, MarkovDynamics>) {
          const std::size_t k =
              t == 0 ? rng.categorical(d.initial)
                     : rng.categorical(
                           d.kernel[*last_label]
                                   [static_cast<std::size_t>(last->outcome)]);
          label = k;
          return d.biases[k];
        } else if constexpr (std::is_same_v<T, AdditiveDynamics>) {
          if (t == 0) return d.initial_bias;
          return std::clamp(last->bias + d.shift(last->outcome), 0.0, 1.0);
        } else {
          if (t >= d.biases.size()) {
            throw std::out_of_range("scripted dynamics exhausted at step " +
                                    std::to_string(t + 1));
          }
          return d.biases[t];
        }
      },
      dynamics);
}

}  // namespace

void validate(const DynamicsSpec& dynamics) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConstantDynamics>) {
          validate_bias(d.bias);
        } else if constexpr (std::is_same_v<T, MarkovDynamics>) {
          const std::size_t n = d.coins();
          if (n == 0) throw std::invalid_argument("markov: no coins");
          for (double b : d.biases) validate_bias(b);
          std::vector<double> sorted = d.biases;
          std::sort(sorted.begin(), sorted.end());
          if (std::adjacent_find(sorted.begin(), sorted.end()) !=
              sorted.end()) {
            throw std::invalid_argument("markov: biases must be distinct");
          }
          if (d.kernel.size() != n) {
            throw std::invalid_argument("markov: kernel needs one entry per "
                                        "coin");
          }
          for (const auto& rows : d.kernel) {
            for (const auto& row : rows) {
              validate_probability_vector(row, n, "markov kernel row");
            }
          }
          validate_probability_vector(d.initial, n, "markov initial "
                                                    "distribution");
        } else if constexpr (std::is_same_v<T, AdditiveDynamics>) {
          validate_bias(d.initial_bias);
          if (!std::isfinite(d.shift_on_head) ||
              !std::isfinite(d.shift_on_tail)) {
            throw std::invalid_argument("additive: shifts must be finite");
          }
        } else {
          for (double b : d.biases) validate_bias(b);
        }
      },
      dynamics);
}

DynamicsSpec canonicalize(const DynamicsSpec& dynamics) {
  const auto* markov = std::get_if<MarkovDynamics>(&dynamics);
  if (markov == nullptr) return dynamics;
  const auto start = point_mass(markov->initial);
  if (!start) return dynamics;
  for (const auto& rows : markov->kernel) {
    for (const auto& row : rows) {
      if (point_mass(row) != start) return dynamics;
    }
  }
  return ConstantDynamics{markov->biases[*start]};
}

std::optional<std::size_t> coin_label(const MarkovDynamics& dynamics,
                                      double bias) {
  for (std::size_t k = 0; k < dynamics.biases.size(); ++k) {
    if (dynamics.biases[k] == bias) return k;
  }
  return std::nullopt;
}

bool is_count_determined(const DynamicsSpec& dynamics) {
  return !std::holds_alternative<MarkovDynamics>(canonicalize(dynamics));
}

std::string describe(const DynamicsSpec& dynamics) {
  std::ostringstream out;
  out.precision(17);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConstantDynamics>) {
          out << "constant:" << d.bias;
        } else if constexpr (std::is_same_v<T, MarkovDynamics>) {
          out << "markov:n=" << d.coins();
        } else if constexpr (std::is_same_v<T, AdditiveDynamics>) {
          out << "additive:" << d.initial_bias << ',' << d.shift_on_tail
              << ',' << d.shift_on_head;
        } else {
          out << "scripted:len=" << d.biases.size();
        }
      },
      dynamics);
  return out.str();
}

BiasOutcomePair sample_next(const DynamicsSpec& dynamics,
                            std::span<const BiasOutcomePair> history,
                            Rng& rng) {
  const BiasOutcomePair* last = history.empty() ? nullptr : &history.back();
  std::optional<std::size_t> last_label;
  if (last != nullptr) {
    if (const auto* markov = std::get_if<MarkovDynamics>(&dynamics)) {
      last_label = coin_label(*markov, last->bias);
      if (!last_label) {
        throw std::invalid_argument("history contains a bias outside the "
                                    "coin set");
      }
    }
  }
  std::optional<std::size_t> label;
  const double bias =
      draw_bias(dynamics, last, last_label, history.size(), rng, label);
  return {bias, rng.bernoulli(bias)};
}

Simulator::Simulator(const DynamicsSpec& dynamics, std::uint64_t seed)
    : dynamics_(dynamics), rng_(seed) {
  validate(dynamics_);
}

BiasOutcomePair Simulator::next() {
  std::optional<std::size_t> label;
  const double bias = draw_bias(dynamics_, last_ ? &*last_ : nullptr,
                                last_label_, steps_, rng_, label);
  const BiasOutcomePair pair{bias, rng_.bernoulli(bias)};
  last_ = pair;
  last_label_ = label;
  ++steps_;
  return pair;
}

Trace simulate(const DynamicsSpec& dynamics, std::size_t horizon,
               std::uint64_t seed) {
  Simulator simulator(dynamics, seed);
  Trace trace;
  trace.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) trace.push_back(simulator.next());
  return trace;
}

}  // namespace fairwatch
