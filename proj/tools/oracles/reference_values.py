# Copyright 2026 The Fairwatch Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent derivation of the reference constants frozen into the tests.

Shares no code with the C++ library: radii in 50-digit arithmetic, small
probabilities as exact fractions, the two-coin chain with numpy. Exits
nonzero when a derived value disagrees with its frozen copy.
"""

import itertools
import sys
from fractions import Fraction

import mpmath
import numpy as np

mpmath.mp.dps = 50

FROZEN = {
    "pointwise_radius_t100": 0.13581015157406195,
    "uniform_radius_t100": 0.28222389886436854,
    "uniform_radius_t1e9": 1.0618e-4,
    "window_mean_error_t100": 0.40743045472218585,
    "reach_fair_T2_half_up": 0.75,
    "shield_value_fair_T2_half_up": 0.25,
    "outcome_fairness_one_step": 0.625,
    "two_coin_head_rate": 0.5,
    "two_coin_mixing_time": 35,
}


def pointwise_radius(t, delta):
    return mpmath.sqrt(mpmath.log(2 / mpmath.mpf(delta)) / (2 * t))


def uniform_radius(t, delta):
    stitch = 2 * mpmath.log(mpmath.pi * mpmath.log(t) / mpmath.sqrt(6))
    return mpmath.sqrt(mpmath.mpf("1.1") * (stitch + mpmath.log(2 / mpmath.mpf(delta))) / t)


def window_mean_error(n, tau, t, delta, spread=1):
    k = mpmath.log(2 / mpmath.mpf(delta))
    effective = t - (n - 1)
    return mpmath.sqrt(9 * t * n**2 * spread**2 * tau * k / (2 * effective**2))


def reach(p, T, lo, hi):
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=T):
        h = sum(bits)
        if lo <= Fraction(h, T) <= hi:
            weight = Fraction(1)
            for b in bits:
                weight *= p if b else 1 - p
            total += weight
    return total


def optimal_cost(p, T, lo, hi, history=()):
    """Minimal expected flips over history-dependent outcome policies."""
    t = len(history)
    if t == T:
        return Fraction(0) if lo <= Fraction(sum(history), T) <= hi else None
    value = Fraction(0)
    for raw, prob in ((1, p), (0, 1 - p)):
        best = None
        for out in (raw, 1 - raw):
            rest = optimal_cost(p, T, lo, hi, history + (out,))
            if rest is not None:
                cand = rest + (0 if out == raw else 1)
                best = cand if best is None else min(best, cand)
        if best is None:
            if prob:
                return None
            continue
        value += prob * best
    return value


def two_coin_chain(p_a, p_b, switch):
    biases = (p_a, p_b)
    # Pair states (coin, outcome); one toss moves to (coin', outcome').
    states = [(k, x) for k in range(2) for x in range(2)]
    K = np.zeros((4, 4))
    for i, (k, _x) in enumerate(states):
        for j, (k2, x2) in enumerate(states):
            stay = 1 - switch if k2 == k else switch
            like = biases[k2] if x2 else 1 - biases[k2]
            K[i, j] = stay * like
    w, v = np.linalg.eig(K.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    pi /= pi.sum()
    head_rate = sum(pi[j] for j, (_k, x) in enumerate(states) if x)
    P = np.eye(4)
    for step in range(1, 100000):
        P = P @ K
        if max(0.5 * np.abs(P[i] - pi).sum() for i in range(4)) <= 0.25:
            return pi, head_rate, step
    raise RuntimeError("no mixing")


def main():
    derived = {
        "pointwise_radius_t100": float(pointwise_radius(100, "0.05")),
        "uniform_radius_t100": float(uniform_radius(100, "0.05")),
        "uniform_radius_t1e9": float(uniform_radius(10**9, "0.05")),
        "window_mean_error_t100": float(window_mean_error(1, 1, 100, "0.05")),
        "reach_fair_T2_half_up": float(reach(Fraction(1, 2), 2, Fraction(1, 2), 1)),
        "shield_value_fair_T2_half_up": float(
            optimal_cost(Fraction(1, 2), 2, Fraction(1, 2), 1)),
        # Three tosses with two heads, one more fair toss, outcome measure.
        "outcome_fairness_one_step": float((2 + Fraction(1, 2)) / 4),
    }
    pi, head_rate, tau = two_coin_chain(0.9, 0.1, 0.01)
    derived["two_coin_head_rate"] = float(head_rate)
    derived["two_coin_mixing_time"] = tau
    print("two_coin_pair_stationary", " ".join(f"{x:.12g}" for x in pi))

    failures = 0
    for name, value in derived.items():
        frozen = FROZEN[name]
        tol = {"uniform_radius_t1e9": 1e-7, "two_coin_head_rate": 1e-12}.get(name, 1e-15)
        ok = abs(value - frozen) <= tol * max(1.0, abs(frozen))
        failures += not ok
        print(f"{'ok  ' if ok else 'DIFF'} {name} derived={value!r} frozen={frozen!r}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
