"""Coulomb-constant schedules.

Two families drive the force magnitude over a run:

* the exponential decay used by baseline AEFA, ``K0 * exp(-alpha * l / l_max)``;
* the log-sigmoid decay of AI-AEFA, ``K0 / (1 + exp(beta * (l - l_max/2) / delta))``,
  to which a normalised sine-map term is added every iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ExponentialK:
    k0: float = 500.0
    alpha: float = 30.0

    def __post_init__(self):
        if self.k0 <= 0 or self.alpha <= 0:
            raise ValueError(f"k0 and alpha must be positive, got k0={self.k0}, alpha={self.alpha}")


@dataclass(frozen=True)
class SigmoidK:
    k0: float = 500.0
    beta: float = 6.0
    delta: float = 300.0

    def __post_init__(self):
        if self.k0 <= 0 or self.beta <= 0 or self.delta <= 0:
            raise ValueError(
                f"k0, beta and delta must be positive, got {self.k0}, {self.beta}, {self.delta}"
            )


@dataclass(frozen=True)
class ChaoticState:
    """Sine-map value plus the constants used to normalise it."""

    k1: float = 0.7
    r: float = 4.0
    r1: float = 0.0
    r2: float = 1.0
    a: float = 20.0
    b: float = 1e-10

    def __post_init__(self):
        if not self.r1 < self.r2:
            raise ValueError(f"map range needs r1 < r2, got [{self.r1}, {self.r2}]")
        if not self.a > self.b:
            raise ValueError(f"envelope needs a > b, got a={self.a}, b={self.b}")


def _check_iter(l: float, l_max: float) -> None:
    if l_max <= 0:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    if not 0 <= l <= l_max:
        raise ValueError(f"iteration {l} outside [0, {l_max}]")


def exponential_k(sched: ExponentialK, l: float, l_max: float) -> float:
    _check_iter(l, l_max)
    return sched.k0 * math.exp(-sched.alpha * l / l_max)


def sigmoid_k(sched: SigmoidK, l: float, l_max: float) -> float:
    _check_iter(l, l_max)
    z = sched.beta * (l - l_max / 2) / sched.delta
    # exp overflows past ~709; the limit is 0 there anyway
    if z > 700:
        return 0.0
    return sched.k0 / (1.0 + math.exp(z))


def sine_map_step(state: ChaoticState) -> ChaoticState:
    return replace(state, k1=state.r / 4 * math.sin(math.pi * state.k1))


def sine_map_orbit(state: ChaoticState, steps: int) -> np.ndarray:
    """The next ``steps`` values of k1, same arithmetic as repeated ``sine_map_step``."""
    out = np.empty(steps)
    k, c = state.k1, state.r / 4
    for i in range(steps):
        k = c * math.sin(math.pi * k)
        out[i] = k
    return out


def g_schedule(state: ChaoticState, l: float, l_max: float) -> float:
    """Envelope for the chaotic term: falls linearly from ``a`` at l=0 to ``b`` at l_max."""
    _check_iter(l, l_max)
    t = l / l_max
    # same line as a - t(a - b), written so that t = 1 gives b exactly
    return state.a * (1.0 - t) + state.b * t


def normalize_chaotic(state: ChaoticState, g: float) -> float:
    """Map ``k1`` linearly from ``[r1, r2]`` onto ``[0, g]``."""
    span = state.r2 - state.r1
    if span == 0:
        raise ValueError("degenerate chaotic range r1 == r2")
    return (state.k1 - state.r1) * g / span


def final_k(
    sigmoid: SigmoidK, state: ChaoticState, l: float, l_max: float
) -> tuple[float, ChaoticState]:
    """Advance the sine map once and return ``(K_norm + K_h, advanced_state)``."""
    nxt = sine_map_step(state)
    k_norm = normalize_chaotic(nxt, g_schedule(nxt, l, l_max))
    return k_norm + sigmoid_k(sigmoid, l, l_max), nxt


class ExponentialSchedule:
    """Baseline AEFA schedule. Stateless."""

    name = "exponential"

    def __init__(self, params: ExponentialK | None = None):
        self.params = params or ExponentialK()

    def value(self, l: float, l_max: float) -> float:
        return exponential_k(self.params, l, l_max)


class ChaoticSigmoidSchedule:
    """AI-AEFA schedule. Owns the chaotic state; one instance per run."""

    name = "chaotic_sigmoid"

    def __init__(self, params: SigmoidK | None = None, state: ChaoticState | None = None):
        self.params = params or SigmoidK()
        self.state = state or ChaoticState()

    def value(self, l: float, l_max: float) -> float:
        k, self.state = final_k(self.params, self.state, l, l_max)
        return k
