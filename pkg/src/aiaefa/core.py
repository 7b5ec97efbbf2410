"""Shared domain types: search space, agents, run configuration, RNG."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aiaefa.schedule import (
    ChaoticSigmoidSchedule,
    ChaoticState,
    ExponentialK,
    ExponentialSchedule,
    SigmoidK,
)

KBEST_MODES = ("linear_N_to_2", "all_agents")
SCHEDULES = ("exponential", "chaotic_sigmoid")


@dataclass(frozen=True)
class SearchSpace:
    lower: np.ndarray
    upper: np.ndarray
    integer_mask: np.ndarray = None
    equality_tolerance: float = 1e-4

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        if self.equality_tolerance <= 0:
            raise ValueError("equality_tolerance must be positive")
        mask = self.integer_mask
        mask = np.zeros(lower.shape, dtype=bool) if mask is None else np.array(mask, dtype=bool)
        if mask.shape != lower.shape:
            raise ValueError("integer_mask length must match dimension")
        ends = np.concatenate([lower[mask], upper[mask]])
        if np.any(ends != np.round(ends)):
            raise ValueError("integer dimensions need integer bounds")
        for arr in (lower, upper, mask):
            arr.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "integer_mask", mask)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def mode(self) -> str:
        """Position-update mode implied by the integer mask."""
        if not self.integer_mask.any():
            return "continuous"
        if self.integer_mask.all():
            return "integer"
        return "mixed"


@dataclass
class Agent:
    position: np.ndarray
    velocity: np.ndarray
    charge: float = 0.0
    objective: float = np.inf
    violation: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.violation == 0


@dataclass
class RunConfig:
    population_size: int = 30
    max_iterations: int = 500
    max_evaluations: int = 15000
    schedule: str = "chaotic_sigmoid"
    k0: float = 500.0
    alpha: float = 30.0
    beta: float = 6.0
    delta: float = 300.0
    r: float = 4.0
    k1_init: float = 0.7
    a: float = 20.0
    b: float = 1e-10
    velocity_bound_fraction: float = 0.5
    kbest_mode: str = "all_agents"
    epsilon_force: float = 1e-10
    seed: int = 0
    trace: bool = False

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.max_evaluations < self.population_size:
            raise ValueError("max_evaluations must be >= population_size")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}; choose from {SCHEDULES}")
        if self.kbest_mode not in KBEST_MODES:
            raise ValueError(f"unknown kbest_mode {self.kbest_mode!r}; choose from {KBEST_MODES}")
        if not 0 < self.velocity_bound_fraction <= 1:
            raise ValueError("velocity_bound_fraction must lie in (0, 1]")
        if self.epsilon_force <= 0:
            raise ValueError("epsilon_force must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def aefa(cls, **overrides) -> "RunConfig":
        """Baseline AEFA: exponential K, shrinking K_best, loose velocity bound."""
        kw = dict(schedule="exponential", kbest_mode="linear_N_to_2", velocity_bound_fraction=1.0)
        kw.update(overrides)
        return cls(**kw)

    @classmethod
    def ai_aefa(cls, **overrides) -> "RunConfig":
        return cls(**overrides)

    def make_schedule(self):
        if self.schedule == "exponential":
            return ExponentialSchedule(ExponentialK(self.k0, self.alpha))
        return ChaoticSigmoidSchedule(
            SigmoidK(self.k0, self.beta, self.delta),
            ChaoticState(k1=self.k1_init, r=self.r, a=self.a, b=self.b),
        )


ALGORITHMS = {"aefa": RunConfig.aefa, "ai-aefa": RunConfig.ai_aefa}


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 stream; the only randomness source a run may use."""
    return np.random.Generator(np.random.PCG64(seed))


def _check_len(space: SearchSpace, vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape[-1] != space.dim:
        raise ValueError(f"expected {space.dim} coordinates, got {vec.shape[-1]}")
    return vec


def clamp_position(space: SearchSpace, position) -> np.ndarray:
    """Clip into ``[lower, upper]``. Works on one vector or a (N, D) stack."""
    position = _check_len(space, position)
    return np.maximum(np.minimum(position, space.upper), space.lower)


def clamp_velocity(space: SearchSpace, velocity, fraction: float) -> np.ndarray:
    velocity = _check_len(space, velocity)
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    vmax = fraction * (space.upper - space.lower)
    return np.maximum(np.minimum(velocity, vmax), -vmax)


@dataclass
class IterationTrace:
    iteration: int
    k_value: float
    q_best: float
    a_norm: float
    e_norm: float
    f_best: float
    x_norm: float
    # not exported; kept for integrity checks over whole runs
    positions: np.ndarray = field(default=None, repr=False)
