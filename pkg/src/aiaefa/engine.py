"""The AEFA / AI-AEFA optimisation loop and its per-step operators."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from aiaefa.constraints import order, precedes
from aiaefa.core import (
    IterationTrace,
    RunConfig,
    SearchSpace,
    clamp_position,
    clamp_velocity,
    make_rng,
)

UNIT_MASS = 1.0


class RunError(RuntimeError):
    """An evaluator returned something the loop cannot use."""

    def __init__(self, message: str, agent: int, iteration: int):
        super().__init__(message)
        self.agent = agent
        self.iteration = iteration


@dataclass(frozen=True)
class ForceField:
    epsilon_force: float = 1e-10
    kbest_size: int = 2
    mass: float = UNIT_MASS

    def __post_init__(self):
        if self.epsilon_force <= 0:
            raise ValueError("epsilon_force must be positive")
        if self.kbest_size < 2:
            raise ValueError("kbest_size must be >= 2")


@dataclass
class RunResult:
    best_position: np.ndarray
    best_objective: float
    best_violation: float
    evaluations_used: int
    iterations: int
    trace: list[IterationTrace] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.best_violation == 0


def compute_charges(objectives) -> np.ndarray:
    """Normalised charges; the lowest objective carries the largest charge."""
    fit = np.asarray(objectives, dtype=float)
    fmax, fmin = fit.max(), fit.min()
    if fmax == fmin:
        q = np.ones_like(fit)
    else:
        q = np.exp((fit - fmax) / (fmin - fmax))
    return q / q.sum()


def kbest_size(mode: str, n: int, l: int, l_max: int) -> int:
    if mode == "all_agents":
        return n
    size = math.floor(n - (n - 2) * l / l_max)
    return max(2, min(n, size))


def compute_forces(positions, charges, k: float, kbest, rand, epsilon: float = 1e-10) -> np.ndarray:
    """Total Coulomb force on every agent from the attractors in ``kbest``.

    ``rand`` is an (N, N) array of uniforms; ``rand[i, j]`` scales the pull of
    ``j`` on ``i`` in every dimension. Self-interaction is excluded.
    """
    x = np.asarray(positions, dtype=float)
    q = np.asarray(charges, dtype=float)
    kb = np.asarray(kbest, dtype=int)
    rand = np.asarray(rand, dtype=float)

    diff = x[None, kb, :] - x[:, None, :]  # (N, |kb|, D): x_j - x_i
    dist = np.sqrt((diff**2).sum(axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        w = rand[:, kb] * k * q[:, None] * q[None, kb] / (dist + epsilon)
    # coincident pairs (self included) have a zero numerator anyway
    w[dist == 0] = 0.0
    w[kb[None, :] == np.arange(x.shape[0])[:, None]] = 0.0
    return (w[..., None] * diff).sum(axis=1)


def update_velocity(space: SearchSpace, velocity, acceleration, rand, fraction: float) -> np.ndarray:
    """``rand * v + a`` with one uniform per coordinate, then velocity-clamped."""
    v = np.asarray(rand) * np.asarray(velocity, dtype=float) + np.asarray(acceleration, dtype=float)
    return clamp_velocity(space, v, fraction)


def round_half_away(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def update_position(space: SearchSpace, position, velocity, mode: str | None = None) -> np.ndarray:
    mode = mode or space.mode
    x = np.asarray(position, dtype=float) + np.asarray(velocity, dtype=float)
    if mode == "integer":
        x = round_half_away(x)
    elif mode == "mixed":
        x = np.where(space.integer_mask, round_half_away(x), x)
    elif mode != "continuous":
        raise ValueError(f"unknown position mode {mode!r}")
    return clamp_position(space, x)


def greedy_replace(old: tuple, new: tuple) -> tuple:
    """Keep ``old`` only if it strictly precedes ``new``.

    Entries are ``(objective, violation, position)``.
    """
    return old if precedes(old[:2], new[:2]) else new


def _evaluate(problem, positions: np.ndarray, iteration: int):
    n = positions.shape[0]
    obj = np.empty(n)
    vio = np.empty(n)
    for i in range(n):
        f, v = problem.evaluate(positions[i])
        if not math.isfinite(f) or not math.isfinite(v):
            raise RunError(
                f"{problem.name}: non-finite evaluation (objective={f}, violation={v}) "
                f"for agent {i} at iteration {iteration}",
                agent=i,
                iteration=iteration,
            )
        obj[i] = f
        vio[i] = v
    return obj, vio


def initial_population(space: SearchSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    x = space.lower + rng.random((n, space.dim)) * (space.upper - space.lower)
    if space.integer_mask.any():
        x = np.where(space.integer_mask, round_half_away(x), x)
    return clamp_position(space, x)


def run(problem, config: RunConfig, sink: Callable[[IterationTrace], None] | None = None) -> RunResult:
    """Optimise ``problem`` under ``config``.

    ``problem`` needs ``space``, ``name``, ``evaluate(x) -> (objective, violation)``
    on the minimisation scale and ``report(objective)`` to map back. One sweep
    of N evaluations happens per iteration, the initial population included, so
    the loop performs ``min(max_iterations, max_evaluations // N) - 1`` moves.
    """
    t0 = time.perf_counter()
    space: SearchSpace = problem.space
    n, d = config.population_size, space.dim
    mode = space.mode
    rng = make_rng(config.seed)
    schedule = config.make_schedule()

    x = initial_population(space, n, rng)
    v = np.zeros((n, d))
    obj, vio = _evaluate(problem, x, 0)
    evals = n

    b = order(obj, vio)[0]
    elite = (obj[b], vio[b], x[b].copy())

    steps = min(config.max_iterations, config.max_evaluations // n) - 1
    trace: list[IterationTrace] = []
    for l in range(1, steps + 1):
        rank = order(obj, vio)
        k = schedule.value(l, steps)
        q = compute_charges(obj)
        kb = rank[: kbest_size(config.kbest_mode, n, l, steps)]

        # per agent: N force draws, then D velocity draws
        draws = rng.random((n, n + d))
        force = compute_forces(x, q, k, kb, draws[:, :n], config.epsilon_force)
        acc = force / UNIT_MASS
        v = update_velocity(space, v, acc, draws[:, n:], config.velocity_bound_fraction)
        x_new = update_position(space, x, v, mode)

        obj_new, vio_new = _evaluate(problem, x_new, l)
        evals += n
        for i in range(n):
            if not precedes((obj[i], vio[i]), (obj_new[i], vio_new[i])):
                x[i] = x_new[i]
                obj[i] = obj_new[i]
                vio[i] = vio_new[i]

        b = order(obj, vio)[0]
        if precedes((obj[b], vio[b]), elite[:2]):
            elite = (obj[b], vio[b], x[b].copy())

        if config.trace or sink is not None:
            lead = rank[0]
            rec = IterationTrace(
                iteration=l,
                k_value=float(k),
                q_best=float(q[lead]),
                a_norm=float(np.linalg.norm(acc[lead])),
                e_norm=float(np.linalg.norm(force[lead])),
                f_best=float(problem.report(elite[0])),
                x_norm=float(np.linalg.norm(elite[2])),
                positions=x.copy() if config.trace else None,
            )
            if config.trace:
                trace.append(rec)
            if sink is not None:
                sink(rec)

    return RunResult(
        best_position=elite[2],
        best_objective=float(problem.report(elite[0])),
        best_violation=float(elite[1]),
        evaluations_used=evals,
        iterations=steps + 1,
        trace=trace,
        wall_time=time.perf_counter() - t0,
    )
