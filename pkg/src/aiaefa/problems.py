"""Problem registry: analytic constrained toys and reliability-redundancy allocation.

Register a new problem with the ``register`` decorator on a zero-argument
factory returning a ``ProblemSpec``::

    @register("my-problem")
    def _my_problem():
        return ProblemSpec(name="my-problem", space=..., objective=...)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from aiaefa.constraints import ConstraintSet, violation
from aiaefa.core import SearchSpace


@dataclass(frozen=True)
class KnownBest:
    value: float
    position: tuple | None = None
    citation: str = ""


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    space: SearchSpace
    objective: Callable[[np.ndarray], float]
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    known_best: KnownBest | None = None
    sense: str = "minimize"
    description: str = ""

    def __post_init__(self):
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"sense must be 'minimize' or 'maximize', got {self.sense!r}")

    def evaluate(self, x) -> tuple[float, float]:
        """Objective on the minimisation scale, and violation degree."""
        x = np.asarray(x, dtype=float)
        f = float(self.objective(x))
        if self.sense == "maximize":
            f = -f
        return f, violation(self.constraints, x, self.space.equality_tolerance)

    def report(self, internal: float) -> float:
        return -internal if self.sense == "maximize" else internal


_REGISTRY: dict[str, Callable[[], ProblemSpec]] = {}


def register(name: str):
    def deco(factory):
        if name in _REGISTRY:
            raise ValueError(f"problem {name!r} already registered")
        _REGISTRY[name] = factory
        return factory

    return deco


def available() -> list[str]:
    return sorted(_REGISTRY)


def registry_get(name: str) -> ProblemSpec:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(available())}") from None
    return factory()


# --------------------------------------------------------------------------
# analytic problems


@register("sphere")
def _sphere():
    return ProblemSpec(
        name="sphere",
        space=SearchSpace(lower=[-5.0, -5.0], upper=[5.0, 5.0]),
        objective=lambda x: float(np.dot(x, x)),
        known_best=KnownBest(0.0, (0.0, 0.0), "analytic"),
        description="unconstrained 2-D sphere",
    )


@register("toy-quadratic")
def _toy_quadratic():
    return ProblemSpec(
        name="toy-quadratic",
        space=SearchSpace(lower=[-5.0, -5.0], upper=[5.0, 5.0]),
        objective=lambda x: (x[0] - 2.0) ** 2 + (x[1] - 2.0) ** 2,
        constraints=ConstraintSet(inequality=(lambda x: x[0] + x[1] - 2.0,)),
        known_best=KnownBest(2.0, (1.0, 1.0), "analytic (KKT point)"),
        description="min (x1-2)^2 + (x2-2)^2  s.t.  x1 + x2 <= 2",
    )


@register("rosenbrock-disk")
def _rosenbrock_disk():
    return ProblemSpec(
        name="rosenbrock-disk",
        space=SearchSpace(lower=[-1.5, -1.5], upper=[1.5, 1.5]),
        objective=lambda x: (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2,
        constraints=ConstraintSet(inequality=(lambda x: x[0] ** 2 + x[1] ** 2 - 2.0,)),
        known_best=KnownBest(0.0, (1.0, 1.0), "analytic"),
        description="Rosenbrock restricted to the disk x1^2 + x2^2 <= 2",
    )


@register("sphere-equality")
def _sphere_equality():
    return ProblemSpec(
        name="sphere-equality",
        space=SearchSpace(lower=[-5.0, -5.0], upper=[5.0, 5.0]),
        objective=lambda x: float(np.dot(x, x)),
        constraints=ConstraintSet(equality=(lambda x: x[0] + x[1] - 1.0,)),
        known_best=KnownBest(0.5, (0.5, 0.5), "analytic"),
        description="min x1^2 + x2^2  s.t.  x1 + x2 = 1",
    )


# --------------------------------------------------------------------------
# reliability-redundancy allocation

RULES = ("series", "series-parallel", "bridge")


@dataclass(frozen=True)
class RraSystem:
    """Active-redundancy system with volume, cost and weight budgets.

    Decision vector layout is ``[r_1..r_s, n_1..n_s]``. Constraints:

    * volume  ``sum(vol_i * n_i^2) <= V``
    * cost    ``sum(alpha_i * (-T / ln r_i)^beta_i * (n_i + exp(n_i / 4))) <= C``
    * weight  ``sum(w_i * n_i * exp(n_i / 4)) <= W``
    """

    rule: str
    alpha: tuple
    beta: tuple
    volume: tuple
    weight: tuple
    v_max: float
    c_max: float
    w_max: float
    mission_time: float = 1000.0
    n_max: int = 10
    r_min: float = 0.5
    r_max: float = 1.0 - 1e-6

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown composition rule {self.rule!r}")
        s = len(self.alpha)
        if not all(len(t) == s for t in (self.beta, self.volume, self.weight)):
            raise ValueError("coefficient vectors must share one length")
        if self.rule in ("series-parallel", "bridge") and s != 5:
            raise ValueError(f"{self.rule} systems have exactly 5 subsystems")

    @property
    def subsystems(self) -> int:
        return len(self.alpha)

    def split(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        s = self.subsystems
        return x[:s], x[s:]

    def space(self) -> SearchSpace:
        s = self.subsystems
        return SearchSpace(
            lower=[self.r_min] * s + [1.0] * s,
            upper=[self.r_max] * s + [float(self.n_max)] * s,
            integer_mask=[False] * s + [True] * s,
        )

    def volume_slack(self, x) -> float:
        _, n = self.split(x)
        return float(np.dot(self.volume, n**2) - self.v_max)

    def cost_slack(self, x) -> float:
        r, n = self.split(x)
        unit = np.asarray(self.alpha) * (-self.mission_time / np.log(r)) ** np.asarray(self.beta)
        return float(np.dot(unit, n + np.exp(n / 4)) - self.c_max)

    def weight_slack(self, x) -> float:
        _, n = self.split(x)
        return float(np.dot(self.weight, n * np.exp(n / 4)) - self.w_max)

    def constraints(self) -> ConstraintSet:
        return ConstraintSet(inequality=(self.volume_slack, self.cost_slack, self.weight_slack))


def subsystem_reliability(r, n) -> np.ndarray:
    return 1.0 - (1.0 - np.asarray(r, dtype=float)) ** np.asarray(n, dtype=float)


def rra_reliability(system: RraSystem, r, n) -> float:
    r = np.asarray(r, dtype=float)
    n = np.asarray(n, dtype=float)
    if r.shape != (system.subsystems,) or n.shape != (system.subsystems,):
        raise ValueError(f"expected {system.subsystems} reliabilities and redundancies")
    if np.any((r <= 0) | (r >= 1)):
        raise ValueError("component reliabilities must lie strictly inside (0, 1)")
    if np.any(n < 1) or np.any(n != np.round(n)):
        raise ValueError("redundancy levels must be positive integers")

    R = subsystem_reliability(r, n)
    if system.rule == "series":
        return float(np.prod(R))
    if system.rule == "series-parallel":
        r1, r2, r3, r4, r5 = R
        return float(1 - (1 - r1 * r2) * (1 - (1 - (1 - r3) * (1 - r4)) * r5))
    r1, r2, r3, r4, r5 = R
    return float(
        r1 * r2 + r3 * r4 + r1 * r4 * r5 + r2 * r3 * r5
        - r1 * r2 * r3 * r4 - r1 * r2 * r3 * r5 - r1 * r2 * r4 * r5
        - r1 * r3 * r4 * r5 - r2 * r3 * r4 * r5
        + 2 * r1 * r2 * r3 * r4 * r5
    )


def rra_problem(name: str, system: RraSystem, known_best: KnownBest | None, description: str):
    def objective(x):
        r, n = system.split(x)
        return rra_reliability(system, r, n)

    return ProblemSpec(
        name=name,
        space=system.space(),
        objective=objective,
        constraints=system.constraints(),
        known_best=known_best,
        sense="maximize",
        description=description,
    )


_FIVE_ALPHA = (2.33e-5, 1.45e-5, 0.541e-5, 8.05e-5, 1.95e-5)
_FIVE_VOLUME = (1.0, 2.0, 3.0, 4.0, 2.0)
_FIVE_WEIGHT = (7.0, 8.0, 8.0, 6.0, 9.0)

SERIES = RraSystem(
    rule="series",
    alpha=_FIVE_ALPHA,
    beta=(1.5,) * 5,
    volume=_FIVE_VOLUME,
    weight=_FIVE_WEIGHT,
    v_max=110.0,
    c_max=175.0,
    w_max=200.0,
)

SERIES_PARALLEL = RraSystem(
    rule="series-parallel",
    alpha=(2.5e-5, 1.45e-5, 0.541e-5, 0.541e-5, 2.1e-5),
    beta=(1.5,) * 5,
    volume=(2.0, 4.0, 5.0, 8.0, 4.0),
    weight=(3.5, 4.0, 4.0, 3.5, 4.5),
    v_max=180.0,
    c_max=175.0,
    w_max=100.0,
)

BRIDGE = RraSystem(
    rule="bridge",
    alpha=_FIVE_ALPHA,
    beta=(1.5,) * 5,
    volume=_FIVE_VOLUME,
    weight=_FIVE_WEIGHT,
    v_max=110.0,
    c_max=175.0,
    w_max=200.0,
)

OVERSPEED = RraSystem(
    rule="series",
    alpha=(1.0e-5, 2.3e-5, 0.3e-5, 2.3e-5),
    beta=(1.5,) * 4,
    volume=(1.0, 2.0, 3.0, 2.0),
    weight=(6.0, 6.0, 8.0, 7.0),
    v_max=250.0,
    c_max=400.0,
    w_max=500.0,
)

# Best-known points; reliabilities truncated to 9 decimals so they stay feasible.
_RRA = {
    "rra-series": (
        SERIES,
        KnownBest(
            0.931682,
            (0.779398879, 0.871837013, 0.902885357, 0.711402517, 0.787799485, 3, 2, 2, 3, 3),
            "R1: series system (Kuo et al. 1978; Hikita et al. 1992)",
        ),
        "5-subsystem series system",
    ),
    "rra-series-parallel": (
        SERIES_PARALLEL,
        KnownBest(
            0.99997665,
            (0.819659241, 0.844980667, 0.895506452, 0.895506499, 0.868447765, 2, 2, 2, 2, 4),
            "R2: series-parallel system (Hikita et al. 1992)",
        ),
        "5-subsystem series-parallel system",
    ),
    "rra-bridge": (
        BRIDGE,
        KnownBest(
            0.99988964,
            (0.828086547, 0.857804795, 0.914240650, 0.648146109, 0.704162007, 3, 3, 2, 4, 1),
            "R3: complex bridge system (Hikita et al. 1992)",
        ),
        "5-subsystem complex bridge network",
    ),
    "rra-overspeed": (
        OVERSPEED,
        KnownBest(
            0.99995467,
            (0.901614775, 0.849921162, 0.948141369, 0.888222863, 5, 6, 4, 5),
            "R4: overspeed protection of a gas turbine (Dhingra 1992)",
        ),
        "4-subsystem overspeed protection system",
    ),
}


def _register_rra(name, system, best, description):
    register(name)(lambda: rra_problem(name, system, best, description))


for _name, (_system, _best, _desc) in _RRA.items():
    _register_rra(_name, _system, _best, _desc)
