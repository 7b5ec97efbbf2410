"""Violation degree and feasibility-rule ordering.

Inequalities are satisfied when ``g(x) <= 0``; equalities when ``|h(x)| <= eps``.
The ordering is lexicographic: feasible before infeasible, then by objective
among feasible points and by violation among infeasible ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Evaluator = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class ConstraintSet:
    inequality: tuple[Evaluator, ...] = field(default_factory=tuple)
    equality: tuple[Evaluator, ...] = field(default_factory=tuple)

    @property
    def k(self) -> int:
        return len(self.inequality)

    @property
    def m(self) -> int:
        return len(self.equality)

    @property
    def n(self) -> int:
        return self.k + self.m

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray]:
        g = np.array([f(x) for f in self.inequality], dtype=float)
        h = np.array([f(x) for f in self.equality], dtype=float)
        return g, h


def violation_from_values(g, h, epsilon: float) -> float:
    """Mean violation over the raw constraint values ``g`` and ``h``.

    An equality above tolerance contributes ``|h|`` in full, not ``|h| - eps``.
    Returns 0 when there are no constraints at all.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    n = g.size + h.size
    if n == 0:
        return 0.0
    total = np.maximum(g, 0.0).sum()
    ah = np.abs(h)
    total += np.where(ah - epsilon > 0, ah, 0.0).sum()
    return float(total / n)


def violation(cs: ConstraintSet, x, epsilon: float) -> float:
    g, h = cs.evaluate(x)
    return violation_from_values(g, h, epsilon)


def sort_key(objective: float, viol: float) -> tuple:
    if viol == 0:
        return (0, objective)
    return (1, viol)


def compare(a: tuple[float, float], b: tuple[float, float]) -> int:
    """-1 if ``a`` precedes ``b``, 1 if ``b`` precedes ``a``, 0 on a tie.

    ``a`` and ``b`` are ``(objective, violation)`` pairs.
    """
    ka, kb = sort_key(*a), sort_key(*b)
    if ka < kb:
        return -1
    if kb < ka:
        return 1
    return 0


def precedes(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return compare(a, b) < 0


def order(objectives: Sequence[float], violations: Sequence[float]) -> np.ndarray:
    """Stable index order of a population under the feasibility rules."""
    objectives = np.asarray(objectives, dtype=float)
    violations = np.asarray(violations, dtype=float)
    infeasible = violations > 0
    key = np.where(infeasible, violations, objectives)
    # lexsort: last key is primary
    return np.lexsort((key, infeasible))


def sort_population(agents: list) -> list:
    """Agents reordered feasible-first; works on anything with ``objective``/``violation``."""
    return sorted(agents, key=lambda ag: sort_key(ag.objective, ag.violation))
