"""Run aggregation and comparison statistics."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

EXACT_MAX_N = 25
ALPHA = 0.05

COMPARISON_COLUMNS = (
    "problem",
    "algorithm",
    "mean",
    "std",
    "FR",
    "p_wilcoxon",
    "verdict",
    "mpii",
    "time_complexity",
)


@dataclass
class RunSummary:
    objectives: np.ndarray
    violations: np.ndarray
    wall_times: np.ndarray | None = None

    def __post_init__(self):
        self.objectives = np.asarray(self.objectives, dtype=float)
        self.violations = np.asarray(self.violations, dtype=float)
        if self.wall_times is None:
            self.wall_times = np.zeros_like(self.objectives)
        self.wall_times = np.asarray(self.wall_times, dtype=float)
        if not (self.objectives.shape == self.violations.shape == self.wall_times.shape):
            raise ValueError("per-run vectors must have equal length")

    @property
    def feasible(self) -> np.ndarray:
        return self.violations == 0

    def __len__(self):
        return self.objectives.shape[0]


def mean_std_fr(summary: RunSummary) -> tuple[float, float, float]:
    """Mean, sample std (ddof=1) and feasibility rate in percent."""
    if len(summary) == 0:
        raise ValueError("empty summary")
    obj = summary.objectives
    std = float(obj.std(ddof=1)) if len(obj) > 1 else 0.0
    fr = 100.0 * summary.feasible.sum() / len(summary)
    return float(obj.mean()), std, float(fr)


def mpii(mean_ai: float, mean_other: float) -> float:
    """Fraction of the remaining gap to perfect reliability closed by ``mean_ai``."""
    if mean_other == 1:
        raise ZeroDivisionError("MPII undefined when the reference mean equals 1")
    return abs((mean_ai - mean_other) / (1.0 - mean_other))


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    p_value: float
    verdict: str
    n: int
    exact: bool


def verdict_for(p: float) -> str:
    """'+' when significant at 5 %, '=' when p is exactly 1, '-' otherwise."""
    if p < ALPHA:
        return "+"
    if p == 1.0:
        return "="
    return "-"


def _average_ranks(values: np.ndarray) -> np.ndarray:
    return stats.rankdata(values, method="average")


def exact_signed_rank_pvalue(ranks: Sequence[float], w_plus: float) -> float:
    """Two-sided exact p for W+ given the (possibly tied) ranks.

    Counts sign patterns whose W+ lies at least as far from its mean as the
    observed one. Ranks are doubled so half-ranks from ties stay integral.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    reach = 0
    for r in doubled:
        for s in range(reach, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
        reach += r
    obs = abs(2 * int(round(2 * w_plus)) - total)
    hits = sum(c for s, c in enumerate(counts) if abs(2 * s - total) >= obs)
    return min(1.0, hits / 2 ** len(doubled))


def wilcoxon_signed_rank(paired_a, paired_b, min_n: int = 5) -> WilcoxonResult:
    """Paired two-sided signed-rank test; zero differences are dropped.

    Exact for up to 25 non-zero pairs, tie-corrected normal approximation above.
    """
    a = np.asarray(paired_a, dtype=float)
    b = np.asarray(paired_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("paired samples must have equal length")
    diff = a - b
    diff = diff[diff != 0]
    n = diff.size
    if n == 0:
        return WilcoxonResult(0.0, 1.0, "=", 0, True)
    if n < min_n:
        raise ValueError(f"need at least {min_n} non-zero differences, got {n}")

    ranks = _average_ranks(np.abs(diff))
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    stat = min(w_plus, w_minus)

    if n <= EXACT_MAX_N:
        p = exact_signed_rank_pvalue(ranks, w_plus)
        return WilcoxonResult(stat, p, verdict_for(p), n, True)

    mean = n * (n + 1) / 4
    _, tie_counts = np.unique(np.abs(diff), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - (tie_counts**3 - tie_counts).sum() / 48
    z = (w_plus - mean) / math.sqrt(var)
    p = min(1.0, math.erfc(abs(z) / math.sqrt(2)))
    return WilcoxonResult(stat, p, verdict_for(p), n, False)


def t_test(sample_a, sample_b) -> float:
    """Two-sided Welch t-test p-value."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 values")
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    diff = a.mean() - b.mean()
    se2 = va + vb
    if se2 == 0:
        return 1.0 if diff == 0 else 0.0
    t = diff / math.sqrt(se2)
    dof = se2**2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1))
    return float(min(1.0, 2 * stats.t.sf(abs(t), dof)))


def complexity_ratio(t1: float, t2: float) -> float:
    if t1 <= 0:
        raise ValueError("T1 must be positive")
    return (t2 - t1) / t1


def timing_complexity(problems: Sequence, algorithm: Callable[[object, int], object], fe_budget: int = 10000, seed: int = 0) -> float:
    """``(T2 - T1) / T1`` over a problem set.

    T1 times ``fe_budget`` bare evaluations at uniform random points; T2 times
    ``algorithm(problem, fe_budget)``. Both are averaged over ``problems``.
    One throwaway call per problem warms caches first.
    """
    if not problems:
        raise ValueError("need at least one problem")
    rng = np.random.default_rng(seed)
    t1s, t2s = [], []
    for p in problems:
        lo, hi = p.space.lower, p.space.upper
        pts = lo + rng.random((fe_budget, p.space.dim)) * (hi - lo)
        p.evaluate(pts[0])
        t0 = time.perf_counter()
        for x in pts:
            p.evaluate(x)
        t1s.append(time.perf_counter() - t0)

        t0 = time.perf_counter()
        algorithm(p, fe_budget)
        t2s.append(time.perf_counter() - t0)
    return complexity_ratio(float(np.mean(t1s)), float(np.mean(t2s)))


def fmt(value) -> str:
    """Locale-free CSV cell: scientific with 10 significant digits, blank for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9e}"
    return str(value)


def write_csv(path, columns: Sequence[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])
