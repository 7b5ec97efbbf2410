"""Parameter traces, surrogate models and exact Shapley attributions.

Two datasets come out of a trace: ``(K, Q) -> f_best`` and ``(A, E) -> |x_best|``.
A surrogate is fitted to each and explained with interventional Shapley values
computed by full enumeration over feature coalitions.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from aiaefa.core import IterationTrace
from aiaefa.metrics import write_csv

MAX_EXACT_FEATURES = 12

TRACE_COLUMNS = ("iteration", "K", "Q", "A", "E", "f_best", "x_norm")
BAR_COLUMNS = ("dataset", "feature", "mean_abs_shap")
BEESWARM_COLUMNS = ("dataset", "sample", "feature", "shap_value", "feature_value")
CORRELATION_COLUMNS = ("dataset", "var_a", "var_b", "r")

__all__ = [
    "Dataset",
    "IterationTrace",
    "LinearSurrogate",
    "KnnSurrogate",
    "ShapResult",
    "build_datasets",
    "exact_shapley",
    "explain_dataset",
    "export_shap_summary",
    "fit_surrogate",
    "pearson_correlation",
    "write_explanations",
    "write_trace_csv",
]


@dataclass
class Dataset:
    features: np.ndarray  # (rows, M)
    target: np.ndarray  # (rows,)
    feature_names: tuple[str, ...]
    target_name: str

    @property
    def constant_target(self) -> bool:
        return bool(np.ptp(self.target) == 0)

    def table(self) -> tuple[np.ndarray, tuple[str, ...]]:
        return np.column_stack([self.features, self.target]), self.feature_names + (self.target_name,)


def build_datasets(trace: Sequence[IterationTrace]) -> tuple[Dataset, Dataset]:
    if len(trace) == 0:
        raise ValueError("empty trace")
    k = np.array([t.k_value for t in trace])
    q = np.array([t.q_best for t in trace])
    a = np.array([t.a_norm for t in trace])
    e = np.array([t.e_norm for t in trace])
    f = np.array([t.f_best for t in trace])
    x = np.array([t.x_norm for t in trace])
    ds1 = Dataset(np.column_stack([k, q]), f, ("K", "Q"), "f_best")
    ds2 = Dataset(np.column_stack([a, e]), x, ("A", "E"), "x_norm")
    for ds in (ds1, ds2):
        if ds.constant_target:
            warnings.warn(f"target {ds.target_name} is constant over the trace", stacklevel=2)
    return ds1, ds2


def pearson_correlation(data) -> np.ndarray:
    """Pearson matrix over the columns of ``data``; NaN where a column is constant."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D array with at least 2 rows")
    c = x - x.mean(axis=0)
    ss = np.sqrt((c**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (c.T @ c) / np.outer(ss, ss)
    r = np.clip(r, -1.0, 1.0)
    ok = ss > 0
    np.fill_diagonal(r, np.where(ok, 1.0, np.nan))
    r[~ok, :] = np.nan
    r[:, ~ok] = np.nan
    return r


class LinearSurrogate:
    kind = "linear"

    def __init__(self, coef: np.ndarray, intercept: float, regularized: bool = False):
        self.coef = np.asarray(coef, dtype=float)
        self.intercept = float(intercept)
        self.regularized = regularized

    def predict(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.coef + self.intercept


class KnnSurrogate:
    kind = "knn"

    def __init__(self, features: np.ndarray, target: np.ndarray, k: int = 5):
        self.features = np.asarray(features, dtype=float)
        self.target = np.asarray(target, dtype=float)
        self.k = min(k, len(self.target))

    def predict(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d2 = ((x[:, None, :] - self.features[None, :, :]) ** 2).sum(axis=-1)
        # stable so ties resolve by training order
        nn = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        return self.target[nn].mean(axis=1)


RIDGE = 1e-8


def fit_surrogate(dataset: Dataset, kind: str = "linear", k: int = 5):
    x, y = dataset.features, dataset.target
    if x.shape[0] < 3:
        raise ValueError("need at least 3 rows to fit a surrogate")
    if kind == "knn":
        return KnnSurrogate(x, y, k)
    if kind != "linear":
        raise ValueError(f"unknown surrogate kind {kind!r}")

    design = np.column_stack([np.ones(len(y)), x])
    if np.linalg.matrix_rank(design) == design.shape[1]:
        beta, *_ = np.linalg.lstsq(design, y, rcond=None)
        return LinearSurrogate(beta[1:], beta[0])

    warnings.warn("singular design matrix; falling back to ridge", stacklevel=2)
    # ridge on centred columns keeps the intercept unpenalised
    xm, ym = x.mean(axis=0), y.mean()
    xc = x - xm
    coef = np.linalg.solve(xc.T @ xc + RIDGE * np.eye(x.shape[1]), xc.T @ (y - ym))
    return LinearSurrogate(coef, ym - xm @ coef, regularized=True)


@dataclass
class ShapResult:
    base_value: float
    attributions: np.ndarray  # (M,) for one sample, (S, M) for many
    prediction: np.ndarray | float


def _coalition_values(model, background: np.ndarray, sample: np.ndarray) -> dict[frozenset, float]:
    m = sample.shape[0]
    values = {}
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            pinned = background.copy()
            if subset:
                pinned[:, subset] = sample[list(subset)]
            values[frozenset(subset)] = float(np.mean(model.predict(pinned)))
    return values


def exact_shapley(model, background, sample) -> ShapResult:
    """Interventional Shapley values by enumerating all 2^M coalitions."""
    background = np.atleast_2d(np.asarray(background, dtype=float))
    sample = np.asarray(sample, dtype=float)
    m = sample.shape[0]
    if background.shape[0] == 0:
        raise ValueError("empty background")
    if background.shape[1] != m:
        raise ValueError("sample and background disagree on feature count")
    if m > MAX_EXACT_FEATURES:
        raise ValueError(f"exact enumeration limited to {MAX_EXACT_FEATURES} features, got {m}")

    v = _coalition_values(model, background, sample)
    phi = np.zeros(m)
    for i in range(m):
        others = [j for j in range(m) if j != i]
        for size in range(m):
            weight = math.factorial(size) * math.factorial(m - size - 1) / math.factorial(m)
            for subset in itertools.combinations(others, size):
                s = frozenset(subset)
                phi[i] += weight * (v[s | {i}] - v[s])
    return ShapResult(v[frozenset()], phi, v[frozenset(range(m))])


def background_rows(features: np.ndarray, limit: int = 100) -> np.ndarray:
    """Evenly spaced subset of rows, deterministic."""
    if features.shape[0] <= limit:
        return features
    idx = np.linspace(0, features.shape[0] - 1, limit).round().astype(int)
    return features[idx]


def explain_dataset(model, dataset: Dataset, background_limit: int = 100) -> ShapResult:
    bg = background_rows(dataset.features, background_limit)
    results = [exact_shapley(model, bg, row) for row in dataset.features]
    return ShapResult(
        results[0].base_value,
        np.array([r.attributions for r in results]),
        np.array([r.prediction for r in results]),
    )


def export_shap_summary(result: ShapResult, dataset: Dataset, label: str = "dataset1"):
    """Bar rows (mean |phi| per feature, descending) and per-sample beeswarm rows."""
    phi = np.atleast_2d(result.attributions)
    names = dataset.feature_names
    mean_abs = np.abs(phi).mean(axis=0)
    # stable so equal bars keep feature order
    rank = np.argsort(-mean_abs, kind="stable")
    bar = [{"dataset": label, "feature": names[j], "mean_abs_shap": float(mean_abs[j])} for j in rank]
    swarm = [
        {
            "dataset": label,
            "sample": s,
            "feature": names[j],
            "shap_value": float(phi[s, j]),
            "feature_value": float(dataset.features[s, j]),
        }
        for s in range(phi.shape[0])
        for j in range(phi.shape[1])
    ]
    return bar, swarm


def correlation_rows(dataset: Dataset, label: str = "dataset1") -> list[dict]:
    table, names = dataset.table()
    r = pearson_correlation(table)
    return [
        {"dataset": label, "var_a": names[i], "var_b": names[j], "r": float(r[i, j])}
        for i in range(len(names))
        for j in range(len(names))
    ]


def write_trace_csv(path, trace: Sequence[IterationTrace]) -> None:
    rows = (
        {
            "iteration": t.iteration,
            "K": t.k_value,
            "Q": t.q_best,
            "A": t.a_norm,
            "E": t.e_norm,
            "f_best": t.f_best,
            "x_norm": t.x_norm,
        }
        for t in trace
    )
    write_csv(path, TRACE_COLUMNS, rows)


def write_explanations(trace: Sequence[IterationTrace], out_dir, kind: str = "linear") -> dict:
    """Fit, explain and export both trace datasets.

    Writes ``shap_bar.csv``, ``shap_beeswarm.csv`` and ``correlation.csv`` into
    ``out_dir``; returns the per-dataset ``ShapResult``.
    """
    out_dir = Path(out_dir)
    bars, swarms, corr, results = [], [], [], {}
    for label, ds in zip(("dataset1", "dataset2"), build_datasets(trace)):
        corr += correlation_rows(ds, label)
        if ds.features.shape[0] < 3:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = fit_surrogate(ds, kind)
        res = explain_dataset(model, ds)
        bar, swarm = export_shap_summary(res, ds, label)
        bars += bar
        swarms += swarm
        results[label] = res
    write_csv(out_dir / "shap_bar.csv", BAR_COLUMNS, bars)
    write_csv(out_dir / "shap_beeswarm.csv", BEESWARM_COLUMNS, swarms)
    write_csv(out_dir / "correlation.csv", CORRELATION_COLUMNS, corr)
    return results
