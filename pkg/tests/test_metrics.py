import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from aiaefa.metrics import (
    RunSummary,
    complexity_ratio,
    exact_signed_rank_pvalue,
    fmt,
    mean_std_fr,
    mpii,
    t_test,
    timing_complexity,
    verdict_for,
    wilcoxon_signed_rank,
    write_csv,
)
from aiaefa.problems import registry_get


def brute_wilcoxon_p(a, b):
    """Two-sided p by enumerating every sign assignment of the non-zero |d| ranks."""
    d = np.asarray(a, float) - np.asarray(b, float)
    d = d[d != 0]
    ranks = stats.rankdata(np.abs(d))
    total = ranks.sum()
    obs = abs(ranks[d > 0].sum() - total / 2)
    hits = 0
    for signs in itertools.product((0, 1), repeat=len(d)):
        w = sum(r for r, s in zip(ranks, signs) if s)
        if abs(w - total / 2) >= obs - 1e-9:
            hits += 1
    return hits / 2 ** len(d)


def test_mean_std_fr_examples():
    assert mean_std_fr(RunSummary([2, 2, 2], [0, 0, 0])) == (2, 0, 100)
    assert mean_std_fr(RunSummary([1] * 20, [0] + [1] * 19))[2] == 5
    m, s, _ = mean_std_fr(RunSummary([1, 3], [0, 0]))
    assert (m, s) == (2, pytest.approx(math.sqrt(2)))
    with pytest.raises(ValueError):
        mean_std_fr(RunSummary([], []))


@given(st.lists(st.tuples(st.floats(-10, 10), st.sampled_from([0.0, 0.5])), min_size=1, max_size=30))
def test_fr_range(rows):
    fr = mean_std_fr(RunSummary([r[0] for r in rows], [r[1] for r in rows]))[2]
    assert 0 <= fr <= 100
    assert (fr == 100) == all(r[1] == 0 for r in rows)


def test_mpii_examples():
    assert mpii(0.931682, 0.973530) == pytest.approx(1.5810, abs=1e-3)
    assert f"{mpii(0.999999, 0.751587):.5g}" == f"{0.999998:.5g}"
    assert mpii(0.4, 0.4) == 0
    with pytest.raises(ZeroDivisionError):
        mpii(0.9, 1.0)


@given(st.floats(0, 1), st.floats(0, 0.999))
def test_mpii_nonnegative(a, b):
    assert mpii(a, b) >= 0


def test_wilcoxon_examples():
    r = wilcoxon_signed_rank([2, 3, 4, 5, 6], [1, 1, 1, 1, 1])
    assert r.p_value == 0.0625 and r.statistic == 0 and r.exact
    assert wilcoxon_signed_rank([1, 2, 3], [1, 2, 3]).verdict == "="
    rng = np.random.default_rng(0)
    b = rng.random(20)
    r = wilcoxon_signed_rank(b + 1 + rng.random(20), b)
    assert r.p_value < 0.05 and r.verdict == "+"
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1, 2, 3], [0, 0, 0])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1, 2], [1])


def test_verdict_rule():
    assert verdict_for(0.01) == "+"
    assert verdict_for(1.0) == "="
    assert verdict_for(0.3) == "-"


@pytest.mark.parametrize("n", range(5, 13))
def test_wilcoxon_exact_matches_enumeration(n):
    rng = np.random.default_rng(n)
    for _ in range(25):
        a = rng.integers(0, 6, n).astype(float)  # coarse values force ties
        b = rng.integers(0, 6, n).astype(float)
        if np.count_nonzero(a - b) < 5:
            continue
        assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(brute_wilcoxon_p(a, b), abs=1e-12)


def test_wilcoxon_matches_scipy_without_ties():
    rng = np.random.default_rng(1)
    for n in (6, 10, 20):
        a, b = rng.normal(size=n), rng.normal(size=n)
        ref = stats.wilcoxon(a, b, method="exact").pvalue
        assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(ref, rel=1e-10)


def test_wilcoxon_normal_branch():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=40), rng.normal(size=40)
    r = wilcoxon_signed_rank(a, b)
    assert not r.exact
    ref = stats.wilcoxon(a, b, method="approx", correction=False).pvalue
    assert r.p_value == pytest.approx(ref, rel=1e-9)


def test_exact_pvalue_symmetry():
    ranks = [1, 2, 3, 4, 5, 6]
    assert exact_signed_rank_pvalue(ranks, 2) == exact_signed_rank_pvalue(ranks, 21 - 2)


def test_t_test_examples():
    assert t_test([1, 2, 3], [1, 2, 3]) == 1
    assert t_test([0, 0, 0, 0], [1, 1, 1, 1.0001]) < 1e-3
    a, b = [1, 4, 2, 8], [3, 3, 5, 9, 1]
    assert t_test(a, b) == t_test(b, a)
    assert t_test(a, b) == pytest.approx(stats.ttest_ind(a, b, equal_var=False).pvalue, rel=1e-12)
    assert t_test([2, 2], [2, 2]) == 1
    with pytest.raises(ValueError):
        t_test([1], [1, 2])


def test_complexity():
    assert complexity_ratio(1, 4) == 3
    with pytest.raises(ValueError):
        complexity_ratio(0, 1)
    p = registry_get("sphere")
    assert timing_complexity([p], lambda prob, fe: [prob.evaluate(np.zeros(2)) for _ in range(fe)], fe_budget=500) > -1
    with pytest.raises(ValueError):
        timing_complexity([], lambda p, fe: None)


def test_fmt_round_trip(tmp_path):
    assert fmt(None) == "" and fmt(True) == "1" and fmt(np.int64(3)) == "3"
    assert float(fmt(0.1234567891234)) == pytest.approx(0.1234567891234, rel=1e-9)
    assert "e" in fmt(2.0)
    write_csv(tmp_path / "x.csv", ("a", "b"), [{"a": 1.5, "b": "x"}, {"a": None}])
    assert (tmp_path / "x.csv").read_text() == "a,b\n1.500000000e+00,x\n,\n"
