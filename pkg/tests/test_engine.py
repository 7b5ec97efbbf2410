import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from aiaefa.constraints import precedes
from aiaefa.core import RunConfig, SearchSpace
from aiaefa.engine import (
    RunError,
    compute_charges,
    compute_forces,
    greedy_replace,
    kbest_size,
    round_half_away,
    run,
    update_position,
    update_velocity,
)
from aiaefa.problems import ProblemSpec, registry_get


def test_charge_examples():
    e = math.e
    assert compute_charges([0, 1]) == pytest.approx([e / (e + 1), 1 / (e + 1)], abs=1e-6)
    assert compute_charges([5, 5, 5]).tolist() == pytest.approx([1 / 3] * 3)


@given(hnp.arrays(float, st.integers(1, 60), elements=st.floats(-1e8, 1e8)))
def test_charges_normalized(fit):
    q = compute_charges(fit)
    assert abs(q.sum() - 1) <= 1e-12
    assert np.all(q > 0)
    # lowest objective holds the largest charge
    assert q[np.argmin(fit)] == q.max()


def test_force_examples():
    x = np.array([[0.0], [1.0]])
    f = compute_forces(x, [0.5, 0.5], 1.0, [0, 1], np.ones((2, 2)), epsilon=0.0)
    assert f[:, 0].tolist() == [0.25, -0.25]
    # attractor on top of the agent: zero pull
    same = np.array([[2.0, 3.0], [2.0, 3.0]])
    assert np.all(compute_forces(same, [0.5, 0.5], 10.0, [1], np.ones((2, 2))) == 0)
    # kbest = {i} only: agent i feels nothing
    f = compute_forces(np.array([[0.0], [4.0], [9.0]]), [0.2, 0.3, 0.5], 3.0, [1], np.ones((3, 3)))
    assert f[1, 0] == 0 and f[0, 0] > 0 and f[2, 0] < 0


def _loop_forces(x, q, k, kb, rand, eps):
    n, d = x.shape
    out = np.zeros((n, d))
    for i in range(n):
        for j in kb:
            if j == i:
                continue
            r = math.sqrt(sum((x[j, t] - x[i, t]) ** 2 for t in range(d)))
            for t in range(d):
                out[i, t] += rand[i, j] * k * q[i] * q[j] * (x[j, t] - x[i, t]) / (r + eps)
    return out


@given(st.integers(2, 8), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_forces_match_loop_oracle(n, d, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    q = compute_charges(rng.normal(size=n))
    kb = rng.permutation(n)[: rng.integers(1, n + 1)]
    rand = rng.random((n, n))
    got = compute_forces(x, q, 7.0, kb, rand, 1e-10)
    assert np.allclose(got, _loop_forces(x, q, 7.0, kb, rand, 1e-10), rtol=1e-12, atol=1e-14)


@given(st.integers(2, 8), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_forces_antisymmetric_when_all_attract(n, d, seed):
    # with all agents in kbest and symmetric draws, total force sums to zero
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    q = compute_charges(rng.normal(size=n))
    r = rng.random((n, n))
    f = compute_forces(x, q, 3.0, np.arange(n), (r + r.T) / 2)
    assert np.allclose(f.sum(axis=0), 0, atol=1e-12)


def test_velocity_examples():
    sp = SearchSpace([-10], [10])
    assert update_velocity(sp, [0.0], [2.0], [0.37], 1.0).tolist() == [2.0]
    assert update_velocity(sp, [1.0], [1.0], [1.0], 1.0).tolist() == [2.0]
    assert update_velocity(sp, [4.0], [1.5], [0.0], 1.0).tolist() == [1.5]
    assert update_velocity(sp, [0.0], [50.0], [0.0], 0.5).tolist() == [10.0]


def test_position_examples():
    cont = SearchSpace([-5], [5])
    ints = SearchSpace([0], [10], integer_mask=[True])
    assert update_position(cont, [1.0], [0.5]).tolist() == [1.5]
    assert update_position(ints, [2.4], [0.2]).tolist() == [3.0]
    assert update_position(ints, [2.4], [0.0]).tolist() == [2.0]
    assert update_position(cont, [1.2], [0.0], mode="integer").tolist() == [1.0]
    assert update_position(cont, [4.0], [3.0]).tolist() == [5.0]


def test_round_half_away():
    assert round_half_away([0.5, 1.5, 2.5, -0.5, -2.5, 2.49]).tolist() == [1, 2, 3, -1, -3, 2]


@given(hnp.arrays(float, 4, elements=st.floats(-20, 20)), hnp.arrays(float, 4, elements=st.floats(-20, 20)))
def test_mixed_update_integrality(x, v):
    sp = SearchSpace([0.5, 1, 0.5, 1], [1, 10, 1, 10], integer_mask=[False, True, False, True])
    y = update_position(sp, x, v)
    assert np.all(y[[1, 3]] == np.round(y[[1, 3]]))
    assert np.all(sp.lower <= y) and np.all(y <= sp.upper)


def test_greedy_examples():
    p = np.zeros(1)
    assert greedy_replace((5, 0, p), (3, 0, p))[:2] == (3, 0)
    assert greedy_replace((3, 0, p), (1, 0.2, p))[:2] == (3, 0)
    assert greedy_replace((0, 0.5, p), (0, 0.1, p))[:2] == (0, 0.1)
    old, new = (1, 0, np.zeros(1)), (1, 0, np.ones(1))
    assert greedy_replace(old, new) is new


def test_kbest_size():
    assert kbest_size("all_agents", 30, 7, 100) == 30
    assert kbest_size("linear_N_to_2", 30, 0, 100) == 30
    assert kbest_size("linear_N_to_2", 30, 100, 100) == 2
    assert kbest_size("linear_N_to_2", 30, 50, 100) == 16


def test_sphere_converges():
    res = run(registry_get("sphere"), RunConfig.ai_aefa(seed=0))
    assert res.best_objective <= 1e-4
    assert res.feasible


def test_toy_constrained():
    res = run(registry_get("toy-quadratic"), RunConfig.ai_aefa(seed=1))
    assert res.best_violation == 0
    assert res.best_objective == pytest.approx(2.0, abs=5e-3)
    assert res.best_position == pytest.approx([1, 1], abs=0.05)


def test_budget_of_one_sweep():
    cfg = RunConfig.ai_aefa(max_evaluations=30, seed=2)
    res = run(registry_get("toy-quadratic"), cfg)
    assert res.evaluations_used == 30 and res.iterations == 1
    assert np.isfinite(res.best_objective)


def test_evaluation_accounting():
    cfg = RunConfig.ai_aefa(max_iterations=40, max_evaluations=10**6, trace=True)
    res = run(registry_get("sphere"), cfg)
    assert res.iterations == 40
    assert res.evaluations_used == 30 * 40
    assert [t.iteration for t in res.trace] == list(range(1, 40))
    cfg = RunConfig.ai_aefa(max_iterations=500, max_evaluations=31 * 10 + 7)
    assert run(registry_get("sphere"), cfg).evaluations_used == 300


def test_deterministic_trace():
    cfg = RunConfig.ai_aefa(max_iterations=60, trace=True, seed=11)
    a = run(registry_get("rra-series"), cfg)
    b = run(registry_get("rra-series"), cfg)
    assert np.array_equal(a.best_position, b.best_position)
    for ta, tb in zip(a.trace, b.trace):
        assert (ta.k_value, ta.q_best, ta.a_norm, ta.f_best) == (tb.k_value, tb.q_best, tb.a_norm, tb.f_best)
        assert np.array_equal(ta.positions, tb.positions)


def test_elite_monotone_and_box():
    prob = registry_get("rosenbrock-disk")
    elites = []
    cfg = RunConfig.aefa(max_iterations=80, trace=True, seed=5)
    res = run(prob, cfg, sink=elites.append)
    f = [t.f_best for t in elites]
    assert all(b <= a for a, b in zip(f, f[1:]))
    for t in res.trace:
        assert np.all(t.positions >= prob.space.lower) and np.all(t.positions <= prob.space.upper)


def test_elite_never_regresses_under_rules():
    prob = registry_get("sphere-equality")
    cfg = RunConfig.ai_aefa(max_iterations=80, trace=True, seed=3)
    res = run(prob, cfg)
    pairs = [prob.evaluate(x) for x in [t.positions for t in res.trace][-1]]
    best = min(pairs, key=lambda p: (p[1] > 0, p[0] if p[1] == 0 else p[1]))
    assert not precedes(best, (prob.evaluate(res.best_position)))


def test_sink_without_trace_keeps_memory_light():
    seen = []
    res = run(registry_get("sphere"), RunConfig.ai_aefa(max_iterations=10), sink=seen.append)
    assert len(seen) == 9 and res.trace == [] and seen[0].positions is None


def test_nonfinite_objective_raises():
    bad = ProblemSpec(
        name="bad",
        space=SearchSpace([-1, -1], [1, 1]),
        objective=lambda x: np.nan if x[0] > 0.9 else float(x @ x),
    )
    with pytest.raises(RunError) as err:
        run(bad, RunConfig.ai_aefa(max_iterations=500, seed=0))
    assert err.value.iteration >= 0 and err.value.agent >= 0
