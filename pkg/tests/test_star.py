from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from teamai import oring_instance, solve_star, star_condition, star_expected_cost, star_shirk_rate
from teamai.exceptions import FullyReplaced

from strategies import instance_and_interior, instances


def star_zeta_by_events(inst, x, i):
    """A peripheral shirk costs the centre's effort too unless the centre is AI."""
    n, p = inst.n, inst.p
    if i == n:
        return p[n - 1]
    centre_ai = x[n - 1] / (1 - x[i - 1])
    return centre_ai * p[n - 1] + (1 - centre_ai) * p[n - 2]


def test_star_zeta_examples(oring):
    assert star_shirk_rate(oring, [0.5, 0.5, 0.0], 1) == pytest.approx(0.25)
    assert star_shirk_rate(oring, [0.2, 0.2, 0.6], 1) == pytest.approx(0.4375, abs=1e-12)
    assert star_shirk_rate(oring, [0.2, 0.2, 0.6], 3) == oring.p[2]
    with pytest.raises(FullyReplaced):
        star_shirk_rate(oring, [1.0, 0.0, 0.0], 1)


@given(instance_and_interior())
def test_star_zeta_matches_event_oracle(case):
    inst, x = case
    for i in range(1, inst.n + 1):
        assert star_shirk_rate(inst, x, i) == pytest.approx(star_zeta_by_events(inst, x, i), abs=1e-14)


def test_star_cost_examples(oring):
    assert star_expected_cost(oring, [0.5, 0.5, 0.0]).total == pytest.approx(4.333333, abs=1e-6)
    assert star_expected_cost(oring, [1.0, 0.0, 0.0]).total == pytest.approx(4.333333, abs=1e-6)
    assert star_expected_cost(oring, [0.0, 0.0, 0.0]).total == pytest.approx(4.666667, abs=1e-6)


@given(instance_and_interior((3, 4, 5)))
def test_star_cost_symmetric_in_peripherals(case):
    inst, x = case
    base = star_expected_cost(inst, x).total
    for perm in permutations(range(inst.n - 1)):
        y = np.r_[x[list(perm)], x[-1]]
        assert star_expected_cost(inst, y).total == base


def test_star_condition_examples(under_inst, full_inst):
    assert star_condition(full_inst) == (True, 0.0)
    holds, margin = star_condition(under_inst)
    assert not holds and margin == pytest.approx(0.0525, abs=1e-15)


@given(st.floats(0.01, 0.99), st.integers(3, 8))
def test_oring_star_margin_is_zero(alpha, n):
    assert star_condition(oring_instance(alpha, n)) == (True, 0.0)


def test_star_canonical(oring):
    sol = solve_star(oring)
    assert sol.canonical
    assert list(sol.x.x) == [0.5, 0.5, 0.0]
    assert sol.cost.total == pytest.approx(4.333333, abs=1e-6)
    assert sol.diagnostics["split_cost_spread"] <= 1e-12
    assert solve_star(oring_instance(0.5, 4)).x.x == pytest.approx([1 / 3, 1 / 3, 1 / 3, 0.0])


@given(instances((3, 4, 5)), st.integers(0, 2**32 - 1))
def test_canonical_beats_random_strategies(inst, seed):
    if not star_condition(inst)[0]:
        return
    sol = solve_star(inst)
    rng = np.random.default_rng(seed)
    for x in rng.dirichlet(np.ones(inst.n + 1), size=50)[:, : inst.n]:
        assert sol.cost.total <= star_expected_cost(inst, x).total + 1e-12


def test_star_fallback_is_flagged(under_inst):
    sol = solve_star(under_inst)
    assert not sol.canonical and sol.diagnostics["heuristic"]
    grid = np.linspace(0, 1, 101)
    brute = min(
        star_expected_cost(under_inst, [u / 2, u / 2, v]).total
        for u in grid for v in grid if u + v <= 1 + 1e-12 and u / 2 < 1 and v < 1
    )
    assert sol.cost.total <= brute + 1e-12
