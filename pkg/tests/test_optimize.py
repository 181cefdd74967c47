import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teamai import (
    ALPHA_BAR,
    cost_gradient,
    BETA_BAR,
    expected_cost,
    family_cost,
    front_payoff_threshold,
    oring_instance,
    payoff_report,
    pure_strategy_costs,
    shirk_success_rate,
    solve_chain_general,
    solve_chain_n3,
    solve_oring,
    solve_strategic,
    strategic_ai_cost,
    utilization_condition,
    wage_gap_report,
)
from teamai.chain import cost_batch
from teamai.exceptions import WrongSize
from teamai.optimize import refine_on_simplex, simplex_grid

from strategies import instances


def dense_grid_min(inst, step=1e-3):
    """Brute-force minimum over (x1, 0, x3) with x1 + x3 <= 1."""
    m = int(round(1 / step))
    a, b = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    keep = a + b <= m
    X = np.column_stack([a[keep] * step, np.zeros(keep.sum()), b[keep] * step])
    X = np.minimum(X, 1 - 1e-12)
    costs = cost_batch(inst, X)
    k = int(np.argmin(costs))
    return X[k], costs[k]


# --- closed form ------------------------------------------------------------------

def test_oring_closed_form_values():
    opt = solve_oring(0.5)
    assert opt.x == pytest.approx([0.449490, 0.0, 0.550510], abs=1e-6)
    assert opt.wages.w == pytest.approx([1.333333, 1.632993, 2.0], abs=1e-6)
    assert opt.cost.total == pytest.approx(4.265986, abs=1e-6)
    assert opt.cost.total == pytest.approx(expected_cost(oring_instance(0.5), opt.x).total, rel=1e-13)


def test_oring_limit_shares():
    opt = solve_oring(1e-6)
    assert opt.x[0] == pytest.approx(0.5, abs=1e-6)
    assert opt.x[2] == pytest.approx(0.5, abs=1e-6)


def test_oring_wrong_size():
    with pytest.raises(WrongSize):
        solve_oring(0.5, n=4)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_closed_form_is_grid_minimum(alpha):
    inst = oring_instance(alpha)
    x, cost = dense_grid_min(inst)
    opt = solve_oring(alpha)
    assert opt.cost.total <= cost + 1e-12
    assert opt.cost.total == pytest.approx(cost, abs=1e-5)
    assert np.max(np.abs(x - opt.x)) <= 2e-3


# --- utilization condition --------------------------------------------------------

def test_utilization_condition_examples(oring, under_inst, full_inst):
    assert utilization_condition(oring) == (False, pytest.approx(-0.0625, abs=1e-15))
    under, margin = utilization_condition(under_inst)
    assert under and margin == pytest.approx(0.0325, abs=1e-15)
    under, margin = utilization_condition(full_inst)
    assert not under and margin == pytest.approx(-0.0075, abs=1e-15)


@given(instances(sizes=(3,)), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_front_partial_closed_form(inst, t, share):
    # dW/dx1 with x2 = 0 and x3 held fixed equals c (zeta_1^2 - p3 p0) / (p3 - zeta_1)^2
    h = 1e-6
    x1 = h + t * (0.99 - h)
    x = np.array([x1, 0.0, share * (1 - x1)])
    z1 = shirk_success_rate(inst, x, 1)
    want = inst.c * (z1**2 - inst.pn * inst.p[0]) / (inst.pn - z1) ** 2
    f = lambda u: expected_cost(inst, [u, 0.0, x[2]]).total
    # one-sided (the point may sit on the sum(x) = 1 face), Richardson-extrapolated
    d = lambda s: (f(x1) - f(x1 - s)) / s
    assert 2 * d(h / 2) - d(h) == pytest.approx(want, rel=1e-4, abs=1e-5)
    assert cost_gradient(inst, x, 1).total == pytest.approx(want, rel=1e-10, abs=1e-13)


def test_front_partial_sign_on_full_face(under_inst, full_inst):
    # on x1 + x3 = 1 the front worker's rate is p1, so the sign is that of p1^2 - p3 p0
    for inst, sign in ((under_inst, 1), (full_inst, -1)):
        x = [0.3, 0.0, 0.7 - 1e-12]
        assert np.sign(cost_gradient(inst, x, 1).total) == sign


# --- numerical solvers ------------------------------------------------------------

def test_solver_underutilizes(under_inst):
    opt = solve_chain_n3(under_inst)
    assert opt.x == pytest.approx([0.0, 0.0, 0.5785], abs=1e-3)
    assert opt.cost.total == pytest.approx(4.672704, abs=1e-6)
    assert opt.utilization < 1
    assert opt.diagnostics["predicted_underutilization"]
    assert opt.diagnostics["front_most_unreplaced"]
    x, cost = dense_grid_min(under_inst)
    assert opt.cost.total <= cost + 1e-12


def test_solver_full_utilization(full_inst):
    opt = solve_chain_n3(full_inst)
    assert opt.utilization == pytest.approx(1.0, abs=1e-9)
    assert opt.x == pytest.approx([0.4495, 0.0, 0.5505], abs=1e-3)
    assert opt.cost.total == pytest.approx(4.265986, abs=1e-5)


def test_solver_matches_closed_form(oring):
    opt = solve_chain_n3(oring, grid_step=0.005)
    assert opt.cost.total == pytest.approx(4.265986, abs=1e-5)
    assert np.max(np.abs(opt.x - solve_oring(0.5).x)) <= 1e-4


@settings(max_examples=25)
@given(instances(sizes=(3,)))
def test_solver_beats_pure_strategies(inst):
    opt = solve_chain_n3(inst)
    assert opt.cost.total <= min(v for _, v in pure_strategy_costs(inst)) + 1e-12
    assert opt.x[1] <= 1e-6 and opt.x[2] >= opt.x[0] - 1e-6


def test_general_solver_four_workers():
    inst = oring_instance(0.5, 4)
    opt = solve_chain_general(inst, grid_step=0.01)
    assert opt.diagnostics["heuristic"]
    assert opt.cost.total < min(v for _, v in pure_strategy_costs(inst)) - 1e-3


def test_general_solver_agrees_on_three_workers(full_inst):
    opt = solve_chain_general(full_inst, grid_step=0.02)
    assert not opt.diagnostics["heuristic"]
    assert opt.cost.total == pytest.approx(solve_chain_n3(full_inst).cost.total, abs=1e-8)


def test_simplex_grid_counts():
    g = simplex_grid(3, 4)
    assert len(g) == math.comb(4 + 3, 3)
    assert g.sum(axis=1).max() == 4 and g.min() == 0
    assert len({tuple(r) for r in g}) == len(g)


def test_refine_on_simplex_quadratic():
    target = np.array([0.2, 0.5])
    f = lambda v: float(((v - target) ** 2).sum())
    x, val, _ = refine_on_simplex(f, np.array([0.0, 0.0]), [0, 1], 1.0)
    assert x == pytest.approx(target, abs=1e-6)
    # constrained optimum on the face x1 + x2 = 1
    target = np.array([0.8, 0.6])
    x, val, _ = refine_on_simplex(f, np.array([0.0, 0.0]), [0, 1], 1.0)
    assert x == pytest.approx([0.6, 0.4], abs=1e-6)


# --- randomization family ---------------------------------------------------------

def test_family_endpoints(oring):
    assert family_cost(oring, 0.0) == pytest.approx(4.333333, abs=1e-6)
    assert family_cost(oring, 1.0) == pytest.approx(4.333333, abs=1e-6)


@given(instances(), st.floats(0.0, 1.0))
def test_family_matches_expected_cost(inst, rho):
    x = np.r_[rho, np.zeros(inst.n - 2), 1 - rho]
    x = np.minimum(x, 1.0)
    assert family_cost(inst, rho) == pytest.approx(expected_cost(inst, x).total, rel=1e-12)


@given(instances())
def test_family_strictly_convex(inst):
    w = np.array([family_cost(inst, r) for r in np.linspace(0, 1, 101)])
    assert np.all(w[:-2] - 2 * w[1:-1] + w[2:] > 0)
    assert w[1:-1].min() < w[0]


# --- strategic AI -----------------------------------------------------------------

def test_strategic_oring(oring):
    opt = solve_strategic(oring)
    assert list(opt.x) == [0.0, 0.0, 1.0]
    assert opt.cost.total == pytest.approx(3.476190, abs=1e-6)


@given(instances())
def test_strategic_picks_end_worker(inst):
    opt = solve_strategic(inst)
    assert opt.x[-1] == 1.0 and not np.any(opt.x[:-1])
    for bits in product((0.0, 1.0), repeat=inst.n):
        if sum(bits) <= 1:
            assert opt.cost.total <= strategic_ai_cost(inst, bits).total + 1e-12


# --- wage gap and payoffs ---------------------------------------------------------

def test_wage_gap_example(oring):
    g = wage_gap_report(oring, solve_oring(0.5).x)
    assert g.gap_no_ai == pytest.approx(0.857143, abs=1e-6)
    assert g.gap_at_x == pytest.approx(0.666667, abs=1e-6)
    assert g.ratio == pytest.approx(0.777778, abs=1e-6)


@pytest.mark.parametrize("alpha", [0.05, 0.25, 0.5, 0.75, 0.95])
def test_wage_gap_formulas(alpha):
    g = wage_gap_report(oring_instance(alpha), solve_oring(alpha).x)
    assert g.gap_no_ai == pytest.approx(alpha * (1 + alpha) / (1 - alpha**3), rel=1e-12)
    assert g.gap_at_x == pytest.approx(alpha / (1 - alpha**2), rel=1e-12)
    assert g.ratio == pytest.approx(1 - alpha / (1 + alpha) ** 2, rel=1e-12)


def test_payoff_example(oring):
    rep = payoff_report(oring, solve_oring(0.5).x)
    assert rep.payoffs == pytest.approx([0.183504, 0.632993, 0.449490], abs=1e-6)
    assert rep.deltas[0] == pytest.approx(0.040647, abs=1e-6)
    assert rep.ordering == "2>3>1"


@pytest.mark.parametrize("alpha", [0.1, 0.4, 0.6, 0.9])
def test_payoff_closed_forms(alpha):
    b = math.sqrt(1 + alpha)
    want = [
        (b * b - 1) ** 2 / (b * (b + 1) * (2 - b * b)),
        1 / (b * (2 - b * b)) - 1,
        (b - 1) / (2 - b * b),
    ]
    assert payoff_report(oring_instance(alpha), solve_oring(alpha).x).payoffs == pytest.approx(want, rel=1e-10)


def test_front_threshold():
    root = max(r.real for r in np.roots([1, 0, -1, -1]) if abs(r.imag) < 1e-12)
    assert BETA_BAR == pytest.approx(root, abs=1e-12)
    assert ALPHA_BAR == pytest.approx(0.754878, abs=1e-6)
    assert front_payoff_threshold()[1] == ALPHA_BAR
    lo = payoff_report(oring_instance(ALPHA_BAR - 1e-4), solve_oring(ALPHA_BAR - 1e-4).x).deltas[0]
    hi = payoff_report(oring_instance(ALPHA_BAR + 1e-4), solve_oring(ALPHA_BAR + 1e-4).x).deltas[0]
    assert lo > 0 > hi
