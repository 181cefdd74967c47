import json

import numpy as np
import pytest

from teamai import (
    domino_trace,
    expected_cost,
    monte_carlo,
    offpath_shirk_rate,
    optimal_wages,
    play_once,
    shirk_success_rate,
    solve_oring,
)
from teamai.exceptions import InconsistentWages, OutOfRange


def test_domino_examples():
    assert domino_trace(3, (), 1) == (0, 0, 0)
    assert domino_trace(3, (2,), 1) == (0, 1, 1)
    assert domino_trace(3, (), None) == (1, 1, 1)
    assert domino_trace(3, (3,), 1) == (0, 0, 1)
    assert domino_trace(4, (3,), 2) == (1, 0, 1, 1)
    # forcing a shirk on the AI position changes nothing
    assert domino_trace(3, (2,), 2) == (1, 1, 1)


def test_play_once_deterministic(oring):
    opt = solve_oring(0.5)
    a = play_once(oring, opt.x, opt.wages, rng=7)
    b = play_once(oring, opt.x, opt.wages, rng=7)
    assert a == b
    assert a.signals[0] is None and a.signals[1:] == a.efforts[:-1]


def test_play_once_forced_deviation_with_end_ai(oring):
    t = play_once(oring, [0, 0, 1.0], optimal_wages(oring, [0, 0, 1.0]), forced_deviant=1, rng=0)
    assert t.replaced == 3 and t.efforts == (0, 0, 1)


def test_success_rate_no_ai(full_inst):
    r = monte_carlo(full_inst, [0, 0, 0], optimal_wages(full_inst, [0, 0, 0]), 100_000, 42)
    assert r.success_se == pytest.approx(np.sqrt(0.6 * 0.4 / 1e5), rel=1e-2)
    assert abs(r.success_rate - 0.6) <= 3 * r.success_se
    assert abs(r.mean_cost - expected_cost(full_inst, [0, 0, 0]).total) <= 3 * r.cost_se


def test_cost_at_oring_optimum(oring):
    opt = solve_oring(0.5)
    r = monte_carlo(oring, opt.x, opt.wages, 100_000, 42)
    assert r.success_rate == 1.0
    assert abs(r.mean_cost - 4.265986) <= 3 * r.cost_se
    pay = (1 - opt.x) * (oring.pn * opt.wages.w - oring.c)
    for got, want, se in zip(r.mean_payoffs, pay, r.payoff_se):
        assert abs(got - want) <= 3 * se + 1e-12


def test_deviation_rates(full_inst):
    x = np.array([0.0, 0.0, 0.5])
    w = optimal_wages(full_inst, x)
    r = monte_carlo(full_inst, x, w, 100_000, 42, forced_deviant=2, condition_human=(2,))
    assert abs(r.conditional_success_rate - shirk_success_rate(full_inst, x, 2)) <= 3 * r.conditional_success_se
    r = monte_carlo(full_inst, x, w, 100_000, 42, forced_deviant=2, condition_human=(2, 3))
    assert abs(r.conditional_success_rate - offpath_shirk_rate(full_inst, x, 3)) <= 3 * r.conditional_success_se


def test_replay_is_bitwise_identical(full_inst, monkeypatch):
    x = [0.2, 0.0, 0.5]
    w = optimal_wages(full_inst, x)
    a = monte_carlo(full_inst, x, w, 50_000, 42, threads=1)
    monkeypatch.setenv("TEAMAI_THREADS", "3")
    b = monte_carlo(full_inst, x, w, 50_000, 42)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    c = monte_carlo(full_inst, x, w, 50_000, 43)
    assert c.mean_cost != a.mean_cost


def test_simulation_errors(full_inst):
    w = optimal_wages(full_inst, [0, 0, 0])
    with pytest.raises(OutOfRange):
        monte_carlo(full_inst, [0, 0, 0], w, 0)
    with pytest.raises(OutOfRange):
        monte_carlo(full_inst, [0, 0, 0], w, 10, forced_deviant=4)
    with pytest.raises(InconsistentWages):
        monte_carlo(full_inst, [0, 0, 0], [1.0, np.nan, 1.0], 10)
    with pytest.raises(InconsistentWages):
        monte_carlo(full_inst, [0, 0, 0], [1.0, 1.0], 10)
