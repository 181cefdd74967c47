"""Star teams: peripheral workers 1..n-1 all signal to the central worker n.

A peripheral shirk only propagates through the centre, so the shirking
peripheral loses one effort (plus the centre's, unless the centre is AI).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import CostBreakdown
from .exceptions import FullyReplaced, OutOfRange
from .model import Instance, ReplacementStrategy, as_strategy, validate_strategy
from .optimize import CLAMP, _grid_search, _jsonable, refine_on_simplex, snap_margin


@dataclass(frozen=True, eq=False)
class StarSolution:
    x: ReplacementStrategy
    canonical: bool
    condition_margin: float
    cost: CostBreakdown
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "x": [float(v) for v in self.x.x],
            "canonical": self.canonical,
            "condition_margin": self.condition_margin,
            "cost": self.cost.to_dict(),
            "diagnostics": _jsonable(self.diagnostics),
        }


def star_shirk_rate(inst: Instance, x, i: int) -> float:
    s = as_strategy(inst, x)
    n, p = inst.n, inst.p
    if not 1 <= i <= n:
        raise OutOfRange(f"position must be in 1..{n}, got {i}")
    if s.x[i - 1] >= 1.0:
        raise FullyReplaced(f"worker {i} is replaced with certainty; zeta is undefined")
    if i == n:
        return float(p[n - 1])
    return float(p[n - 2] + s.x[n - 1] / (1.0 - s.x[i - 1]) * (p[n - 1] - p[n - 2]))


def _star_cost_rows(inst, X):
    X = np.atleast_2d(X)
    n, p, pn, c = inst.n, inst.p, inst.pn, inst.c
    stay = 1.0 - X
    with np.errstate(divide="ignore", invalid="ignore"):
        z = p[n - 2] + X[:, [n - 1]] / stay * (p[n - 1] - p[n - 2])
        z[:, n - 1] = p[n - 1]
        terms = X * c + stay * pn * c / (pn - z)
    return np.where(X >= 1.0, c, terms).sum(axis=1)


def star_expected_cost(inst: Instance, x) -> CostBreakdown:
    s = as_strategy(inst, x)
    pn, c = inst.pn, inst.c
    per = np.empty(inst.n)
    for i in range(1, inst.n + 1):
        xi = s.x[i - 1]
        if xi >= 1.0:
            per[i - 1] = c
        else:
            per[i - 1] = xi * c + (1.0 - xi) * pn * c / (pn - star_shirk_rate(inst, s, i))
    # fsum makes the total independent of the order of the peripherals
    ai = math.fsum(s.x * c)
    total = math.fsum(per)
    return CostBreakdown(ai, math.fsum(np.r_[per, -ai]), total, per)


def star_condition(inst: Instance):
    """``(holds, margin)`` with ``margin = p[n-1]**2 - p[n]*p[n-2]``; holds when margin <= 0.

    Margins within a few ulps of zero are snapped to exactly zero, so the
    O-ring family (where the margin vanishes identically) reads as 0.
    """
    n, p = inst.n, inst.p
    margin = snap_margin(p[n - 1] * p[n - 1], p[n] * p[n - 2])
    return margin <= 0, margin


def solve_star(inst: Instance, grid_step=0.005, n_checks=10, seed=0) -> StarSolution:
    """Equal split of the AI over the peripherals when the sufficient condition holds.

    Otherwise search ``(common peripheral share, central share)`` on a grid
    and refine; that fallback carries ``heuristic=True``.
    """
    n = inst.n
    holds, margin = star_condition(inst)
    if holds:
        x = np.r_[np.full(n - 1, 1.0 / (n - 1)), 0.0]
        s = validate_strategy(x, 1.0)
        rng = np.random.default_rng(seed)
        splits = [np.r_[rng.dirichlet(np.ones(n - 1)), 0.0] for _ in range(n_checks)]
        costs = [star_expected_cost(inst, validate_strategy(y, 1.0)).total for y in splits]
        diag = {
            "characterization": "sum of peripheral shares = 1, central share = 0",
            "split_cost_spread": float(max(costs) - min(costs)),
            "heuristic": False,
        }
        return StarSolution(s, True, margin, star_expected_cost(inst, s), diag)

    # reduced problem in (u, v): every peripheral gets u, the centre gets v; (n-1)u + v <= 1
    def expand(U):
        U = np.atleast_2d(U)
        return np.column_stack([np.repeat(U[:, [0]], n - 1, axis=1), U[:, [1]]])

    # weight the peripheral coordinate so the reduced simplex is sum <= 1
    def rows(Y):
        Y = np.atleast_2d(Y)
        return _star_cost_rows(inst, expand(np.column_stack([Y[:, 0] / (n - 1), Y[:, 1]])))

    y0, grid_val, npts, m = _grid_search(rows, 2, [0, 1], grid_step, 1.0)
    y, val, info = refine_on_simplex(lambda v: float(rows(v[None, :])[0]), y0, [0, 1], 1.0)
    if grid_val < val:
        y = y0
    y = np.where(y < 1e-8, 0.0, y)
    x = expand(np.array([[min(y[0] / (n - 1), CLAMP), y[1]]]))[0]
    s = validate_strategy(x, 1.0)
    diag = {"heuristic": True, "grid_points": npts, "grid_best": grid_val, "refine": info}
    return StarSolution(s, False, margin, star_expected_cost(inst, s), diag)
