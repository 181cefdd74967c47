"""Optimal replacement strategies for the chain and derived wage/payoff analyses."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .chain import (
    CostBreakdown,
    WageSchedule,
    cost_batch,
    expected_cost,
    optimal_wages,
    pure_strategy_costs,
    strategic_ai_cost,
)
from .exceptions import BadAlpha, FullyReplaced, OutOfRange, WrongSize
from .model import Instance, ReplacementStrategy, as_strategy, oring_instance, validate_strategy

# refinement keeps every coordinate strictly below 1 to stay off the x_i = 1 singularity
CLAMP = 1.0 - 1e-9
SNAP = 1e-8
TIE = 1e-12


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    GRID_REFINE = "grid_refine"
    ENUMERATION = "enumeration"


@dataclass(frozen=True, eq=False)
class Optimum:
    x_star: ReplacementStrategy
    wages: WageSchedule
    cost: CostBreakdown
    utilization: float
    method: Method
    diagnostics: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.x_star.x

    def to_dict(self):
        return {
            "x_star": [float(v) for v in self.x],
            "capacity": self.x_star.capacity,
            "wages": self.wages.to_list(),
            "cost": self.cost.to_dict(),
            "utilization": self.utilization,
            "method": self.method.value,
            "diagnostics": _jsonable(self.diagnostics),
        }


@dataclass(frozen=True)
class GapReport:
    gap_no_ai: float
    gap_at_x: float
    ratio: float

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class PayoffReport:
    payoffs: np.ndarray
    baseline: np.ndarray
    deltas: np.ndarray
    ordering: str

    def to_dict(self):
        return {
            "payoffs": [float(v) for v in self.payoffs],
            "baseline": [float(v) for v in self.baseline],
            "deltas": [float(v) for v in self.deltas],
            "ordering": self.ordering,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def _require_n3(inst):
    if inst.n != 3:
        raise WrongSize(f"this characterization is for three workers, got n={inst.n}")


def _make_optimum(inst, x, method, diagnostics, cost_fn=expected_cost, capacity=1.0):
    x = np.where(np.abs(x) < SNAP, 0.0, x)
    s = validate_strategy(np.clip(x, 0.0, 1.0), capacity)
    cost = cost_fn(inst, s)
    wages = optimal_wages(inst, s) if cost_fn is expected_cost else WageSchedule(
        w=np.where(s.x >= 1.0, np.nan, inst.c / (inst.pn - inst.p[:-1]))
    )
    return Optimum(s, wages, cost, float(s.x.sum()), method, diagnostics)


# --- closed form ------------------------------------------------------------

def oring_closed_form(alpha, c=1.0):
    """Optimal front-most share, wages and cost for the three-worker O-ring team."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha}")
    x1 = (math.sqrt(1.0 + alpha) - 1.0) / alpha
    x = np.array([x1, 0.0, 1.0 - x1])
    w = np.array([c / (1.0 - alpha**2), c / ((1.0 - alpha) * math.sqrt(1.0 + alpha)), c / (1.0 - alpha)])
    return x, w


def solve_oring(alpha, c=1.0, n=3) -> Optimum:
    if n != 3:
        raise WrongSize(f"the closed form covers three workers, got n={n}")
    x, w = oring_closed_form(alpha, c)
    inst = oring_instance(alpha, 3, c)
    s = validate_strategy(x, 1.0)
    cost = CostBreakdown(
        ai_cost=float(c * x.sum()),
        wage_cost=float(((1 - x) * inst.pn * w).sum()),
        total=float((x * c + (1 - x) * inst.pn * w).sum()),
        per_worker=x * c + (1 - x) * inst.pn * w,
    )
    diag = {"alpha": float(alpha), "full_utilization": True}
    return Optimum(s, WageSchedule(w=w), cost, float(x.sum()), Method.CLOSED_FORM, diag)


def utilization_condition(inst: Instance):
    """``(underutilize, margin)`` with ``margin = p1**2 - p3*p0``."""
    _require_n3(inst)
    p = inst.p
    margin = snap_margin(p[1] * p[1], p[3] * p[0])
    return margin > 0, margin


def snap_margin(a, b, ulps=8):
    """``a - b``, or exactly 0.0 when the difference is at rounding level."""
    d = float(a - b)
    return 0.0 if abs(d) <= ulps * np.finfo(float).eps * max(abs(a), abs(b)) else d


# --- numerical search -------------------------------------------------------

def simplex_grid(k, m):
    """All nonnegative integer vectors of length ``k`` with sum at most ``m``."""
    if k == 1:
        return np.arange(m + 1, dtype=np.int32)[:, None]
    blocks = []
    for first in range(m + 1):
        rest = simplex_grid(k - 1, m - first)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int32), rest]))
    return np.vstack(blocks)


def _grid_search(cost_rows, n, free, step, capacity, chunk=200_000):
    m = int(math.floor(capacity / step + 1e-9))
    pts = simplex_grid(len(free), m)
    best_val, best_x = np.inf, None
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        X = np.zeros((len(block), n))
        X[:, free] = block * (capacity / m)
        vals = cost_rows(X)
        lo = vals.min()
        if lo < best_val - TIE:
            best_val = lo
            cand = X[vals <= lo + TIE]
            best_x = cand[np.argmin(cand.sum(axis=1))]
        elif lo <= best_val + TIE:
            cand = np.vstack([best_x[None, :], X[vals <= best_val + TIE]])
            best_x = cand[np.argmin(cand.sum(axis=1))]
            best_val = min(best_val, lo)
    return best_x, float(best_val), len(pts), m


def _line_min(f, lo, hi):
    if hi - lo <= 0:
        return 0.0, f(0.0)
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13, "maxiter": 500})
    best_t, best_v = 0.0, f(0.0)
    for t, v in ((res.x, res.fun), (lo, f(lo)), (hi, f(hi))):
        if v < best_v - 1e-15:
            best_t, best_v = t, v
    return best_t, best_v


def refine_on_simplex(cost_fn, x0, free, capacity=1.0, tol=1e-10, max_sweeps=2000):
    """Derivative-free polish by exact line searches that shift mass between pairs.

    Each move transfers ``t`` from one free coordinate (or the unused
    capacity) to another, so every iterate stays feasible and can slide along
    the ``sum(x) = capacity`` face. Coordinates are kept below ``CLAMP``.
    """
    x = np.clip(np.asarray(x0, dtype=float), 0.0, CLAMP)
    fx = cost_fn(x)
    slack = -1
    nodes = list(free) + [slack]
    trace = []
    for sweep in range(max_sweeps):
        moved = 0.0
        for a, b in itertools.combinations(nodes, 2):
            # x[a] += t, x[b] -= t (b == slack means unused capacity)
            if b == slack:
                room = capacity - x.sum()
                lo, hi = -x[a], min(room, CLAMP - x[a])
            else:
                lo, hi = max(-x[a], x[b] - CLAMP), min(x[b], CLAMP - x[a])
            base = x.copy()

            def f(t, a=a, b=b, base=base):
                y = base.copy()
                y[a] += t
                if b != slack:
                    y[b] -= t
                return cost_fn(np.clip(y, 0.0, None))

            t, v = _line_min(f, lo, hi)
            if v < fx:
                x[a] += t
                if b != slack:
                    x[b] -= t
                x = np.clip(x, 0.0, CLAMP)
                moved = max(moved, abs(t))
                fx = cost_fn(x)
        trace.append(fx)
        if moved < tol:
            break
    return x, fx, {"sweeps": sweep + 1, "converged": moved < tol, "last_step": moved}


def _chain_cost_scalar(inst):
    def f(x):
        return float(cost_batch(inst, x[None, :])[0])

    return f


def solve_chain_n3(inst: Instance, grid_step=1 / 200, tol=1e-8) -> Optimum:
    """Numerical optimum for three workers with the middle worker kept human.

    Coarse grid over ``(x1, x3)`` then pairwise line-search refinement.
    """
    _require_n3(inst)
    free = [0, 2]
    x0, grid_val, npts, m = _grid_search(lambda X: cost_batch(inst, X), 3, free, grid_step, 1.0)
    x, val, info = refine_on_simplex(_chain_cost_scalar(inst), x0, free, 1.0, tol=min(tol, 1e-10))
    if grid_val < val:
        x, val = x0, grid_val
    under, margin = utilization_condition(inst)
    diag = {
        "grid_step": 1.0 / m,
        "grid_points": npts,
        "grid_best": grid_val,
        "grid_x": x0,
        "refine": info,
        "middle_fixed_at_zero": True,
        "utilization_margin": margin,
        "predicted_underutilization": under,
        "front_most_unreplaced": bool(x[0] < SNAP),
    }
    opt = _make_optimum(inst, x, Method.GRID_REFINE, diag)
    opt.diagnostics["beats_pure_strategies"] = opt.cost.total <= min(v for _, v in pure_strategy_costs(inst)) + TIE
    return opt


def solve_chain_general(inst: Instance, grid_step=0.01, tol=1e-8) -> Optimum:
    """Grid-plus-refine search over the whole simplex; heuristic for n > 3."""
    if not 0 < grid_step <= 0.5:
        raise OutOfRange(f"grid_step must lie in (0, 0.5], got {grid_step}")
    free = list(range(inst.n))
    x0, grid_val, npts, m = _grid_search(lambda X: cost_batch(inst, X), inst.n, free, grid_step, 1.0)
    x, val, info = refine_on_simplex(_chain_cost_scalar(inst), x0, free, 1.0, tol=min(tol, 1e-10))
    if grid_val < val:
        x = x0
    pure_min = min(v for _, v in pure_strategy_costs(inst))
    diag = {
        "grid_step": 1.0 / m,
        "grid_points": npts,
        "grid_best": grid_val,
        "refine": info,
        "heuristic": inst.n > 3,
        "pure_min": pure_min,
    }
    opt = _make_optimum(inst, x, Method.GRID_REFINE, diag)
    opt.diagnostics["beats_pure_strategies"] = opt.cost.total <= pure_min + TIE
    return opt


def family_cost(inst: Instance, rho) -> float:
    """Cost of replacing the front-most worker w.p. ``rho`` and the end-most w.p. ``1 - rho``."""
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise OutOfRange(f"rho must lie in [0, 1], got {rho}")
    n, p, pn = inst.n, inst.p, inst.pn
    middle = sum(pn / (pn - (1 - rho) * p[i] - rho * p[i - 1]) for i in range(2, n))
    return float(inst.c * (middle + (1 - rho) * pn / (pn - p[1]) + rho * pn / (pn - p[n - 1]) + 1.0))


def solve_strategic(inst: Instance) -> Optimum:
    """Best deployment of an AI that itself plays the trigger strategy.

    The cost is linear in ``x``, so enumerating the pure strategies suffices.
    """
    n = inst.n
    candidates = [("none", np.zeros(n))]
    for i in range(1, n + 1):
        e = np.zeros(n)
        e[i - 1] = 1.0
        candidates.append((str(i), e))
    costs = [(label, strategic_ai_cost(inst, x).total) for label, x in candidates]
    k = min(range(len(costs)), key=lambda j: (costs[j][1], candidates[j][1].sum()))
    diag = {"enumeration": costs, "choice": costs[k][0]}
    return _make_optimum(inst, candidates[k][1], Method.ENUMERATION, diag, cost_fn=strategic_ai_cost)


# --- wage and payoff analyses -----------------------------------------------

def _wage_vector(inst, x):
    w = optimal_wages(inst, x).w
    if np.any(np.isnan(w)):
        raise FullyReplaced("wage gap needs every worker to be human with positive probability")
    return w


def wage_gap_report(inst: Instance, x) -> GapReport:
    s = as_strategy(inst, x)
    w0 = _wage_vector(inst, np.zeros(inst.n))
    wx = _wage_vector(inst, s)
    g0 = float(w0.max() - w0.min())
    gx = float(wx.max() - wx.min())
    return GapReport(gap_no_ai=g0, gap_at_x=gx, ratio=gx / g0)


def payoff_report(inst: Instance, x) -> PayoffReport:
    """Expected worker payoffs ``(1 - x_i)(p_n w_i - c)`` against the all-human team."""
    s = as_strategy(inst, x)
    pn, c = inst.pn, inst.c
    w = optimal_wages(inst, s).w
    pay = np.where(s.x >= 1.0, 0.0, (1.0 - s.x) * (pn * np.nan_to_num(w) - c))
    w0 = optimal_wages(inst, np.zeros(inst.n)).w
    base = pn * w0 - c
    order = np.argsort(-pay, kind="stable") + 1
    return PayoffReport(payoffs=pay, baseline=base, deltas=pay - base, ordering=">".join(map(str, order)))


def _bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def front_payoff_threshold(tol=1e-12):
    """Return ``(beta_bar, alpha_bar)``: the real root of b**3 - b - 1 and b**2 - 1.

    For O-ring teams the front-most worker gains from optimal AI adoption
    exactly when ``alpha < alpha_bar``.
    """
    beta = _bisect(lambda b: b**3 - b - 1.0, 1.0, math.sqrt(2.0), tol)
    return beta, beta**2 - 1.0


BETA_BAR, ALPHA_BAR = front_payoff_threshold()
