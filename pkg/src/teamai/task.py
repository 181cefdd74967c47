"""Task-level substitution: AI performs a fraction ``x_i`` of worker ``i``'s tasks.

A worker-AI pair counts as effective effort with probability ``x_i`` when
the worker shirks, and the successor detects the shirk with probability
``1 - x_i``. Wages are paid per task, so total pay on success is
``(1 - x_i) * w_i``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .chain import CostBreakdown, WageSchedule
from .exceptions import BadCapacity, OutOfRange
from .model import Instance, validate_strategy
from .optimize import TIE, Method, Optimum


@dataclass(frozen=True, eq=False)
class TaskStrategy:
    x: np.ndarray
    capacity: float = 1.0


def validate_task_strategy(inst: Instance, x, capacity=1.0) -> TaskStrategy:
    capacity = float(capacity)
    if not 0.0 < capacity <= inst.n:
        raise BadCapacity(f"capacity must lie in (0, {inst.n}], got {capacity}")
    s = validate_strategy(x, capacity, n=inst.n)
    return TaskStrategy(x=s.x, capacity=capacity)


def _as_task(inst, x, capacity=None):
    if isinstance(x, TaskStrategy):
        return x
    return validate_task_strategy(inst, x, inst.n if capacity is None else capacity)


def task_shirk_rate(inst: Instance, x, i: int) -> float:
    """Success probability if worker ``i`` shirks and everyone else plays trigger."""
    s = _as_task(inst, x)
    n, p, xv = inst.n, inst.p, s.x
    if not 1 <= i <= n:
        raise OutOfRange(f"position must be in 1..{n}, got {i}")
    z = xv[i - 1] * p[n]
    undetected = 1.0 - xv[i - 1]
    for k in range(1, n - i + 1):
        z += p[n - k] * xv[i + k - 1] * undetected
        undetected *= 1.0 - xv[i + k - 1]
    return float(z + p[i - 1] * undetected)


def _psi(inst, xv, i):
    """Shirk rate with worker ``i``'s own share factored out: p_n - zeta_i = (1 - x_i)(p_n - psi_i)."""
    n, p = inst.n, inst.p
    z = 0.0
    undetected = 1.0
    for k in range(1, n - i + 1):
        z += p[n - k] * xv[i + k - 1] * undetected
        undetected *= 1.0 - xv[i + k - 1]
    return z + p[i - 1] * undetected


def task_wages(inst: Instance, x) -> WageSchedule:
    """Per-task wages ``c / (p_n - zeta_i)``; ``nan`` where all tasks go to AI."""
    s = _as_task(inst, x)
    w = np.full(inst.n, np.nan)
    for i in range(1, inst.n + 1):
        if s.x[i - 1] < 1.0:
            w[i - 1] = inst.c / (inst.pn - task_shirk_rate(inst, s, i))
    return WageSchedule(w=w)


def task_total_compensation(inst: Instance, x) -> np.ndarray:
    """``(1 - x_i) * w_i`` per worker, computed from the factored shirk rate."""
    s = _as_task(inst, x)
    return np.array([
        np.nan if s.x[i - 1] >= 1.0 else inst.c / (inst.pn - _psi(inst, s.x, i))
        for i in range(1, inst.n + 1)
    ])


def task_expected_cost(inst: Instance, x) -> CostBreakdown:
    s = _as_task(inst, x)
    pn, c = inst.pn, inst.c
    w = task_wages(inst, s).w
    ai = s.x * c
    wage = np.where(np.isnan(w), 0.0, (1.0 - s.x) * pn * np.nan_to_num(w))
    per = ai + wage
    return CostBreakdown(float(ai.sum()), float(wage.sum()), float(per.sum()), per)


def interior_gradient_check(inst: Instance, x, h=1e-6):
    """Central finite-difference partials of the task cost; all should be positive.

    At ``x_i = 0`` a forward difference is used so the probe stays feasible.
    """
    s = _as_task(inst, x)
    if np.any(s.x >= 1.0):
        raise OutOfRange("interior check needs every x_i < 1")
    grads = np.zeros(inst.n)
    f = lambda y: task_expected_cost(inst, TaskStrategy(y, s.capacity)).total
    for i in range(inst.n):
        up = s.x.copy()
        up[i] = min(s.x[i] + h, 1.0 - 1e-12)
        dn = s.x.copy()
        dn[i] = max(s.x[i] - h, 0.0)
        grads[i] = (f(up) - f(dn)) / (up[i] - dn[i])
    return {"partials": grads, "all_positive": bool(np.all(grads > 0))}


def _consecutive_candidates(n, k):
    """0/1 vectors with exactly ``k`` ones whose zero positions form one block."""
    if k >= n:
        return [np.ones(n)]
    out = []
    humans = n - k
    for start in range(0, n - humans + 1):
        x = np.ones(n)
        x[start:start + humans] = 0.0
        out.append(x)
    return out


def solve_task_based(inst: Instance, capacity=1.0) -> Optimum:
    """Cheapest whole-worker replacement of ``floor(capacity)`` workers.

    Candidates keep the remaining humans contiguous; the all-human team is
    always a candidate. Ties go to fewer replacements, then to the
    lexicographically smallest set of replaced positions.
    """
    capacity = float(capacity)
    if not 0.0 < capacity <= inst.n:
        raise BadCapacity(f"capacity must lie in (0, {inst.n}], got {capacity}")
    k = int(math.floor(capacity + 1e-12))
    cands = [np.zeros(inst.n)]
    if k >= 1:
        cands += _consecutive_candidates(inst.n, k)
    scored = []
    for x in cands:
        cost = task_expected_cost(inst, TaskStrategy(x, capacity)).total
        replaced = tuple(int(j) + 1 for j in np.flatnonzero(x))
        scored.append((cost, len(replaced), replaced, x))
    best_cost = min(s[0] for s in scored)
    ties = [s for s in scored if s[0] <= best_cost + TIE * max(1.0, abs(best_cost))]
    ties.sort(key=lambda s: (s[1], s[2]))
    chosen = ties[0]
    s = validate_strategy(chosen[3], capacity)
    cost = task_expected_cost(inst, TaskStrategy(s.x, capacity))
    diag = {
        "floor_capacity": k,
        "candidates": [{"replaced": list(c[2]), "cost": c[0]} for c in scored],
        "tie_set": [list(c[2]) for c in ties],
        "unused_capacity": capacity - float(s.x.sum()),
    }
    return Optimum(s, task_wages(inst, s), cost, float(s.x.sum()), Method.ENUMERATION, diag)


def enumerate_task_corners(inst: Instance, capacity=1.0):
    """Every 0/1 strategy with at most ``floor(capacity)`` replacements and its cost."""
    k = int(math.floor(capacity + 1e-12))
    out = []
    for bits in itertools.product((0.0, 1.0), repeat=inst.n):
        x = np.array(bits)
        if x.sum() <= k:
            out.append((x, task_expected_cost(inst, TaskStrategy(x, capacity)).total))
    return out
