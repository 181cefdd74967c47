"""Incentives in the sequential (chain) team.

Under the trigger profile a shirking worker drags every later human down
with the shirker until the cascade hits the AI, so from worker ``i``'s point of view
the success probability after shirking is::

    zeta_i = p[i-1] + sum_{k>i} x_k / (1 - x_i) * (p[n-k+i] - p[i-1])

and the cheapest wage that keeps that worker working is ``c / (p[n] - zeta_i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import Boundary, CapacityExceeded, Degenerate, FullyReplaced, InconsistentWages, OutOfRange
from .model import CAPACITY_TOL, Instance, as_strategy


@dataclass(frozen=True, eq=False)
class WageSchedule:
    """Success-contingent wages; ``nan`` marks a worker replaced with certainty."""

    w: np.ndarray

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.w)

    def __getitem__(self, i):
        return self.w[i]

    def __len__(self):
        return len(self.w)

    def to_list(self):
        return [None if np.isnan(v) else float(v) for v in self.w]


@dataclass(frozen=True, eq=False)
class CostBreakdown:
    ai_cost: float
    wage_cost: float
    total: float
    per_worker: np.ndarray

    def to_dict(self):
        return {
            "ai_cost": self.ai_cost,
            "wage_cost": self.wage_cost,
            "total": self.total,
            "per_worker": [float(v) for v in self.per_worker],
        }


@dataclass(frozen=True)
class GradientDecomposition:
    direct_saving: float
    direct_incentive: float
    indirect_incentive: float
    total: float

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    on_path_slack: np.ndarray
    off_path_slack: np.ndarray
    on_path_pass: np.ndarray
    off_path_pass: np.ndarray
    tol: float
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.on_path_pass.all() and self.off_path_pass.all())

    def to_dict(self):
        def clean(a):
            return [None if np.isnan(v) else float(v) for v in a]

        return {
            "passed": self.passed,
            "tol": self.tol,
            "on_path_slack": clean(self.on_path_slack),
            "off_path_slack": clean(self.off_path_slack),
            "on_path_pass": [bool(v) for v in self.on_path_pass],
            "off_path_pass": [bool(v) for v in self.off_path_pass],
            "notes": list(self.notes),
        }


def _chain_strategy(inst, x):
    s = as_strategy(inst, x)
    if s.x.sum() > 1.0 + CAPACITY_TOL:
        raise CapacityExceeded("the chain model deploys a single AI: sum(x) must not exceed 1")
    return s


def _gain_matrix(p, n):
    """D[i, k] = p[n-k+i] - p[i-1] for successor k > i (0-based rows/cols)."""
    D = np.zeros((n, n))
    for i in range(1, n + 1):
        for k in range(i + 1, n + 1):
            D[i - 1, k - 1] = p[n - k + i] - p[i - 1]
    return D


def shirk_rates_batch(inst: Instance, X) -> np.ndarray:
    """Vectorized shirk success rates for strategy rows ``X`` of shape (m, n).

    Entries where ``x_i == 1`` are ``nan``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    D = _gain_matrix(inst.p, inst.n)
    stay = 1.0 - X
    with np.errstate(divide="ignore", invalid="ignore"):
        z = inst.p[:-1] + (X @ D.T) / stay
    return np.where(stay > 0, z, np.nan)


def cost_batch(inst: Instance, X) -> np.ndarray:
    """Expected compensation cost for each strategy row, with the corner extension."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = shirk_rates_batch(inst, X)
    pn, c = inst.pn, inst.c
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = X * c + (1.0 - X) * pn * c / (pn - z)
    terms = np.where(X >= 1.0, c, terms)
    return terms.sum(axis=1)


def shirk_success_rate(inst: Instance, x, i: int) -> float:
    """Success probability, from worker ``i``'s view, after shirking on path."""
    s = _chain_strategy(inst, x)
    n = inst.n
    if not 1 <= i <= n:
        raise OutOfRange(f"position must be in 1..{n}, got {i}")
    xi = s.x[i - 1]
    if xi >= 1.0:
        raise FullyReplaced(f"worker {i} is replaced with certainty; zeta is undefined")
    if i == n:
        return float(inst.p[n - 1])
    p = inst.p
    gain = sum(s.x[k - 1] * (p[n - k + i] - p[i - 1]) for k in range(i + 1, n + 1))
    return float(p[i - 1] + gain / (1.0 - xi))


def offpath_shirk_rate(inst: Instance, x, i: int) -> float:
    """Success probability when worker ``i`` saw ``i-1`` shirk and shirks too.

    Worker ``i`` believes ``i-1`` is the first deviator and that neither of
    them was replaced; every later human follows the trigger strategy.
    """
    s = _chain_strategy(inst, x)
    n, p, xv = inst.n, inst.p, s.x
    if not 2 <= i <= n:
        raise OutOfRange(f"off-path rate needs a predecessor: position must be in 2..{n}, got {i}")
    both_human = 1.0 - xv[i - 1] - xv[i - 2]
    if both_human <= 0.0:
        raise Degenerate(f"x_{i} + x_{i - 1} = 1: worker {i} never observes a human predecessor shirk")
    no_later_ai = 1.0 - xv[i - 2:].sum()
    later = sum(xv[k - 1] * p[n - 1 - k + i] for k in range(i + 1, n + 1))
    return float((p[i - 2] * no_later_ai + later) / both_human)


def optimal_wages(inst: Instance, x) -> WageSchedule:
    s = _chain_strategy(inst, x)
    z = shirk_rates_batch(inst, s.x[None, :])[0]
    return WageSchedule(w=inst.c / (inst.pn - z))


def _breakdown(inst, x, w):
    pn, c = inst.pn, inst.c
    ai = x * c
    wage = np.where(np.isnan(w), 0.0, (1.0 - x) * pn * np.nan_to_num(w))
    per = ai + wage
    return CostBreakdown(ai_cost=float(ai.sum()), wage_cost=float(wage.sum()), total=float(per.sum()), per_worker=per)


def expected_cost(inst: Instance, x) -> CostBreakdown:
    """Principal's expected cost under the cheapest effort-inducing wages.

    A worker replaced with certainty contributes only the AI cost ``c``; this
    is the limit of that worker's wage term as ``x_i -> 1``.
    """
    s = _chain_strategy(inst, x)
    return _breakdown(inst, s.x, optimal_wages(inst, s).w)


def _zeta_partials(inst, x):
    """J[k, i] = d zeta_k / d x_i (0-based), valid for interior x."""
    n, p = inst.n, inst.p
    z = shirk_rates_batch(inst, x[None, :])[0]
    J = np.zeros((n, n))
    for k in range(1, n + 1):
        stay = 1.0 - x[k - 1]
        J[k - 1, k - 1] = (z[k - 1] - p[k - 1]) / stay
        for i in range(k + 1, n + 1):
            J[k - 1, i - 1] = (p[n - i + k] - p[k - 1]) / stay
    return z, J


def cost_gradient(inst: Instance, x, i: int) -> GradientDecomposition:
    """Split dW/dx_i into direct saving, direct incentive and indirect incentive cost."""
    s = _chain_strategy(inst, x)
    n = inst.n
    if not 1 <= i <= n:
        raise OutOfRange(f"position must be in 1..{n}, got {i}")
    if np.any(s.x >= 1.0):
        raise Boundary("gradient is only defined when no worker is replaced with certainty")
    xv, pn, c = s.x, inst.pn, inst.c
    z, J = _zeta_partials(inst, xv)
    w = c / (pn - z)
    dw = (c / (pn - z) ** 2)[:, None] * J  # dw[k, i] = d w_k / d x_i
    saving = pn * w[i - 1] - c
    direct = (1.0 - xv[i - 1]) * pn * dw[i - 1, i - 1]
    indirect = sum((1.0 - xv[k]) * pn * dw[k, i - 1] for k in range(i - 1))
    return GradientDecomposition(
        direct_saving=float(saving),
        direct_incentive=float(direct),
        indirect_incentive=float(indirect),
        total=float(-saving + direct + indirect),
    )


def pure_strategy_costs(inst: Instance):
    """Costs of replacing nobody and of replacing each single worker for sure.

    Evaluated from the closed forms (no shirk-rate machinery), so it doubles
    as an oracle for :func:`expected_cost` at the simplex vertices.
    """
    n, p, pn, c = inst.n, inst.p, inst.pn, inst.c
    # fsum is order independent, so W_1 and W_n (same terms) agree bit for bit
    out = [("none", c * math.fsum(pn / (pn - p[i - 1]) for i in range(1, n + 1)))]
    for i in range(1, n + 1):
        terms = [1.0]
        terms += [pn / (pn - p[n + k - i]) for k in range(1, i)]
        terms += [pn / (pn - p[k - 1]) for k in range(i + 1, n + 1)]
        out.append((str(i), c * math.fsum(terms)))
    return [(label, float(v)) for label, v in out]


def _as_wage_array(inst, w):
    w = w.w if isinstance(w, WageSchedule) else np.asarray(w, dtype=float)
    if w.shape != (inst.n,):
        raise InconsistentWages(f"wage vector must have length {inst.n}")
    return w


def verify_trigger_equilibrium(inst: Instance, x, w, tol=1e-9) -> EquilibriumReport:
    """Check the on-path and off-path best-response conditions of the trigger profile.

    On path (predecessor worked) effort must pay at least as much as
    shirking; optimal wages make this bind. Off path (predecessor shirked)
    shirking must pay at least as much as effort. Workers replaced with
    certainty are skipped; so is the off-path test for worker ``i`` when
    ``x_i + x_{i-1} = 1`` since that history cannot arise.
    """
    s = _chain_strategy(inst, x)
    w = _as_wage_array(inst, w)
    n, p, pn, c = inst.n, inst.p, inst.pn, inst.c
    on = np.full(n, np.nan)
    off = np.full(n, np.nan)
    on_ok = np.ones(n, dtype=bool)
    off_ok = np.ones(n, dtype=bool)
    notes = []
    for i in range(1, n + 1):
        if s.x[i - 1] >= 1.0:
            notes.append(f"worker {i} replaced with certainty")
            continue
        wi = w[i - 1]
        if np.isnan(wi):
            raise InconsistentWages(f"worker {i} may be human but has no wage")
        z = shirk_success_rate(inst, s, i)
        on[i - 1] = pn * wi - c - z * wi
        on_ok[i - 1] = abs(on[i - 1]) <= tol
        if i >= 2:
            try:
                zh = offpath_shirk_rate(inst, s, i)
            except Degenerate:
                notes.append(f"worker {i}: off-path history unreachable")
                continue
            off[i - 1] = zh * wi - (p[n - 1] * wi - c)
            off_ok[i - 1] = off[i - 1] >= -tol
    return EquilibriumReport(on, off, on_ok, off_ok, tol, notes)


def strategic_ai_cost(inst: Instance, x) -> CostBreakdown:
    """Cost when the AI itself plays the trigger strategy.

    The AI no longer stops the cascade, so every worker's shirk rate is
    ``p[i-1]`` whatever the replacement strategy.
    """
    s = _chain_strategy(inst, x)
    w = inst.c / (inst.pn - inst.p[:-1])
    w = np.where(s.x >= 1.0, np.nan, w)
    return _breakdown(inst, s.x, w)
