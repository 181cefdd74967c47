"""Monte Carlo play of the sequential game under the trigger profile.

Trials are split into fixed-size blocks; block ``b`` draws from
``default_rng([seed, b])`` and block sums are reduced in block order, so a
report is bitwise reproducible whatever the number of threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chain import WageSchedule, _chain_strategy
from .exceptions import InconsistentWages, OutOfRange
from .model import Instance

BLOCK = 8192


@dataclass(frozen=True)
class Trace:
    replaced: int | None
    efforts: tuple
    signals: tuple
    success: bool
    principal_cost_realized: float
    worker_payoffs_realized: tuple


@dataclass(frozen=True)
class SimReport:
    trials: int
    seed: int
    success_rate: float
    success_se: float
    mean_cost: float
    cost_se: float
    mean_payoffs: tuple
    payoff_se: tuple
    forced_deviant: int | None = None
    condition_human: tuple = ()
    conditional_trials: int | None = None
    conditional_success_rate: float | None = None
    conditional_success_se: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = dict(self.__dict__)
        d["mean_payoffs"] = list(self.mean_payoffs)
        d["payoff_se"] = list(self.payoff_se)
        d["condition_human"] = list(self.condition_human)
        return d


def domino_trace(inst_or_n, replaced_set=(), first_shirker=None) -> tuple:
    """Efforts along the chain after a single forced shirk.

    The shirker and every later human shirk until the first AI position;
    humans after that AI see a contribution and work again. A replaced
    position always works, so forcing a shirk on an AI does nothing.
    """
    n = inst_or_n.n if isinstance(inst_or_n, Instance) else int(inst_or_n)
    replaced = {int(j) for j in replaced_set}
    efforts = []
    for pos in range(1, n + 1):
        if pos in replaced:
            efforts.append(1)
        elif first_shirker is not None and pos == first_shirker:
            efforts.append(0)
        elif first_shirker is not None and pos > first_shirker:
            efforts.append(efforts[-1])
        else:
            efforts.append(1)
    return tuple(efforts)


def _check_wages(inst, s, w):
    w = w.w if isinstance(w, WageSchedule) else np.asarray(w, dtype=float)
    if w.shape != (inst.n,):
        raise InconsistentWages(f"wage vector must have length {inst.n}")
    missing = (s.x < 1.0) & np.isnan(w)
    if np.any(missing):
        raise InconsistentWages(f"workers {list(np.flatnonzero(missing) + 1)} may be human but have no wage")
    return np.nan_to_num(w)


def _replacement_probs(x):
    probs = np.r_[x, max(0.0, 1.0 - x.sum())]
    return probs / probs.sum()


def _play_block(inst, x, w, deviant, m, rng):
    n, p, c = inst.n, inst.p, inst.c
    r = rng.choice(n + 1, size=m, p=_replacement_probs(x))  # r == n: nobody replaced
    u = rng.random(m)
    E = np.ones((m, n), dtype=np.int8)
    if deviant is not None:
        for pos in range(deviant - 1, n):
            human = r != pos
            if pos == deviant - 1:
                E[:, pos] = np.where(human, 0, 1)
            else:
                E[:, pos] = np.where(human, E[:, pos - 1], 1)
    k = E.sum(axis=1)
    success = u < p[k]
    human = r[:, None] != np.arange(n)[None, :]
    pay = np.where(human, success[:, None] * w[None, :] - c * E, 0.0)
    cost = (r < n) * c + (human * success[:, None] * w[None, :]).sum(axis=1)
    return r, success, cost, pay


def play_once(inst: Instance, x, w, forced_deviant=None, rng=None) -> Trace:
    """One realization: draw the replacement, cascade efforts, draw success."""
    s = _chain_strategy(inst, x)
    w = _check_wages(inst, s, w)
    if forced_deviant is not None and not 1 <= forced_deviant <= inst.n:
        raise OutOfRange(f"deviant must be in 1..{inst.n}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    r, success, cost, pay = _play_block(inst, s.x, w, forced_deviant, 1, rng)
    replaced = None if r[0] == inst.n else int(r[0]) + 1
    efforts = domino_trace(inst.n, () if replaced is None else (replaced,), forced_deviant)
    signals = (None,) + efforts[:-1]
    return Trace(replaced, efforts, signals, bool(success[0]), float(cost[0]), tuple(float(v) for v in pay[0]))


def _threads():
    try:
        t = int(os.environ.get("TEAMAI_THREADS", "0"))
    except ValueError:
        t = 0
    return t if t > 0 else min(8, os.cpu_count() or 1)


def monte_carlo(
    inst: Instance, x, w, trials=100_000, seed=42, forced_deviant=None, condition_human=(), threads=None
) -> SimReport:
    """Simulate ``trials`` plays and summarize with standard errors.

    With ``forced_deviant`` set, one worker shirks unconditionally (if human);
    ``condition_human`` restricts the conditional success rate to trials in
    which all listed positions were human. ``threads`` overrides
    ``TEAMAI_THREADS``; it never changes the result.
    """
    if trials < 1:
        raise OutOfRange("trials must be at least 1")
    s = _chain_strategy(inst, x)
    w = _check_wages(inst, s, w)
    if forced_deviant is not None and not 1 <= forced_deviant <= inst.n:
        raise OutOfRange(f"deviant must be in 1..{inst.n}")
    cond = tuple(int(j) for j in condition_human)
    n = inst.n

    def run(b):
        m = min(BLOCK, trials - b * BLOCK)
        rng = np.random.default_rng([int(seed), b])
        r, success, cost, pay = _play_block(inst, s.x, w, forced_deviant, m, rng)
        keep = np.ones(m, dtype=bool)
        for j in cond:
            keep &= r != j - 1
        return (
            success.sum(), cost.sum(), (cost**2).sum(),
            pay.sum(axis=0), (pay**2).sum(axis=0),
            keep.sum(), success[keep].sum(),
        )

    nblocks = math.ceil(trials / BLOCK)
    with ThreadPoolExecutor(max_workers=threads or _threads()) as pool:
        parts = list(pool.map(run, range(nblocks)))

    succ = sum(int(q[0]) for q in parts)
    cost_sum = 0.0
    cost_sq = 0.0
    pay_sum = np.zeros(n)
    pay_sq = np.zeros(n)
    for q in parts:  # fixed reduction order
        cost_sum += q[1]
        cost_sq += q[2]
        pay_sum = pay_sum + q[3]
        pay_sq = pay_sq + q[4]
    kept = sum(int(q[5]) for q in parts)
    kept_succ = sum(int(q[6]) for q in parts)

    def se(total, total_sq):
        mean = total / trials
        var = max(total_sq / trials - mean**2, 0.0) * trials / max(trials - 1, 1)
        return math.sqrt(var / trials)

    rate = succ / trials
    cond_rate = kept_succ / kept if cond and kept else None
    return SimReport(
        trials=trials,
        seed=int(seed),
        success_rate=rate,
        success_se=se(succ, succ),
        mean_cost=cost_sum / trials,
        cost_se=se(cost_sum, cost_sq),
        mean_payoffs=tuple(float(v) for v in pay_sum / trials),
        payoff_se=tuple(se(a, b) for a, b in zip(pay_sum, pay_sq)),
        forced_deviant=forced_deviant,
        condition_human=cond,
        conditional_trials=kept if cond else None,
        conditional_success_rate=cond_rate,
        conditional_success_se=(
            math.sqrt(cond_rate * (1 - cond_rate) / kept) if cond_rate is not None and kept > 1 else None
        ),
    )
