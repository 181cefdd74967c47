"""Named numerical checks of the model's analytic claims.

Every suite is deterministic for a given seed, counts the cases it checked
and keeps the first counterexample. ``run_suites("all")`` runs them in a
fixed order.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .chain import (
    expected_cost,
    offpath_shirk_rate,
    optimal_wages,
    pure_strategy_costs,
    shirk_success_rate,
    verify_trigger_equilibrium,
)
from .exceptions import UnknownSuite
from .model import oring_instance, random_instance, validate_instance
from .optimize import (
    ALPHA_BAR,
    _bisect,
    family_cost,
    oring_closed_form,
    payoff_report,
    solve_chain_n3,
    solve_oring,
    solve_strategic,
    utilization_condition,
    wage_gap_report,
)
from .simulate import monte_carlo
from .star import solve_star, star_condition, star_expected_cost
from .task import (
    TaskStrategy,
    enumerate_task_corners,
    interior_gradient_check,
    solve_task_based,
    task_total_compensation,
    task_wages,
)

DEFAULT_SEED = 20240601
ALPHA_GRID = tuple(round(0.1 * k, 10) for k in range(1, 10))
SWEEP_GRID = tuple(round(0.01 * k, 10) for k in range(1, 100))
UNDER = (0.01, 0.2, 0.45, 0.75)
FULL = (0.05, 0.15, 0.30, 0.60)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failed: int = 0
    first_counterexample: dict | None = None
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.failed == 0 and self.checked > 0

    def check(self, ok, **case):
        self.checked += 1
        if not ok:
            self.failed += 1
            if self.first_counterexample is None:
                self.first_counterexample = {k: _plain(v) for k, v in case.items()}
        return bool(ok)

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.name}: {self.checked - self.failed}/{self.checked} checks ({self.seconds:.2f}s)"
        if self.first_counterexample is not None:
            line += f"; first counterexample {self.first_counterexample}"
        return line

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failed": self.failed,
            "first_counterexample": self.first_counterexample,
            "seconds": self.seconds,
            "notes": list(self.notes),
        }


def _plain(v):
    if isinstance(v, np.ndarray):
        return [float(t) for t in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_plain(t) for t in v]
    return v


def _rng(seed, salt):
    return np.random.default_rng([int(seed), salt])


@lru_cache(maxsize=4)
def n3_suite(seed=DEFAULT_SEED, size=200):
    """``size`` random three-worker instances with their numerical optima."""
    rng = _rng(seed, 3)
    out = []
    for _ in range(size):
        inst = random_instance(rng, 3)
        out.append((inst, solve_chain_n3(inst)))
    return tuple(out)


def _random_n(rng, choices=(3, 4, 5)):
    return int(rng.choice(choices))


# --- suites -------------------------------------------------------------------

def suite_closedform(seed, res):
    for a in ALPHA_GRID:
        inst = oring_instance(a)
        t0 = time.perf_counter()
        num = solve_chain_n3(inst)
        dt = time.perf_counter() - t0
        ref = solve_oring(a)
        dx = float(np.max(np.abs(num.x - ref.x)))
        dc = abs(num.cost.total - ref.cost.total)
        res.check(dx <= 1e-4 and dc <= 1e-6, alpha=a, x_numeric=num.x, x_closed=ref.x, cost_gap=dc)
        res.check(dt < 1.0, alpha=a, seconds=dt)
        x_cf, _ = oring_closed_form(a, 1.0)
        w = optimal_wages(inst, x_cf).w
        want = np.array([1 / (1 - a * a), 1 / ((1 - a) * math.sqrt(1 + a)), 1 / (1 - a)])
        res.check(np.max(np.abs(w - want)) <= 1e-12, alpha=a, wages=w, expected=want)


def suite_gapratio(seed, res):
    for a in ALPHA_GRID:
        inst = oring_instance(a)
        g = wage_gap_report(inst, solve_oring(a).x)
        want = 1 - a / (1 + a) ** 2
        res.check(abs(g.ratio - want) <= 1e-9, alpha=a, ratio=g.ratio, expected=want)
    g = wage_gap_report(oring_instance(0.5), solve_oring(0.5).x)
    got = (g.gap_no_ai, g.gap_at_x, g.ratio)
    want = (0.857143, 0.666667, 0.777778)
    res.check(all(abs(u - v) <= 1e-6 for u, v in zip(got, want)), alpha=0.5, values=got, expected=want)


def suite_prop2(seed, res):
    rng = _rng(seed, 2)
    grid = np.linspace(0.0, 1.0, 101)
    for _ in range(100):
        inst = random_instance(rng, _random_n(rng))
        w = np.array([family_cost(inst, r) for r in grid])
        d2 = w[:-2] - 2 * w[1:-1] + w[2:]
        res.check(np.all(d2 > 0), p=inst.p, min_second_difference=float(d2.min()))
        res.check(abs(w[0] - w[-1]) <= 1e-12, p=inst.p, endpoints=(w[0], w[-1]))
        res.check(w[1:-1].min() < min(w[0], w[-1]), p=inst.p, interior_min=float(w[1:-1].min()), endpoint=w[0])


def suite_lemmaA2(seed, res):
    rng = _rng(seed, 4)
    for _ in range(100):
        inst = random_instance(rng, _random_n(rng, (3, 4, 5, 6)))
        costs = dict(pure_strategy_costs(inst))
        w1, wn = costs["1"], costs[str(inst.n)]
        res.check(abs(w1 - wn) <= 1e-12, p=inst.p, W1=w1, Wn=wn)
        res.check(all(max(w1, wn) <= v for v in costs.values()), p=inst.p, costs=list(costs.items()))
    for _ in range(20):
        inst = random_instance(rng, _random_n(rng, (3, 4, 5, 6)), p0=0.0)
        costs = dict(pure_strategy_costs(inst))
        res.check(costs["1"] == costs["none"], p=inst.p, W1=costs["1"], W_none=costs["none"])


def suite_prop3(seed, res):
    for inst, opt in n3_suite(seed):
        x = opt.x
        res.check(
            x[1] <= 1e-6 and x[2] >= x[0] - 1e-6 and x[2] >= 1e-4 and np.all(x < 1 - 1e-6),
            p=inst.p, x=x,
        )


def suite_prop4(seed, res):
    excluded = underused = 0
    for inst, opt in n3_suite(seed):
        under, margin = utilization_condition(inst)
        if abs(margin) < 1e-9:
            excluded += 1
            continue
        underused += under
        res.check((opt.utilization < 1 - 1e-4) == (margin > 1e-9), p=inst.p, x=opt.x, margin=margin)
    res.notes.append(f"{underused} underutilizing instances; {excluded} with |margin| < 1e-9 excluded")
    inst = validate_instance(3, 1.0, UNDER)
    opt = solve_chain_n3(inst)
    res.check(
        utilization_condition(inst)[0] and np.max(np.abs(opt.x - [0, 0, 0.5785])) <= 1e-3,
        p=inst.p, x=opt.x,
    )
    inst = validate_instance(3, 1.0, FULL)
    opt = solve_chain_n3(inst)
    res.check(not utilization_condition(inst)[0] and abs(opt.utilization - 1) <= 1e-6, p=inst.p, x=opt.x)


def suite_prop5(seed, res):
    for inst, opt in n3_suite(seed):
        w = opt.wages.w
        w0 = optimal_wages(inst, np.zeros(3)).w
        res.check(
            w[2] > w[1] > w[0] and w[0] > w0[0] and w[1] > w0[1] and abs(w[2] - w0[2]) <= 1e-12,
            p=inst.p, x=opt.x, wages=w, wages_no_ai=w0,
        )


def suite_equilibrium(seed, res):
    cases = list(n3_suite(seed))
    cases += [(oring_instance(a), solve_oring(a)) for a in ALPHA_GRID]
    for inst, opt in cases:
        rep = verify_trigger_equilibrium(inst, opt.x, opt.wages, tol=1e-9)
        res.check(rep.passed, p=inst.p, x=opt.x, on_path=rep.on_path_slack, off_path=rep.off_path_slack)
    rng = _rng(seed, 7)
    for _ in range(1000):
        inst = random_instance(rng, _random_n(rng, (3, 4, 5, 6)))
        n = inst.n
        x = rng.dirichlet(np.ones(n + 1))[:n]
        bound = inst.pn - inst.p[n - 1]
        gaps = [shirk_success_rate(inst, x, i) - offpath_shirk_rate(inst, x, i) for i in range(2, n + 1)]
        res.check(max(gaps) <= bound + 1e-12, p=inst.p, x=x, max_gap=max(gaps), bound=bound)


def _z_ok(res, label, got, want, se):
    ok = abs(got - want) <= 3 * se if se > 0 else got == want
    res.check(ok, check=label, simulated=got, analytic=want, se=se)


def suite_montecarlo(seed, res):
    trials, mc_seed = 100_000, 42
    inst = oring_instance(0.5)
    opt = solve_oring(0.5)
    r = monte_carlo(inst, opt.x, opt.wages, trials, mc_seed)
    _z_ok(res, "oring success", r.success_rate, inst.pn, r.success_se)
    _z_ok(res, "oring cost", r.mean_cost, opt.cost.total, r.cost_se)

    inst = validate_instance(3, 1.0, FULL)
    x0 = np.zeros(3)
    r = monte_carlo(inst, x0, optimal_wages(inst, x0), trials, mc_seed)
    _z_ok(res, "all-human success", r.success_rate, inst.pn, r.success_se)
    _z_ok(res, "all-human cost", r.mean_cost, expected_cost(inst, x0).total, r.cost_se)

    x = np.array([0.0, 0.0, 0.5])
    w = optimal_wages(inst, x)
    r = monte_carlo(inst, x, w, trials, mc_seed, forced_deviant=2, condition_human=(2,))
    _z_ok(res, "on-path deviation", r.conditional_success_rate, shirk_success_rate(inst, x, 2), r.conditional_success_se)
    r = monte_carlo(inst, x, w, trials, mc_seed, forced_deviant=2, condition_human=(2, 3))
    _z_ok(res, "off-path deviation", r.conditional_success_rate, offpath_shirk_rate(inst, x, 3), r.conditional_success_se)

    a = monte_carlo(inst, x, w, trials, mc_seed, threads=1).to_dict()
    b = monte_carlo(inst, x, w, trials, mc_seed, threads=4).to_dict()
    c = monte_carlo(inst, x, w, trials, mc_seed).to_dict()
    res.check(a == b == c, check="bitwise replay", first=a, second=b)


def suite_task(seed, res):
    rng = _rng(seed, 9)
    for _ in range(50):
        inst = random_instance(rng, _random_n(rng))
        n = inst.n
        x = rng.uniform(0.0, 0.9, size=n)
        i = int(rng.integers(n))
        ref = task_total_compensation(inst, TaskStrategy(x, n))[i]
        for v in np.linspace(0.0, 0.95, 7):
            y = x.copy()
            y[i] = v
            total = (1 - v) * task_wages(inst, TaskStrategy(y, n)).w[i]
            res.check(abs(total - ref) <= 1e-10, p=inst.p, x=y, worker=i + 1, total=total, reference=ref)
    for _ in range(100):
        inst = random_instance(rng, _random_n(rng))
        x = rng.uniform(0.02, 0.95, size=inst.n)
        chk = interior_gradient_check(inst, TaskStrategy(x, inst.n))
        res.check(chk["all_positive"], p=inst.p, x=x, partials=chk["partials"])
    for _ in range(60):
        inst = random_instance(rng, _random_n(rng, (3, 4, 5, 6)))
        cap = float(rng.choice([0.5, 1.0, 1.5, 2.0, 2.5, 3.0]))
        opt = solve_task_based(inst, cap)
        best = min(v for _, v in enumerate_task_corners(inst, cap))
        binary = bool(np.all((opt.x == 0) | (opt.x == 1)))
        res.check(binary and opt.cost.total <= best + 1e-12 * best, p=inst.p, capacity=cap, x=opt.x, oracle=best)
        res.check(not np.any(solve_task_based(inst, 0.8).x), p=inst.p, capacity=0.8)
        w1 = dict(pure_strategy_costs(inst))["1"]
        got = solve_task_based(inst, 1.0).cost.total
        res.check(abs(got - w1) <= 1e-12 * w1, p=inst.p, capacity=1.0, cost=got, W1=w1)
    o = oring_instance(0.5)
    res.check(not np.any(solve_task_based(o, 0.8).x), alpha=0.5, capacity=0.8)
    got = solve_task_based(o, 2.0).cost.total
    res.check(abs(got - 4.0) <= 1e-12, alpha=0.5, capacity=2.0, cost=got)


def _random_feasible(rng, n, m):
    """Mix of interior points and points on the face ``sum(x) = 1``."""
    inner = rng.dirichlet(np.ones(n + 1), size=m // 2)[:, :n]
    face = rng.dirichlet(np.ones(n), size=m - m // 2)
    X = np.vstack([inner, face])
    return np.minimum(X, 1 - 1e-9)


def suite_star(seed, res):
    rng = _rng(seed, 10)
    for a in SWEEP_GRID[::7]:
        for n in (3, 4, 5, 6):
            holds, margin = star_condition(oring_instance(a, n))
            res.check(holds and margin == 0.0, alpha=a, n=n, margin=margin)
    insts = [oring_instance(a, n) for a in (0.3, 0.5, 0.7, 0.9) for n in (3, 4, 5)]
    insts.append(validate_instance(3, 1.0, FULL))
    while len(insts) < 25:
        cand = random_instance(rng, _random_n(rng))
        if star_condition(cand)[0]:
            insts.append(cand)
    for inst in insts:
        sol = solve_star(inst, seed=int(rng.integers(2**31)))
        res.check(sol.canonical and sol.diagnostics["split_cost_spread"] <= 1e-12,
                  p=inst.p, spread=sol.diagnostics["split_cost_spread"])
        X = _random_feasible(rng, inst.n, 500)
        costs = np.array([star_expected_cost(inst, y).total for y in X])
        worst = int(np.argmin(costs))
        res.check(sol.cost.total <= costs[worst] + 1e-12, p=inst.p, canonical=sol.cost.total,
                  beaten_by=X[worst], cost=costs[worst])
    got = solve_star(oring_instance(0.5)).cost.total
    res.check(abs(got - 4.333333) <= 1e-6, alpha=0.5, cost=got)


def suite_strategic(seed, res):
    rng = _rng(seed, 11)
    for _ in range(100):
        inst = random_instance(rng, _random_n(rng, (3, 4, 5, 6)))
        x = solve_strategic(inst).x
        want = np.r_[np.zeros(inst.n - 1), 1.0]
        res.check(np.array_equal(x, want), p=inst.p, x=x)
    got = solve_strategic(oring_instance(0.5)).cost.total
    base = solve_oring(0.5).cost.total
    res.check(abs(got - 3.476190) <= 1e-6 and got < base, cost=got, non_strategic=base)


def _front_delta(a):
    return float(payoff_report(oring_instance(a), solve_oring(a).x).deltas[0])


def suite_payoff(seed, res):
    for a in SWEEP_GRID:
        rep = payoff_report(oring_instance(a), solve_oring(a).x)
        pay, base = rep.payoffs, rep.baseline
        res.check(pay[1] > pay[2] > pay[0], alpha=a, payoffs=pay)
        res.check(pay[2] < base[2], alpha=a, end_payoff=pay[2], no_ai=base[2])
        res.check(pay[1] - pay[0] < base[2] - base[0], alpha=a, payoffs=pay, baseline=base)
        res.check((rep.deltas[0] > 0) == (a < ALPHA_BAR), alpha=a, front_delta=rep.deltas[0])
    root = _bisect(_front_delta, 0.5, 0.95, 1e-10)
    res.check(abs(root - 0.754878) <= 1e-3, root=root)
    res.notes.append(f"front-most delta changes sign at alpha={root:.9f}")


SUITES = {
    "closedform": suite_closedform,
    "gapratio": suite_gapratio,
    "prop2": suite_prop2,
    "lemmaA2": suite_lemmaA2,
    "prop3": suite_prop3,
    "prop4": suite_prop4,
    "prop5": suite_prop5,
    "equilibrium": suite_equilibrium,
    "montecarlo": suite_montecarlo,
    "task": suite_task,
    "star": suite_star,
    "strategic": suite_strategic,
    "payoff": suite_payoff,
}


def run_suite(name, seed=DEFAULT_SEED) -> SuiteResult:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or 'all'")
    res = SuiteResult(name)
    t0 = time.perf_counter()
    SUITES[name](seed, res)
    res.seconds = time.perf_counter() - t0
    return res


def run_suites(name="all", seed=DEFAULT_SEED):
    names = list(SUITES) if name == "all" else [name]
    return [run_suite(s, seed) for s in names]
