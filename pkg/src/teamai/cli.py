"""``teamai`` command-line tool.

Exit codes: 0 success, 1 a verification check failed, 2 bad configuration
or arguments (including unreadable or unwritable files).
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .chain import cost_gradient, expected_cost, optimal_wages, shirk_success_rate, verify_trigger_equilibrium
from .config import load_config
from .exceptions import BadRange, ConfigError, TeamAIError
from .model import oring_instance
from .optimize import (
    _jsonable,
    payoff_report,
    solve_chain_general,
    solve_chain_n3,
    solve_oring,
    solve_strategic,
    utilization_condition,
    wage_gap_report,
)
from .simulate import monte_carlo
from .star import solve_star, star_shirk_rate
from .task import TaskStrategy, solve_task_based, task_wages
from .verification import DEFAULT_SEED, SUITES, run_suites

SCHEMA_VERSION = "1.0"
SWEEP_HEADER = "alpha,x1,x3,w1,w2,w3,gap0,gapx,gap_ratio,payoff1,payoff2,payoff3,delta1"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temp file in the same directory."""
    path = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".teamai-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc):
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


# --- solve ----------------------------------------------------------------------

def _solve(cfg):
    inst = cfg.instance()
    step, tol = cfg.solver.grid_step, cfg.solver.tol
    if cfg.model == "chain":
        if inst.n == 3 and cfg.oring_alpha is not None:
            return inst, solve_oring(cfg.oring_alpha, inst.c, 3), "solve_oring"
        if inst.n == 3:
            return inst, solve_chain_n3(inst, step or 1 / 200, tol), "solve_chain_n3"
        return inst, solve_chain_general(inst, step or 0.05, tol), "solve_chain_general"
    if cfg.model == "task":
        return inst, solve_task_based(inst, cfg.capacity), "solve_task_based"
    if cfg.model == "star":
        return inst, solve_star(inst, step or 0.005), "solve_star"
    return inst, solve_strategic(inst), "solve_strategic"


def _model_wages(cfg, inst, x):
    if cfg.model == "task":
        return task_wages(inst, TaskStrategy(np.asarray(x, float), cfg.capacity)).w
    if cfg.model == "star":
        return np.array([
            np.nan if x[i - 1] >= 1 else inst.c / (inst.pn - star_shirk_rate(inst, x, i))
            for i in range(1, inst.n + 1)
        ])
    if cfg.model == "strategic":
        return np.where(np.asarray(x) >= 1, np.nan, inst.c / (inst.pn - inst.p[:-1]))
    return optimal_wages(inst, x).w


def _skipped(exc):
    return {"available": False, "reason": str(exc)}


def build_solve_report(cfg):
    inst, opt, route = _solve(cfg)
    x = np.asarray(opt.x.x if hasattr(opt.x, "x") else opt.x, dtype=float)
    w = _model_wages(cfg, inst, x)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "solve",
        "config": cfg.to_dict(),
        "solver": route,
        "instance": {"n": inst.n, "c": inst.c, "p": inst.p},
        "x_star": x,
        "wages": [None if math.isnan(v) else float(v) for v in w],
        "cost": opt.cost.to_dict(),
        "utilization": float(x.sum()),
        "diagnostics": getattr(opt, "diagnostics", {}),
    }
    if cfg.model == "star":
        doc["canonical"] = opt.canonical
        doc["star_condition_margin"] = opt.condition_margin

    if cfg.model == "chain":
        try:
            doc["gradient"] = {str(i): cost_gradient(inst, x, i).to_dict() for i in range(1, inst.n + 1)}
        except TeamAIError as exc:
            doc["gradient"] = _skipped(exc)
        try:
            eq = verify_trigger_equilibrium(inst, x, w)
            doc["equilibrium"] = eq.to_dict()
        except TeamAIError as exc:
            doc["equilibrium"] = _skipped(exc)
        try:
            doc["gap"] = wage_gap_report(inst, x).to_dict()
        except TeamAIError as exc:
            doc["gap"] = _skipped(exc)
        doc["payoffs"] = payoff_report(inst, x).to_dict()
    else:
        reason = f"defined for the chain model; this run uses the {cfg.model} model"
        doc["gradient"] = {"available": False, "reason": reason}
        doc["equilibrium"] = {"available": False, "reason": reason}
        w0 = _model_wages(cfg, inst, np.zeros(inst.n))
        finite = w[~np.isnan(w)]
        doc["gap"] = {
            "gap_no_ai": float(w0.max() - w0.min()),
            "gap_at_x": float(finite.max() - finite.min()) if finite.size else None,
        }
        pay = np.where(x >= 1, 0.0, (1 - x) * (inst.pn * np.nan_to_num(w) - inst.c))
        base = inst.pn * w0 - inst.c
        doc["payoffs"] = {"payoffs": pay, "baseline": base, "deltas": pay - base}
    if inst.n == 3:
        under, margin = utilization_condition(inst)
        doc["utilization_condition"] = {"underutilize": under, "margin": margin}
    else:
        doc["utilization_condition"] = {"available": False, "reason": "stated for three workers"}
    doc["summary"] = "no replacement" if not np.any(x) else "replacement"
    return doc


def _fmt(v, width=12):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-".rjust(width)
    return f"{v:.6f}".rjust(width)


def render_table(doc):
    out = io.StringIO()
    out.write(f"model {doc['config']['model']} via {doc['solver']}, n={doc['instance']['n']}, c={doc['instance']['c']:g}\n")
    out.write("worker".ljust(8) + "".join(h.rjust(12) for h in ("x", "wage", "cost term", "payoff", "no-AI pay")) + "\n")
    pays = doc["payoffs"]
    for i, xi in enumerate(doc["x_star"]):
        row = [xi, doc["wages"][i], doc["cost"]["per_worker"][i], pays["payoffs"][i], pays["baseline"][i]]
        out.write(str(i + 1).ljust(8) + "".join(_fmt(float(v) if v is not None else None) for v in row) + "\n")
    out.write(f"total cost {doc['cost']['total']:.6f} (AI {doc['cost']['ai_cost']:.6f}, wages {doc['cost']['wage_cost']:.6f})\n")
    out.write(f"utilization {doc['utilization']:.6f} ({doc['summary']})\n")
    gap = doc["gap"]
    if "gap_no_ai" in gap:
        line = f"wage gap {gap['gap_no_ai']:.6f} -> " + ("-" if gap["gap_at_x"] is None else f"{gap['gap_at_x']:.6f}")
        if "ratio" in gap:
            line += f" (ratio {gap['ratio']:.6f})"
        out.write(line + "\n")
    eq = doc["equilibrium"]
    if "passed" in eq:
        out.write(f"trigger equilibrium {'holds' if eq['passed'] else 'FAILS'}\n")
    uc = doc["utilization_condition"]
    if "margin" in uc:
        out.write(f"underutilization condition margin {uc['margin']:.6g} ({'under' if uc['underutilize'] else 'full'})\n")
    return out.getvalue()


def cmd_solve(args):
    cfg = load_config(args.config)
    if args.model:
        cfg = cfg.with_model(args.model)
    doc = build_solve_report(cfg)
    sys.stdout.write(render_table(doc))
    out = args.out or cfg.output.get("report")
    if out:
        write_atomic(out, _dump(doc))
    return 0


# --- verify ---------------------------------------------------------------------

def cmd_verify(args):
    results = run_suites(args.suite, args.seed)
    for r in results:
        print(r.summary())
        for note in r.notes:
            print(f"    {note}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed (seed {args.seed})")
    if args.out:
        doc = {"schema_version": SCHEMA_VERSION, "command": "verify", "seed": args.seed,
               "suites": [r.to_dict() for r in results], "passed": not failed}
        write_atomic(args.out, _dump(doc))
    return 1 if failed else 0


# --- sweep ----------------------------------------------------------------------

def sweep_rows(alpha_start, alpha_end, steps, c=1.0):
    if not (0 < alpha_start < alpha_end < 1):
        raise BadRange(f"need 0 < alpha_start < alpha_end < 1, got {alpha_start}, {alpha_end}")
    if steps < 2:
        raise BadRange(f"steps must be at least 2, got {steps}")
    rows = []
    for a in np.linspace(alpha_start, alpha_end, steps):
        a = float(a)
        inst = oring_instance(a, 3, c)
        opt = solve_oring(a, c)
        g = wage_gap_report(inst, opt.x)
        pr = payoff_report(inst, opt.x)
        w = opt.wages.w
        rows.append([a, opt.x[0], opt.x[2], w[0], w[1], w[2], g.gap_no_ai, g.gap_at_x, g.ratio,
                     *pr.payoffs, pr.deltas[0]])
    return rows


def format_csv(rows):
    lines = [SWEEP_HEADER]
    lines += [",".join(f"{float(v):.12g}" for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_sweep(args):
    rows = sweep_rows(args.alpha_start, args.alpha_end, args.steps)
    write_atomic(args.out, format_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


# --- simulate -------------------------------------------------------------------

def _z(sim, ref, se):
    if ref is None or sim is None:
        return None
    if se and se > 0:
        return (sim - ref) / se
    # a degenerate (constant) outcome: agreement up to summation rounding
    return 0.0 if abs(sim - ref) <= 1e-9 * max(1.0, abs(ref)) else None


def build_sim_report(cfg, trials, seed):
    if cfg.model != "chain":
        raise ConfigError("simulation covers the chain model only", field="model")
    inst, opt, route = _solve(cfg)
    x = np.asarray(cfg.strategy, dtype=float) if cfg.strategy is not None else opt.x
    w = optimal_wages(inst, x)
    dev = cfg.deviant
    rep = monte_carlo(inst, x, w, trials, seed, forced_deviant=dev, condition_human=(dev,) if dev else ())
    analytic = {"success_rate": None, "mean_cost": None, "mean_payoffs": None, "conditional_success_rate": None}
    if dev is None:
        wv = w.w
        analytic["success_rate"] = inst.pn
        analytic["mean_cost"] = expected_cost(inst, x).total
        analytic["mean_payoffs"] = [
            0.0 if x[i] >= 1 else float((1 - x[i]) * (inst.pn * wv[i] - inst.c)) for i in range(inst.n)
        ]
    elif x[dev - 1] < 1:
        analytic["conditional_success_rate"] = shirk_success_rate(inst, x, dev)
    z = {
        "success_rate": _z(rep.success_rate, analytic["success_rate"], rep.success_se),
        "mean_cost": _z(rep.mean_cost, analytic["mean_cost"], rep.cost_se),
        "conditional_success_rate": _z(
            rep.conditional_success_rate, analytic["conditional_success_rate"], rep.conditional_success_se
        ),
        "mean_payoffs": None if analytic["mean_payoffs"] is None else [
            _z(s, a, e) for s, a, e in zip(rep.mean_payoffs, analytic["mean_payoffs"], rep.payoff_se)
        ],
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "config": cfg.to_dict(),
        "strategy_source": "config" if cfg.strategy is not None else route,
        "x": x,
        "wages": w.to_list(),
        "simulation": rep.to_dict(),
        "analytic": analytic,
        "z_scores": z,
    }


def cmd_simulate(args):
    cfg = load_config(args.config)
    if args.trials < 1:
        raise ConfigError("must be at least 1", field="trials")
    doc = build_sim_report(cfg, args.trials, args.seed)
    out = args.out or cfg.output.get("simulation")
    if not out:
        raise ConfigError("give --out or output.simulation in the config", field="output")
    write_atomic(out, _dump(doc))
    zs = [v for v in doc["z_scores"].values() if isinstance(v, float)]
    worst = max((abs(v) for v in zs), default=0.0)
    print(f"{args.trials} trials, seed {args.seed}: success {doc['simulation']['success_rate']:.6f}, "
          f"mean cost {doc['simulation']['mean_cost']:.6f}, max |z| {worst:.3f}")
    return 0


# --- entry point ----------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="teamai", description="Optimal AI replacement in sequential teams.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one configured instance")
    s.add_argument("--config", required=True)
    s.add_argument("--model", choices=["chain", "task", "star", "strategic"])
    s.add_argument("--out", help="report path (defaults to output.report in the config)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)} or 'all'")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--out", help="optional JSON summary path")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="O-ring sweep over alpha to CSV")
    w.add_argument("--alpha-start", type=float, required=True)
    w.add_argument("--alpha-end", type=float, required=True)
    w.add_argument("--steps", type=int, required=True)
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="Monte Carlo play of the configured chain")
    m.add_argument("--config", required=True)
    m.add_argument("--trials", type=int, default=100_000)
    m.add_argument("--seed", type=int, default=42)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TeamAIError as exc:  # ConfigError, BadRange, UnknownSuite and friends
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
