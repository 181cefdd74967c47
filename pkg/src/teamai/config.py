"""JSON run configuration for the command-line tool.

Example::

    {
      "model": "chain",
      "n": 3,
      "c": 1.0,
      "production": {"oring_alpha": 0.5},
      "capacity": 1.0,
      "solver": {"grid_step": 0.005, "tol": 1e-8},
      "output": {"report": "report.json"}
    }

``production`` holds exactly one of ``p`` (a list of ``n + 1`` numbers) or
``oring_alpha``. For ``simulate`` an optional ``strategy`` list fixes ``x``
(otherwise the solved optimum is played) and ``deviant`` forces one shirk.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exceptions import BadAlpha, BadCost, BadLength, ConfigError, TeamAIError
from .model import Instance, oring_production, validate_instance

MODELS = ("chain", "task", "star", "strategic")
_TOP = {"model", "n", "c", "production", "capacity", "solver", "output", "strategy", "deviant"}


@dataclass(frozen=True)
class SolverSettings:
    grid_step: float | None = None
    tol: float = 1e-8


@dataclass(frozen=True)
class Config:
    model: str = "chain"
    n: int = 3
    c: float = 1.0
    p: tuple | None = None
    oring_alpha: float | None = None
    capacity: float = 1.0
    solver: SolverSettings = field(default_factory=SolverSettings)
    output: dict = field(default_factory=dict)
    strategy: tuple | None = None
    deviant: int | None = None

    def instance(self) -> Instance:
        p = self.p if self.p is not None else oring_production(self.oring_alpha, self.n)
        return validate_instance(self.n, self.c, p)

    def with_model(self, model):
        return parse_config({**self.to_dict(), "model": model})

    def to_dict(self) -> dict:
        production = {"p": list(self.p)} if self.p is not None else {"oring_alpha": self.oring_alpha}
        d = {
            "model": self.model,
            "n": self.n,
            "c": self.c,
            "production": production,
            "capacity": self.capacity,
            "solver": {"grid_step": self.solver.grid_step, "tol": self.solver.tol},
            "output": dict(self.output),
        }
        if self.strategy is not None:
            d["strategy"] = list(self.strategy)
        if self.deviant is not None:
            d["deviant"] = self.deviant
        return d


def _number(raw, name, kind=float):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"expected a number, got {raw!r}", field=name)
    if kind is int:
        if float(raw) != int(raw):
            raise ConfigError(f"expected an integer, got {raw!r}", field=name)
        return int(raw)
    return float(raw)


def parse_config(doc: dict) -> Config:
    """Build a :class:`Config` from a decoded JSON object, checking every field."""
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object", field="config")
    unknown = set(doc) - _TOP
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError("unknown field", field=name)

    model = doc.get("model", "chain")
    if model not in MODELS:
        raise ConfigError(f"must be one of {', '.join(MODELS)}, got {model!r}", field="model")
    n = _number(doc.get("n", 3), "n", int)
    c = _number(doc.get("c", 1.0), "c")

    prod = doc.get("production")
    if not isinstance(prod, dict):
        raise ConfigError("required object with 'p' or 'oring_alpha'", field="production")
    extra = set(prod) - {"p", "oring_alpha"}
    if extra:
        name = sorted(extra)[0]
        raise ConfigError("unknown field", field=f"production.{name}")
    if ("p" in prod) == ("oring_alpha" in prod):
        raise ConfigError("give exactly one of 'p' or 'oring_alpha'", field="production")
    p = alpha = None
    if "p" in prod:
        if not isinstance(prod["p"], list):
            raise ConfigError("expected a list of numbers", field="production.p")
        p = tuple(_number(v, "production.p") for v in prod["p"])
    else:
        alpha = _number(prod["oring_alpha"], "production.oring_alpha")

    capacity = _number(doc.get("capacity", 1.0), "capacity")
    if model != "task" and capacity != 1.0:
        raise ConfigError("only the task model accepts capacity other than 1", field="capacity")
    if not 0.0 < capacity <= n:
        raise ConfigError(f"must lie in (0, {n}]", field="capacity")

    solver_doc = doc.get("solver", {}) or {}
    if not isinstance(solver_doc, dict) or set(solver_doc) - {"grid_step", "tol"}:
        raise ConfigError("only 'grid_step' and 'tol' are allowed", field="solver")
    step = solver_doc.get("grid_step")
    step = None if step is None else _number(step, "solver.grid_step")
    if step is not None and not 0.0 < step <= 0.5:
        raise ConfigError("must lie in (0, 0.5]", field="solver.grid_step")
    tol = _number(solver_doc.get("tol", 1e-8), "solver.tol")
    if tol <= 0:
        raise ConfigError("must be positive", field="solver.tol")

    output = doc.get("output", {}) or {}
    if not isinstance(output, dict) or not all(isinstance(v, str) for v in output.values()):
        raise ConfigError("expected an object of path strings", field="output")

    strategy = doc.get("strategy")
    if strategy is not None:
        if not isinstance(strategy, list):
            raise ConfigError("expected a list of numbers", field="strategy")
        strategy = tuple(_number(v, "strategy") for v in strategy)
        if len(strategy) != n:
            raise ConfigError(f"expected {n} entries", field="strategy")
    deviant = doc.get("deviant")
    if deviant is not None:
        deviant = _number(deviant, "deviant", int)
        if not 1 <= deviant <= n:
            raise ConfigError(f"must lie in 1..{n}", field="deviant")

    cfg = Config(model, n, c, p, alpha, capacity, SolverSettings(step, tol), dict(output), strategy, deviant)
    try:
        cfg.instance()
    except BadCost as exc:
        raise ConfigError(f"{exc}", field="c") from exc
    except BadAlpha as exc:
        raise ConfigError(f"{exc}", field="production.oring_alpha") from exc
    except BadLength as exc:
        name = "n" if n < 3 else "production"
        raise ConfigError(str(exc), field=name) from exc
    except TeamAIError as exc:
        raise ConfigError(f"{exc}", field="production") from exc
    return cfg


def load_config(path) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", field="config") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", field="config") from exc
    return parse_config(doc)


def dump_config(cfg: Config) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"
