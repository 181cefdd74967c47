"""Estimator-style front end.

``fit`` takes a success curve ``p`` (length ``n + 1``) and solves for the
optimal replacement strategy; ``predict`` maps rows of candidate strategies
to expected costs and ``transform`` maps them to optimal wage vectors. This
lets strategy grids flow through ordinary array pipelines.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .chain import cost_batch, optimal_wages, strategic_ai_cost
from .exceptions import CapacityExceeded, ConfigError, OutOfRange
from .model import CAPACITY_TOL, oring_production, validate_instance
from .optimize import solve_chain_general, solve_chain_n3, solve_strategic
from .star import _star_cost_rows, solve_star, star_shirk_rate
from .task import TaskStrategy, solve_task_based, task_expected_cost, task_wages

MODELS = ("chain", "task", "star", "strategic")


def check_production(p):
    p = check_array(np.asarray(p, dtype=float).reshape(1, -1), ensure_min_features=4)[0]
    return p


def check_strategies(X, n, capacity=1.0):
    """Validate a (m, n) array of strategies row by row."""
    X = check_array(X, dtype=float, ensure_2d=False)
    X = np.atleast_2d(X)
    if X.shape[1] != n:
        raise OutOfRange(f"expected {n} columns, got {X.shape[1]}")
    if np.any(X < 0) or np.any(X > 1):
        raise OutOfRange("replacement probabilities must lie in [0, 1]")
    if np.any(X.sum(axis=1) > capacity + CAPACITY_TOL):
        raise CapacityExceeded(f"some rows exceed capacity {capacity}")
    return X


class ReplacementOptimizer(BaseEstimator):
    """Find the cost-minimizing AI deployment for a team.

    Parameters
    ----------
    model : {"chain", "task", "star", "strategic"}
    c : float
        Effort cost shared by workers and AI.
    capacity : float
        AI capacity; only the task model accepts values other than 1.
    grid_step : float or None
        Grid resolution for numerical searches (``None`` picks per model).
    tol : float
        Refinement tolerance.

    Attributes
    ----------
    instance_, optimum_, x_star_, wages_, cost_
    """

    def __init__(self, model="chain", c=1.0, capacity=1.0, grid_step=None, tol=1e-8):
        self.model = model
        self.c = c
        self.capacity = capacity
        self.grid_step = grid_step
        self.tol = tol

    def fit(self, p, y=None):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}", field="model")
        p = check_production(p)
        inst = validate_instance(len(p) - 1, self.c, p)
        if self.model != "task" and self.capacity != 1.0:
            raise ConfigError("only the task model supports capacity other than 1", field="capacity")
        if self.model == "chain":
            if inst.n == 3:
                opt = solve_chain_n3(inst, self.grid_step or 1 / 200, self.tol)
            else:
                opt = solve_chain_general(inst, self.grid_step or 0.05, self.tol)
            x, w, cost = opt.x, opt.wages.w, opt.cost.total
        elif self.model == "task":
            opt = solve_task_based(inst, self.capacity)
            x, w, cost = opt.x, opt.wages.w, opt.cost.total
        elif self.model == "star":
            opt = solve_star(inst, self.grid_step or 0.005)
            x, cost = opt.x.x, opt.cost.total
            w = self._star_wages(inst, x)
        else:
            opt = solve_strategic(inst)
            x, w, cost = opt.x, opt.wages.w, opt.cost.total
        self.instance_ = inst
        self.optimum_ = opt
        self.x_star_ = np.asarray(x)
        self.wages_ = np.asarray(w)
        self.cost_ = float(cost)
        self.n_workers_ = inst.n
        return self

    @classmethod
    def from_oring(cls, alpha, n=3, **params):
        return cls(**params).fit(oring_production(alpha, n))

    @staticmethod
    def _star_wages(inst, x):
        return np.array([
            np.nan if x[i - 1] >= 1 else inst.c / (inst.pn - star_shirk_rate(inst, x, i))
            for i in range(1, inst.n + 1)
        ])

    def predict(self, X):
        """Expected principal cost of each strategy row."""
        check_is_fitted(self, "instance_")
        inst = self.instance_
        X = check_strategies(X, inst.n, self.capacity)
        if self.model == "chain":
            return cost_batch(inst, X)
        if self.model == "star":
            return _star_cost_rows(inst, X)
        if self.model == "task":
            return np.array([task_expected_cost(inst, TaskStrategy(row, self.capacity)).total for row in X])
        return np.array([strategic_ai_cost(inst, row).total for row in X])

    def transform(self, X):
        """Optimal wages for each strategy row (``nan`` where replaced for sure)."""
        check_is_fitted(self, "instance_")
        inst = self.instance_
        X = check_strategies(X, inst.n, self.capacity)
        if self.model == "chain":
            return np.vstack([optimal_wages(inst, row).w for row in X])
        if self.model == "star":
            return np.vstack([self._star_wages(inst, row) for row in X])
        if self.model == "task":
            return np.vstack([task_wages(inst, TaskStrategy(row, self.capacity)).w for row in X])
        base = inst.c / (inst.pn - inst.p[:-1])
        return np.where(X >= 1.0, np.nan, base[None, :])

    def score(self, X, y=None):
        """Negative mean cost of the rows (higher is better)."""
        return -float(np.mean(self.predict(X)))
