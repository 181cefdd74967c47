"""Production environment, replacement strategies and topologies.

Positions are 1-based in every public signature (worker 1 is front-most,
worker ``n`` end-most); arrays are 0-based internally, so ``x[i - 1]`` is
worker ``i``'s replacement probability and ``p[k]`` is the success
probability with ``k`` efforts.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    BadAlpha,
    BadCost,
    BadLength,
    CapacityExceeded,
    NonComplementary,
    NonMonotone,
    OutOfRange,
)

# slack allowed on sum(x) <= capacity for strategies produced by arithmetic
CAPACITY_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    """A team of ``n`` workers with effort cost ``c`` and success curve ``p``."""

    n: int
    c: float
    p: np.ndarray

    @property
    def pn(self) -> float:
        return float(self.p[self.n])

    def increments(self) -> np.ndarray:
        return np.diff(self.p)

    def to_dict(self) -> dict:
        return {"n": self.n, "c": self.c, "p": [float(v) for v in self.p]}

    def __repr__(self):
        return f"Instance(n={self.n}, c={self.c}, p={list(np.round(self.p, 6))})"


@dataclass(frozen=True, eq=False)
class ReplacementStrategy:
    """Per-worker replacement probabilities with ``x.sum() <= capacity``."""

    x: np.ndarray
    capacity: float = 1.0

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def utilization(self) -> float:
        return float(self.x.sum())

    def __iter__(self):
        return iter(self.x)

    def __getitem__(self, i):
        return self.x[i]

    def __len__(self):
        return len(self.x)

    def __repr__(self):
        return f"ReplacementStrategy(x={list(np.round(self.x, 6))}, capacity={self.capacity})"


class Topology(enum.Enum):
    CHAIN = "chain"
    STAR = "star"

    def central(self, n: int):
        """Index of the central worker (1-based), ``None`` for a chain."""
        return n if self is Topology.STAR else None


def validate_instance(n, c, p) -> Instance:
    """Check the production assumptions and return an immutable Instance.

    ``p`` must be strictly increasing with strictly increasing increments
    (complementary efforts), bounded in [0, 1], and ``c`` must be positive.
    All comparisons are exact: inputs are user data, not computed values.
    """
    n = int(n)
    if n < 3:
        raise BadLength(f"team size must be at least 3, got {n}")
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or len(p) != n + 1:
        raise BadLength(f"p must have length n+1={n + 1}, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise NonMonotone("p contains non-finite values")
    if p[0] < 0 or p[-1] > 1:
        raise NonMonotone(f"p must lie in [0, 1], got p[0]={p[0]}, p[n]={p[-1]}")
    d = np.diff(p)
    if np.any(d <= 0):
        k = int(np.argmax(d <= 0))
        raise NonMonotone(f"p must be strictly increasing (p[{k}]={p[k]} >= p[{k + 1}]={p[k + 1]})")
    dd = np.diff(d)
    if np.any(dd <= 0):
        k = int(np.argmax(dd <= 0))
        raise NonComplementary(
            f"increments must strictly increase: p[{k + 2}]-p[{k + 1}]={d[k + 1]} <= p[{k + 1}]-p[{k}]={d[k]}"
        )
    c = float(c)
    if not (np.isfinite(c) and c > 0):
        raise BadCost(f"effort cost must be positive, got {c}")
    return Instance(n=n, c=c, p=_frozen(p))


def oring_production(alpha, n=3) -> np.ndarray:
    """Success curve ``p[k] = alpha**(n - k)``."""
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha}")
    if n < 3:
        raise BadLength(f"team size must be at least 3, got {n}")
    return alpha ** (n - np.arange(n + 1, dtype=float))


def oring_instance(alpha, n=3, c=1.0) -> Instance:
    return validate_instance(n, c, oring_production(alpha, n))


def validate_strategy(x, capacity=1.0, n=None) -> ReplacementStrategy:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise BadLength(f"strategy must be a vector, got shape {x.shape}")
    if n is not None and len(x) != n:
        raise BadLength(f"strategy must have length {n}, got {len(x)}")
    capacity = float(capacity)
    if not capacity >= 0:
        raise OutOfRange(f"capacity must be nonnegative, got {capacity}")
    if not np.all(np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise OutOfRange(f"replacement probabilities must lie in [0, 1], got {list(x)}")
    total = x.sum()
    if total > capacity + CAPACITY_TOL:
        raise CapacityExceeded(f"sum(x)={total:.12g} exceeds capacity {capacity}")
    return ReplacementStrategy(x=_frozen(x), capacity=capacity)


def as_strategy(inst: Instance, x, capacity=1.0) -> ReplacementStrategy:
    """Accept either a ReplacementStrategy or a raw vector sized for ``inst``."""
    if isinstance(x, ReplacementStrategy):
        if x.n != inst.n:
            raise BadLength(f"strategy has {x.n} entries, instance has {inst.n} workers")
        return x
    return validate_strategy(x, capacity, n=inst.n)


def random_instance(rng: np.random.Generator, n=3, c=1.0, p0_max=0.3, p0=None) -> Instance:
    """Draw an admissible instance: sorted positive increments on top of ``p0``."""
    while True:
        d = np.sort(rng.uniform(0.02, 1.0, size=n))
        if np.any(np.diff(d) < 1e-6):
            continue
        base = rng.uniform(0.0, p0_max) if p0 is None else float(p0)
        top = rng.uniform(0.4, 1.0) * (1.0 - base)
        d = d * top / d.sum()
        p = np.concatenate([[base], base + np.cumsum(d)])
        p[-1] = min(p[-1], 1.0)
        try:
            return validate_instance(n, c, p)
        except (NonMonotone, NonComplementary):
            continue
