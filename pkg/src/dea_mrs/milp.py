"""Best-first branch and bound for LPs with binary indicator variables.

Binaries are branched on by substitution: fixing ``x_j = v`` removes column
``j`` and moves ``v * A[:, j]`` to the right-hand side, so every node solves a
plain LP of the same row count. Bounds ``x_j <= 1`` are added for all
binaries. When ``integral_objective`` is set (objective is a count) a node is
pruned as soon as ``floor(bound) <= incumbent``.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lp
from .errors import SolverError
from .lp import DEFAULT_TOL, LpProblem, Tolerances

DEFAULT_BIG_M = 1e6
_INT_TOL = 1e-6


@dataclass(frozen=True)
class MilpProblem:
    base: LpProblem
    binary_vars: tuple
    big_M: float = DEFAULT_BIG_M
    # binary index -> continuous variable it indicates (for invariant checks)
    links: Optional[dict] = None
    integral_objective: bool = True

    def __post_init__(self):
        object.__setattr__(self, "binary_vars", tuple(int(j) for j in self.binary_vars))
        if not self.big_M > 0:
            raise ValueError("big_M must be positive")
        bins = set(self.binary_vars)
        if len(bins) != len(self.binary_vars):
            raise ValueError("duplicate binary variable index")
        if any(j < 0 or j >= self.base.n_vars for j in bins):
            raise ValueError("binary variable index out of range")
        if self.links and bins & set(self.links.values()):
            raise ValueError("binary variables must be disjoint from the variables they indicate")


@dataclass
class MilpSolution:
    status: str
    objective: float
    x: np.ndarray
    nodes: int  # branch nodes created below the root
    lp_solves: int
    bound: float = field(default=math.nan)

    @property
    def optimal(self) -> bool:
        return self.status == lp.OPTIMAL


def _with_bounds(p: LpProblem, binaries) -> LpProblem:
    rows = np.zeros((len(binaries), p.n_vars))
    for r, j in enumerate(binaries):
        rows[r, j] = 1.0
    return LpProblem(
        p.c,
        np.vstack([p.A, rows]),
        np.concatenate([p.b, np.ones(len(binaries))]),
        p.senses + (lp.LE,) * len(binaries),
        p.direction,
    )


def _restrict(p: LpProblem, fixed: dict):
    """LP with the variables in ``fixed`` substituted out; returns (problem, free columns, offset)."""
    if not fixed:
        return p, np.arange(p.n_vars), 0.0
    cols = np.array(sorted(fixed))
    vals = np.array([fixed[j] for j in cols], dtype=float)
    free = np.setdiff1d(np.arange(p.n_vars), cols)
    b = p.b - p.A[:, cols] @ vals
    offset = float(p.c[cols] @ vals)
    return LpProblem(p.c[free], p.A[:, free], b, p.senses, p.direction), free, offset


def _node_solve(p, fixed, tol):
    sub, free, offset = _restrict(p, fixed)
    sol = lp.solve(sub, tol)
    if not sol.optimal:
        return sol.status, None, math.nan
    x = np.zeros(p.n_vars)
    x[free] = sol.x
    for j, v in fixed.items():
        x[j] = v
    return sol.status, x, sol.objective + offset


def solve_milp(p: MilpProblem, tol: Tolerances = DEFAULT_TOL, node_limit: int = 10000) -> MilpSolution:
    """Solve ``p`` to proven optimality.

    The returned binaries are exactly 0 or 1: the winning node is re-solved
    with all binaries fixed, so continuous values are consistent with them.
    """
    base = _with_bounds(p.base, p.binary_vars)
    maximize = base.direction == "max"
    sign = 1.0 if maximize else -1.0  # work with "larger is better"

    def prunable(bound, incumbent):
        if incumbent is None:
            return False
        if p.integral_objective:
            rounded = math.floor(sign * bound + _INT_TOL)
            return rounded <= sign * incumbent + _INT_TOL
        return sign * bound <= sign * incumbent + tol.feas

    lp_solves = 0
    status, x, bound = _node_solve(base, {}, tol)
    lp_solves += 1
    if status == lp.UNBOUNDED:
        return MilpSolution(lp.UNBOUNDED, sign * math.inf, np.full(base.n_vars, np.nan), 0, lp_solves)
    if x is None:
        return MilpSolution(lp.INFEASIBLE, math.nan, np.full(base.n_vars, np.nan), 0, lp_solves)
    root_bound = bound

    incumbent_val: Optional[float] = None
    incumbent_x: Optional[np.ndarray] = None

    # initial incumbent: round binaries down (or to 1 when within tolerance) and re-solve
    rounded = {j: (1.0 if x[j] >= 1 - _INT_TOL else 0.0) for j in p.binary_vars}
    st, xr, val = _node_solve(base, rounded, tol)
    lp_solves += 1
    if xr is not None:
        incumbent_val, incumbent_x = val, xr

    counter = itertools.count()
    heap = [(-sign * bound, next(counter), {}, x)]
    nodes = 0
    while heap:
        neg, _, fixed, xn = heapq.heappop(heap)
        bound = -neg * sign
        if prunable(bound, incumbent_val):
            continue
        frac = [(min(xn[j], 1 - xn[j]), j) for j in p.binary_vars if j not in fixed]
        frac = [(f, j) for f, j in frac if f > _INT_TOL]
        if not frac:
            integral = {j: float(round(xn[j])) for j in p.binary_vars}
            st, xi, val = _node_solve(base, integral, tol)
            lp_solves += 1
            if xi is not None and (incumbent_val is None or sign * val > sign * incumbent_val + tol.feas):
                incumbent_val, incumbent_x = val, xi
            continue
        # most fractional, lowest index on ties
        best = max(f for f, _ in frac)
        j = min(j for f, j in frac if f >= best - 1e-12)
        for v in (1.0, 0.0):
            nodes += 1
            if nodes > node_limit:
                raise SolverError(f"branch-and-bound node limit ({node_limit}) exceeded")
            child = dict(fixed)
            child[j] = v
            st, xc, bc = _node_solve(base, child, tol)
            lp_solves += 1
            if xc is None or prunable(bc, incumbent_val):
                continue
            heapq.heappush(heap, (-sign * bc, next(counter), child, xc))

    if incumbent_x is None:
        return MilpSolution(lp.INFEASIBLE, math.nan, np.full(base.n_vars, np.nan), nodes, lp_solves, root_bound)
    return MilpSolution(lp.OPTIMAL, incumbent_val, incumbent_x, nodes, lp_solves, root_bound)
