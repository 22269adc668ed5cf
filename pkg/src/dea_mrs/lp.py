"""Two-phase primal simplex on a dense tableau.

Problems are stated as ``c^T x`` (max or min) subject to rows ``A_i x (<=|>=|=) b_i``
and ``x >= 0``. Slack/surplus columns are appended per inequality row, rows are
sign-normalized so that ``b >= 0``, and phase 1 minimizes the sum of artificial
variables on rows that lack a natural ``+1`` slack. Phase 2 then optimizes the
true objective with artificials removed, so reported reduced costs are never
contaminated by penalty terms.

Reduced costs are reported as ``z_j - c_j`` of the *minimization* form of the
problem (the objective is negated for ``max``). With that convention a basis is
optimal iff every reported reduced cost is ``<= 0``, and a strictly negative
entry means the variable is zero in every optimal solution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import SolverError

log = logging.getLogger(__name__)

LE, GE, EQ = "<=", ">=", "="
_SENSE_ALIASES = {"<=": LE, "le": LE, "≤": LE, ">=": GE, "ge": GE, "≥": GE, "=": EQ, "==": EQ, "eq": EQ}

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every solver in the package.

    ``feas`` bounds constraint residuals, ``pos`` decides strict positivity of
    intensities and dual slacks, ``rc`` decides whether a reduced cost is zero,
    and ``obj`` is the relative relaxation applied when an optimal objective
    value is fixed as a constraint.
    """

    feas: float = 1e-9
    pos: float = 1e-7
    rc: float = 1e-9
    obj: float = 1e-9

    def __post_init__(self):
        for name in ("feas", "pos", "rc", "obj"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")
        if not self.pos > self.feas:
            raise ValueError("tolerance pos must exceed feas")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class LpProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: tuple
    direction: str = "min"
    names: Optional[tuple] = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.size == 0:
            A = A.reshape(b.size, c.size)
        if A.ndim != 2 or A.shape != (b.size, c.size):
            raise ValueError(f"inconsistent LP dimensions: A {A.shape}, b {b.shape}, c {c.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        try:
            senses = tuple(_SENSE_ALIASES[str(s)] for s in self.senses)
        except KeyError as exc:
            raise ValueError(f"unknown constraint sense {exc.args[0]!r}") from None
        if len(senses) != b.size:
            raise ValueError("one sense per constraint row is required")
        direction = str(self.direction).lower()
        if direction not in ("min", "max"):
            raise ValueError("direction must be 'min' or 'max'")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "direction", direction)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class StandardForm:
    """``A x = b, x >= 0, b >= 0`` embedding of an :class:`LpProblem`."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray  # minimization costs over all columns
    n_struct: int
    slack_col: np.ndarray  # per original row, column of its slack/surplus or -1
    natural: np.ndarray  # per row, column usable as initial basic variable or -1
    flipped: np.ndarray  # per row, True if multiplied by -1
    row_scale: np.ndarray
    col_scale: np.ndarray  # original column value = col_scale * scaled value


def _equilibrate(A, passes=6):
    """Power-of-two row/column factors from alternating geometric-mean scaling."""
    k, N = A.shape
    r = np.ones(k)
    c = np.ones(N)
    absA = np.abs(A)
    nz = absA > 0
    if not nz.any():
        return r, c
    for _ in range(passes):
        S = absA * r[:, None] * c[None, :]
        big = np.where(nz, S, 0.0).max(axis=1)
        small = np.where(nz, S, np.inf).min(axis=1)
        rows = big > 0
        r[rows] /= np.sqrt(big[rows] * small[rows])
        S = absA * r[:, None] * c[None, :]
        big = np.where(nz, S, 0.0).max(axis=0)
        small = np.where(nz, S, np.inf).min(axis=0)
        cols = big > 0
        c[cols] /= np.sqrt(big[cols] * small[cols])
    return np.exp2(np.round(np.log2(r))), np.exp2(np.round(np.log2(c)))


def standard_form(p: LpProblem, scale: bool = True) -> StandardForm:
    k, n = p.A.shape
    n_slack = sum(s != EQ for s in p.senses)
    A = np.zeros((k, n + n_slack))
    A[:, :n] = p.A
    b = p.b.copy()
    slack_col = np.full(k, -1, dtype=np.int64)
    col = n
    for i, s in enumerate(p.senses):
        if s == LE:
            A[i, col] = 1.0
        elif s == GE:
            A[i, col] = -1.0
        if s != EQ:
            slack_col[i] = col
            col += 1
    flipped = b < 0
    A[flipped] *= -1.0
    b[flipped] *= -1.0
    c = np.zeros(n + n_slack)
    c[:n] = p.c if p.direction == "min" else -p.c
    if scale:
        rs, cs = _equilibrate(A)
    else:
        rs, cs = np.ones(k), np.ones(n + n_slack)
    A = A * rs[:, None] * cs[None, :]
    b = b * rs
    c = c * cs
    natural = np.full(k, -1, dtype=np.int64)
    for i in range(k):
        j = slack_col[i]
        if j >= 0 and A[i, j] > 0:
            natural[i] = j
    return StandardForm(A, b, c, n, slack_col, natural, flipped, rs, cs)


@dataclass
class LpSolution:
    status: str
    objective: float
    x: np.ndarray  # structural variables
    x_full: np.ndarray  # structural + slack columns
    basis: tuple  # basic column per kept row
    reduced_costs: np.ndarray  # z_j - c_j of the min form, 0 on basic columns
    iterations: int
    rows: tuple  # indices of original rows kept (redundant rows dropped)
    warm: bool = False  # phase 2 started from a supplied basis
    ray: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def nonbasic(self) -> np.ndarray:
        mask = np.ones(self.x_full.size, dtype=bool)
        mask[list(self.basis)] = False
        return np.flatnonzero(mask)


def _max_iter(rows: int, cols: int) -> int:
    return 50 * (rows + cols) + 1000


def _objective_row(T, basis, cost):
    cb = cost[basis]
    T[-1, :-1] = cost - cb @ T[:-1, :-1]
    T[-1, -1] = -(cb @ T[:-1, -1])


_REFRESH_EVERY = 25


def _refactor(T, basis, A, b, cost):
    """Rebuild ``T`` in place from the original data for the current basis."""
    B = A[:, basis]
    try:
        T[:-1, :-1] = np.linalg.solve(B, A)
        T[:-1, -1] = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        return False
    T[:-1, basis] = np.eye(basis.size)
    _objective_row(T, basis, cost)
    return True


def _run(T, basis, tol, max_iter, A, b, cost):
    """Pivot to optimality, refactoring from ``(A, b)`` every few pivots.

    A result is accepted only once a freshly refactored tableau confirms it
    without further pivots.
    """
    total = 0
    # pricing noise grows with the size of the (scaled) costs
    tol_rc = tol.rc * max(1.0, float(np.abs(cost).max(initial=0.0)))
    while True:
        budget = min(_REFRESH_EVERY, max_iter - total)
        status, it, col = _kernels.simplex_loop(T, basis, tol_rc, _PIVOT_TOL, budget, tol.feas)
        total += it
        if status == _kernels.ITERATION_LIMIT and total >= max_iter:
            raise SolverError(f"simplex iteration limit ({max_iter}) exceeded")
        if status != _kernels.ITERATION_LIMIT and it == 0:
            return status, total, col
        if basis.size and not _refactor(T, basis, A, b, cost):
            raise SolverError("singular basis encountered while refactoring")


def _phase_one(sf: StandardForm, tol: Tolerances):
    """Return ``(T, basis, kept_rows, pivots)`` for a feasible basis, or ``None`` if infeasible."""
    k, N = sf.A.shape
    need = np.flatnonzero(sf.natural < 0)
    n_art = need.size
    T = np.zeros((k + 1, N + n_art + 1))
    T[:k, :N] = sf.A
    T[:k, -1] = sf.b
    basis = sf.natural.copy()
    for a, i in enumerate(need):
        T[i, N + a] = 1.0
        basis[i] = N + a
    pivots = 0
    if n_art:
        cost = np.zeros(N + n_art)
        cost[N:] = 1.0
        _objective_row(T, basis, cost)
        full = np.hstack([sf.A, T[:k, N : N + n_art]])
        status, pivots, _ = _run(T, basis, tol, _max_iter(k, N + n_art), full, sf.b, cost)
        infeas = -T[-1, -1]
        if infeas > tol.feas * max(1.0, float(np.abs(sf.b).sum())):
            return None
    keep = np.ones(k, dtype=bool)
    for i in range(k):
        if basis[i] < N:
            continue
        # artificial still basic at zero level: pivot it out or drop the row
        row = T[i, :N]
        cand = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
        if cand.size:
            _kernels.pivot(T, i, int(cand[0]))
            basis[i] = cand[0]
            pivots += 1
        else:
            keep[i] = False
    rows = np.flatnonzero(keep)
    T = np.vstack([T[rows][:, list(range(N)) + [T.shape[1] - 1]], np.zeros((1, N + 1))])
    return np.ascontiguousarray(T), basis[rows].astype(np.int64), tuple(int(r) for r in rows), pivots


def _warm_tableau(sf: StandardForm, basis: Sequence[int], rows: Sequence[int], tol: Tolerances):
    rows = list(rows)
    basis = np.asarray(basis, dtype=np.int64)
    if basis.size != len(rows) or len(set(basis.tolist())) != basis.size:
        return None
    if basis.size and (basis.min() < 0 or basis.max() >= sf.A.shape[1]):
        return None
    A = sf.A[rows]
    b = sf.b[rows]
    B = A[:, basis]
    if B.size and np.linalg.cond(B) > 1e12:
        return None
    try:
        BinvA = np.linalg.solve(B, A) if B.size else A
        Binvb = np.linalg.solve(B, b) if B.size else b
    except np.linalg.LinAlgError:
        return None
    if Binvb.size and Binvb.min() < -tol.pos:
        return None
    Binvb = np.maximum(Binvb, 0.0)
    T = np.zeros((len(rows) + 1, sf.A.shape[1] + 1))
    T[:-1, :-1] = BinvA
    T[:-1, -1] = Binvb
    for i, j in enumerate(basis):
        col = np.zeros(len(rows))
        col[i] = 1.0
        T[:-1, j] = col
    return T, basis.copy()


def solve(
    p: LpProblem,
    tol: Tolerances = DEFAULT_TOL,
    *,
    basis: Optional[Sequence[int]] = None,
    rows: Optional[Sequence[int]] = None,
) -> LpSolution:
    """Solve ``p`` by the two-phase simplex method with Bland's rule.

    If ``basis`` (and, when redundant rows were dropped, ``rows``) is given and
    describes a nonsingular primal-feasible basis of the standard form, phase 1
    is skipped and phase 2 starts from it. Otherwise the solve is cold.
    Infeasible and unbounded problems are reported through ``status``;
    exceeding the iteration limit raises :class:`SolverError`.
    """
    sf = standard_form(p)
    k, N = sf.A.shape
    start = None
    pivots = 0
    if basis is not None:
        if rows is None:
            rows = tuple(range(k))
        start = _warm_tableau(sf, basis, rows, tol)
        if start is None:
            log.debug("warm start rejected; falling back to a cold solve")
        else:
            T, bas = start
            kept = tuple(int(r) for r in rows)
    if start is None:
        first = _phase_one(sf, tol)
        if first is None:
            return _empty(p, sf, INFEASIBLE, pivots)
        T, bas, kept, pivots = first
    _objective_row(T, bas, sf.c)
    kr = list(kept)
    status, it, col = _run(T, bas, tol, _max_iter(len(kept), N), sf.A[kr], sf.b[kr], sf.c)
    pivots += it
    if status == _kernels.UNBOUNDED:
        ray = np.zeros(N)
        ray[col] = 1.0
        ray[bas] = -T[:-1, col]
        ray *= sf.col_scale
        sol = _empty(p, sf, UNBOUNDED, pivots)
        sol.ray = ray[: sf.n_struct]
        return sol
    x_full = np.zeros(N)
    x_full[bas] = T[:-1, -1]
    x_full *= sf.col_scale
    x_full[np.abs(x_full) <= tol.feas] = 0.0
    x_full = np.maximum(x_full, 0.0)
    rc = -T[-1, :-1] / sf.col_scale
    rc[bas] = 0.0
    z = float((sf.c / sf.col_scale) @ x_full)
    objective = (z if p.direction == "min" else -z) + 0.0
    return LpSolution(
        status=OPTIMAL,
        objective=objective,
        x=x_full[: sf.n_struct].copy(),
        x_full=x_full,
        basis=tuple(int(j) for j in bas),
        reduced_costs=rc,
        iterations=pivots,
        rows=kept,
        warm=start is not None,
    )


def _empty(p, sf, status, pivots):
    N = sf.A.shape[1]
    obj = np.nan
    if status == UNBOUNDED:
        obj = -np.inf if p.direction == "min" else np.inf
    return LpSolution(status, obj, np.full(sf.n_struct, np.nan), np.full(N, np.nan), (), np.full(N, np.nan), pivots, ())


def reoptimize_with_new_objective(sol: LpSolution, p: LpProblem, c_new, tol: Tolerances = DEFAULT_TOL) -> LpSolution:
    """Re-price the optimal basis of ``sol`` with objective ``c_new`` and continue phase 2."""
    c_new = np.asarray(c_new, dtype=float).reshape(-1)
    if c_new.shape != p.c.shape:
        raise ValueError(f"c_new must have shape {p.c.shape}, got {c_new.shape}")
    if not sol.optimal:
        raise ValueError("reoptimize_with_new_objective needs an optimal starting solution")
    return solve(replace(p, c=c_new), tol, basis=sol.basis, rows=sol.rows)


def residual(p: LpProblem, x) -> float:
    """Largest violation of ``p``'s rows and sign constraints at ``x``."""
    x = np.asarray(x, dtype=float)
    ax = p.A @ x
    worst = max(0.0, float(-x.min())) if x.size else 0.0
    for value, rhs, s in zip(ax, p.b, p.senses):
        if s == LE:
            worst = max(worst, value - rhs)
        elif s == GE:
            worst = max(worst, rhs - value)
        else:
            worst = max(worst, abs(value - rhs))
    return worst
