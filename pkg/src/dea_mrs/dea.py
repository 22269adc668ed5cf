"""DEA models under variable returns to scale.

* BCC envelopment (input oriented): ``min theta`` with
  ``sum_j lam_j x_j <= theta x_o``, ``sum_j lam_j y_j >= y_o``, ``sum lam = 1``.
* Second phase: with ``theta`` fixed, maximize the total input excess plus
  output shortfall.
* BCC multiplier form: ``max U.y_o + u_o`` with ``V.x_o = 1`` and
  ``U.y_j - V.x_j + u_o + t_j = 0`` for every DMU.
* Weighted additive model: ``max w_in.s_in + w_out.s_out`` over the same
  technology with ``(x_o, y_o)`` kept fixed. Unit weights give the additive
  model; ``1 / ((m + s) * range)`` weights give RAM, where the range of a
  factor is its max minus min over all DMUs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import lp
from .dataset import Dataset
from .errors import ConfigurationError, SolverError
from .lp import DEFAULT_TOL, EQ, GE, LE, LpProblem, LpSolution, Tolerances

BCC_EFFICIENT = "bcc_efficient"
RADIAL_ONLY = "radial_efficient_only"
INEFFICIENT = "inefficient"


@dataclass
class RadialResult:
    dmu_index: int
    theta_star: float
    lam: np.ndarray
    slacks_in: np.ndarray
    slacks_out: np.ndarray
    classification: str
    # basic optimal solution of the envelopment LP (variables: theta, lam_1..lam_n)
    envelopment: Optional[LpSolution] = field(default=None, repr=False)

    @property
    def radial_efficient(self) -> bool:
        return self.classification != INEFFICIENT


@dataclass
class MultiplierSolution:
    dmu_index: int
    V: np.ndarray
    U: np.ndarray
    u_o: float
    t: np.ndarray
    objective: float

    def gaps(self, ds: Dataset) -> np.ndarray:
        """``U.y_j - V.x_j + u_o`` for every DMU (zero on the hyperplane, negative below)."""
        return ds.Y @ self.U - ds.X @ self.V + self.u_o


@dataclass
class AdditiveResult:
    dmu_index: int
    sigma_star: float
    lam: np.ndarray
    slacks_in: np.ndarray
    slacks_out: np.ndarray
    weights_in: np.ndarray
    weights_out: np.ndarray

    @property
    def weights(self):
        return self.weights_in, self.weights_out


def _check_index(ds: Dataset, o: int) -> None:
    if not 0 <= o < ds.n:
        raise IndexError(f"DMU index {o} out of range for n={ds.n}")


def fixed_level(value: float, tol: Tolerances, relax: bool, upward: bool) -> float:
    """``value`` nudged by the relative objective tolerance in the permissive direction."""
    if not relax:
        return value
    delta = tol.obj * max(1.0, abs(value))
    return value + delta if upward else value - delta


def envelopment_lp(ds: Dataset, o: int, cols: Optional[Sequence[int]] = None) -> LpProblem:
    """``min theta`` over variables ``(theta, lam_cols...)``."""
    cols = np.arange(ds.n) if cols is None else np.asarray(cols, dtype=int)
    X, Y = ds.X[cols].T, ds.Y[cols].T
    k = cols.size
    A = np.zeros((ds.m + ds.s + 1, k + 1))
    A[: ds.m, 0] = -ds.X[o]
    A[: ds.m, 1:] = X
    A[ds.m : ds.m + ds.s, 1:] = Y
    A[-1, 1:] = 1.0
    b = np.concatenate([np.zeros(ds.m), ds.Y[o], [1.0]])
    c = np.zeros(k + 1)
    c[0] = 1.0
    return LpProblem(c, A, b, (LE,) * ds.m + (GE,) * ds.s + (EQ,), "min")


def technology_rows(ds: Dataset, x_level, y_level, cols=None, equality=False):
    """Rows ``sum lam x <= x_level``, ``sum lam y >= y_level``, ``sum lam = 1`` over ``cols``."""
    cols = np.arange(ds.n) if cols is None else np.asarray(cols, dtype=int)
    A = np.vstack([ds.X[cols].T, ds.Y[cols].T, np.ones((1, cols.size))])
    b = np.concatenate([np.asarray(x_level, float), np.asarray(y_level, float), [1.0]])
    if equality:
        senses = (EQ,) * (ds.m + ds.s + 1)
    else:
        senses = (LE,) * ds.m + (GE,) * ds.s + (EQ,)
    return A, b, senses


def _radial(theta: float, tol: Tolerances) -> bool:
    return theta >= 1.0 - tol.pos


def slack_phase(ds: Dataset, o: int, theta_star: float, tol: Tolerances = DEFAULT_TOL):
    """Maximize total slack with ``theta`` fixed; returns ``(lam, s_in, s_out)``."""
    m, s, n = ds.m, ds.s, ds.n
    for relax in (False, True):
        A = np.zeros((m + s + 1, n + m + s))
        A[:m, :n] = ds.X.T
        A[:m, n : n + m] = np.eye(m)
        A[m : m + s, :n] = ds.Y.T
        A[m : m + s, n + m :] = -np.eye(s)
        A[-1, :n] = 1.0
        level = fixed_level(theta_star, tol, relax, upward=True)
        b = np.concatenate([level * ds.X[o], ds.Y[o], [1.0]])
        c = np.concatenate([np.zeros(n), np.ones(m + s)])
        sol = lp.solve(LpProblem(c, A, b, (EQ,) * (m + s + 1), "max"), tol)
        if sol.optimal:
            x = sol.x
            return x[:n], x[n : n + m], x[n + m :]
    raise SolverError(f"second-phase slack LP failed for DMU index {o} ({sol.status})")


def bcc_evaluate(ds: Dataset, o: int, tol: Tolerances = DEFAULT_TOL) -> RadialResult:
    """Input-oriented BCC score plus second-phase slacks and classification."""
    _check_index(ds, o)
    sol = lp.solve(envelopment_lp(ds, o), tol)
    if not sol.optimal:
        # lam_o = 1, theta = 1 is always feasible and theta >= 0 bounds the objective
        raise SolverError(f"envelopment LP for DMU index {o} returned {sol.status}")
    theta = float(sol.x[0])
    lam, s_in, s_out = slack_phase(ds, o, theta, tol)
    if not _radial(theta, tol):
        cls = INEFFICIENT
    elif max(s_in.max(initial=0.0), s_out.max(initial=0.0)) <= tol.pos:
        cls = BCC_EFFICIENT
    else:
        cls = RADIAL_ONLY
    return RadialResult(o, theta, lam, s_in, s_out, cls, sol)


def multiplier_lp(ds: Dataset, o: int) -> LpProblem:
    """Variables ``(V_1..V_m, U_1..U_s, u+, u-, t_1..t_n)``; ``u_o = u+ - u-``."""
    m, s, n = ds.m, ds.s, ds.n
    nv = m + s + 2 + n
    A = np.zeros((1 + n, nv))
    A[0, :m] = ds.X[o]
    A[1:, :m] = -ds.X
    A[1:, m : m + s] = ds.Y
    A[1:, m + s] = 1.0
    A[1:, m + s + 1] = -1.0
    A[1:, m + s + 2 :] = np.eye(n)
    b = np.zeros(1 + n)
    b[0] = 1.0
    c = np.zeros(nv)
    c[m : m + s] = ds.Y[o]
    c[m + s] = 1.0
    c[m + s + 1] = -1.0
    return LpProblem(c, A, b, (EQ,) * (1 + n), "max")


def unpack_multiplier(ds: Dataset, o: int, x) -> MultiplierSolution:
    m, s, n = ds.m, ds.s, ds.n
    V = np.array(x[:m])
    U = np.array(x[m : m + s])
    u_o = float(x[m + s] - x[m + s + 1])
    t = ds.X @ V - ds.Y @ U - u_o
    objective = float(U @ ds.Y[o] + u_o)
    return MultiplierSolution(o, V, U, u_o, t, objective)


def multiplier_evaluate(ds: Dataset, o: int, tol: Tolerances = DEFAULT_TOL) -> MultiplierSolution:
    _check_index(ds, o)
    sol = lp.solve(multiplier_lp(ds, o), tol)
    if not sol.optimal:
        raise SolverError(f"multiplier LP for DMU index {o} returned {sol.status}")
    res = unpack_multiplier(ds, o, sol.x)
    res.t = np.maximum(np.array(sol.x[ds.m + ds.s + 2 :]), 0.0)
    return res


def ram_weights(ds: Dataset):
    """Range-adjusted slack weights ``1 / ((m + s) * range)``."""
    r_in = ds.X.max(axis=0) - ds.X.min(axis=0)
    r_out = ds.Y.max(axis=0) - ds.Y.min(axis=0)
    bad = [f"input {lb!r}" for lb, r in zip(ds.input_labels, r_in) if r <= 0]
    bad += [f"output {lb!r}" for lb, r in zip(ds.output_labels, r_out) if r <= 0]
    if bad:
        raise ConfigurationError("RAM weight undefined, zero range on " + ", ".join(bad))
    k = ds.m + ds.s
    return 1.0 / (k * r_in), 1.0 / (k * r_out)


def additive_lp(ds: Dataset, o: int, w_in, w_out) -> LpProblem:
    """Variables ``(lam_1..lam_n, s_in_1..s_in_m, s_out_1..s_out_s)``."""
    m, s, n = ds.m, ds.s, ds.n
    A = np.zeros((m + s + 1, n + m + s))
    A[:m, :n] = ds.X.T
    A[:m, n : n + m] = np.eye(m)
    A[m : m + s, :n] = ds.Y.T
    A[m : m + s, n + m :] = -np.eye(s)
    A[-1, :n] = 1.0
    b = np.concatenate([ds.X[o], ds.Y[o], [1.0]])
    c = np.concatenate([np.zeros(n), w_in, w_out])
    return LpProblem(c, A, b, (EQ,) * (m + s + 1), "max")


def additive_evaluate(ds: Dataset, o: int, tol: Tolerances = DEFAULT_TOL, weights=None) -> AdditiveResult:
    """Weighted additive model; unit weights by default."""
    _check_index(ds, o)
    if weights is None:
        w_in, w_out = np.ones(ds.m), np.ones(ds.s)
    else:
        w_in, w_out = (np.asarray(w, dtype=float) for w in weights)
    sol = lp.solve(additive_lp(ds, o, w_in, w_out), tol)
    if not sol.optimal:
        raise SolverError(f"additive LP for DMU index {o} returned {sol.status}")
    n, m = ds.n, ds.m
    x = sol.x
    return AdditiveResult(o, float(sol.objective), x[:n], x[n : n + m], x[n + m :], w_in, w_out)


def ram_evaluate(ds: Dataset, o: int, tol: Tolerances = DEFAULT_TOL) -> AdditiveResult:
    return additive_evaluate(ds, o, tol, weights=ram_weights(ds))


def evaluate_all(ds: Dataset, tol: Tolerances = DEFAULT_TOL) -> list:
    return [bcc_evaluate(ds, o, tol) for o in range(ds.n)]
