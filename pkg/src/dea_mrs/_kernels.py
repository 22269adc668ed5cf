"""Dense tableau simplex kernels.

Two interchangeable implementations of the same pivoting loop are kept here:
a numba ``@njit`` version and a plain numpy version. Which one
:func:`simplex_loop` dispatches to is decided once at import time from the
``DEA_MRS_JIT`` environment variable (``0``/``false``/``off`` disables numba).
If numba cannot be imported the numpy path is used regardless.

Tableau layout (``T`` has shape ``(rows + 1, cols + 1)``)::

    T[:-1, :-1]   B^-1 A
    T[:-1, -1]    B^-1 b        (current basic values)
    T[-1, :-1]    reduced costs c_j - c_B B^-1 a_j of the minimization form
    T[-1, -1]     -z            (negated objective)

Pivot selection is Bland's rule in both entering and leaving choices; the
leaving choice only departs from it when the Bland row's pivot is tiny
relative to the column (see :func:`simplex_loop_numpy`).
"""

import os
from contextlib import contextmanager

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

_FLAG = os.environ.get("DEA_MRS_JIT", "1").strip().lower()

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in {"0", "false", "off", "no"}


def _pivot_numpy(T, row, col):
    T[row, :] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row, :])


def simplex_loop_numpy(T, basis, tol_rc, tol_piv, max_iter, delta=1e-9, rel_piv=1e-7):
    """Run pivots on ``T`` in place until optimal or unbounded.

    Entering column: lowest index with negative reduced cost (Bland). Leaving
    row: lowest basic index among exact minimum-ratio ties (Bland), provided
    its pivot is at least ``rel_piv`` times the column's largest positive
    entry. Otherwise the ratio test is relaxed by ``delta`` and the largest
    pivot within the relaxed bound is taken.

    Returns ``(status, pivots, entering)`` where ``entering`` is the column
    that proved unboundedness (``-1`` otherwise).
    """
    nrow = T.shape[0] - 1
    it = 0
    while True:
        cand = np.flatnonzero(T[-1, :-1] < -tol_rc)
        if cand.size == 0:
            return OPTIMAL, it, -1
        if it >= max_iter:
            return ITERATION_LIMIT, it, -1
        col = cand[0]
        column = T[:nrow, col]
        eligible = column > tol_piv
        if not eligible.any():
            return UNBOUNDED, it, col
        rhs = np.maximum(T[:nrow, -1], 0.0)
        ratios = np.full(nrow, np.inf)
        ratios[eligible] = rhs[eligible] / column[eligible]
        best = ratios.min()
        big = column >= rel_piv * column[eligible].max()
        ties = np.flatnonzero((ratios <= best + 1e-12 * max(1.0, abs(best))) & big)
        if ties.size:
            row = ties[np.argmin(basis[ties])]
        else:
            bound = ((rhs + delta) / np.where(eligible, column, 1.0))[eligible].min()
            ok = np.flatnonzero(eligible & big & (ratios <= bound))
            if ok.size:
                top = column[ok].max()
                ok = ok[column[ok] >= top]
                row = ok[np.argmin(basis[ok])]
            else:
                ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
                row = ties[np.argmin(basis[ties])]
        _pivot_numpy(T, row, col)
        basis[row] = col
        it += 1


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _pivot_jit(T, row, col):
        nr, nc = T.shape
        p = T[row, col]
        for k in range(nc):
            T[row, k] /= p
        for i in range(nr):
            if i == row:
                continue
            f = T[i, col]
            if f != 0.0:
                for k in range(nc):
                    T[i, k] -= f * T[row, k]

    @numba.njit(cache=True)
    def simplex_loop_numba(T, basis, tol_rc, tol_piv, max_iter, delta=1e-9, rel_piv=1e-7):
        nrow = T.shape[0] - 1
        ncol = T.shape[1] - 1
        it = 0
        while True:
            col = -1
            for j in range(ncol):
                if T[nrow, j] < -tol_rc:
                    col = j
                    break
            if col < 0:
                return OPTIMAL, it, -1
            if it >= max_iter:
                return ITERATION_LIMIT, it, -1
            best = np.inf
            bound = np.inf
            amax = 0.0
            for i in range(nrow):
                a = T[i, col]
                if a > tol_piv:
                    rhs = max(T[i, ncol], 0.0)
                    best = min(best, rhs / a)
                    bound = min(bound, (rhs + delta) / a)
                    amax = max(amax, a)
            if best == np.inf:
                return UNBOUNDED, it, col
            tie = best + 1e-12 * max(1.0, abs(best))
            floor = rel_piv * amax
            row = -1
            for i in range(nrow):
                a = T[i, col]
                if a > tol_piv and a >= floor and max(T[i, ncol], 0.0) / a <= tie:
                    if row < 0 or basis[i] < basis[row]:
                        row = i
            if row < 0:
                for i in range(nrow):
                    a = T[i, col]
                    if a > tol_piv and a >= floor and max(T[i, ncol], 0.0) / a <= bound:
                        if row < 0 or a > T[row, col] or (a == T[row, col] and basis[i] < basis[row]):
                            row = i
            if row < 0:
                for i in range(nrow):
                    a = T[i, col]
                    if a > tol_piv and max(T[i, ncol], 0.0) / a <= tie:
                        if row < 0 or basis[i] < basis[row]:
                            row = i
            _pivot_jit(T, row, col)
            basis[row] = col
            it += 1

    def pivot_numba(T, row, col):
        _pivot_jit(T, row, col)

else:  # pragma: no cover
    simplex_loop_numba = None
    pivot_numba = None


def simplex_loop(T, basis, tol_rc, tol_piv, max_iter, delta=1e-9):
    """Dispatch to the active backend; arguments as in :func:`simplex_loop_numpy`."""
    if USE_NUMBA:
        status, it, col = simplex_loop_numba(T, basis, tol_rc, tol_piv, max_iter, delta)
        return int(status), int(it), int(col)
    return simplex_loop_numpy(T, basis, tol_rc, tol_piv, max_iter, delta)


def pivot(T, row, col):
    if USE_NUMBA:
        pivot_numba(T, row, col)
    else:
        _pivot_numpy(T, row, col)


def backend():
    return "numba" if USE_NUMBA else "numpy"


@contextmanager
def use_backend(name):
    """Temporarily force ``"numba"`` or ``"numpy"`` (tests and benchmarks)."""
    global USE_NUMBA
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    saved = USE_NUMBA
    USE_NUMBA = name == "numba"
    try:
        yield
    finally:
        USE_NUMBA = saved
