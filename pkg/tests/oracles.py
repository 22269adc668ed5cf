"""Reference computations that share no code with the package solvers.

* ``vertex_optimum``: exact rational vertex enumeration for tiny LPs.
* ``frontier_theta_1d``: the single-input single-output VRS frontier lookup.
* ``highs_*``: the same models solved with scipy's HiGHS.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog


def _solve_exact(rows, rhs):
    """Gauss-Jordan on Fractions; ``None`` if singular."""
    n = len(rows)
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [v / p for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def vertex_optimum(c, A, b, senses, direction="max"):
    """Best vertex of ``{x >= 0 : A x (senses) b}`` in exact arithmetic.

    Returns ``(value, x)`` as Fractions, or ``None`` when no vertex is
    feasible. Assumes the optimum is attained (bounded problems only).
    """
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    n = len(c)
    # a vertex is pinned down by n independent tight constraints among the rows and the bounds x_k = 0
    cands = [("row", i) for i in range(len(b))] + [("lb", k) for k in range(n)]
    best = None
    for pick in combinations(cands, n):
        rows, rhs = [], []
        for kind, i in pick:
            if kind == "row":
                rows.append(A[i])
                rhs.append(b[i])
            else:
                e = [Fraction(0)] * n
                e[i] = Fraction(1)
                rows.append(e)
                rhs.append(Fraction(0))
        x = _solve_exact(rows, rhs)
        if x is None or any(v < 0 for v in x):
            continue
        ok = True
        for i, s in enumerate(senses):
            lhs = sum(a * v for a, v in zip(A[i], x))
            if (s == "<=" and lhs > b[i]) or (s == ">=" and lhs < b[i]) or (s == "=" and lhs != b[i]):
                ok = False
                break
        if not ok:
            continue
        val = sum(a * v for a, v in zip(c, x))
        if best is None or (val > best[0] if direction == "max" else val < best[0]):
            best = (val, x)
    return best


def frontier_theta_1d(x, y, o):
    """Input-oriented VRS score for one input and one output.

    The envelopment LP has two rows (convexity and output), so an optimal
    vertex mixes at most two DMUs. Enumerating singles and pairs is exact.
    """
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    yo = y[o]
    best = None
    n = len(x)
    for j in range(n):
        if y[j] >= yo:
            best = x[j] if best is None else min(best, x[j])
    for i in range(n):
        for j in range(n):
            if y[i] < yo < y[j]:
                a = (y[j] - yo) / (y[j] - y[i])
                v = a * x[i] + (1 - a) * x[j]
                best = v if best is None else min(best, v)
    return best / x[o]


def face_max_weights_exact(x, y, o, theta):
    """``max lam_j`` over the optimal envelopment face, exactly, for m = s = 1."""
    n = len(x)
    A = [[1] * n, list(x), list(y)]
    b = [1, Fraction(theta) * Fraction(x[o]), y[o]]
    senses = ["=", "<=", ">="]
    out = []
    for j in range(n):
        c = [0] * n
        c[j] = 1
        out.append(vertex_optimum(c, A, b, senses)[0])
    return out


def highs_theta(X, Y, o):
    n = X.shape[0]
    c = np.r_[1.0, np.zeros(n)]
    A_ub = np.vstack([np.c_[-X[o][:, None], X.T], np.c_[np.zeros((Y.shape[1], 1)), -Y.T]])
    b_ub = np.r_[np.zeros(X.shape[1]), -Y[o]]
    A_eq = np.r_[0.0, np.ones(n)][None, :]
    r = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=[(None, None)] + [(0, None)] * n, method="highs")
    assert r.status == 0
    return r.fun


def highs_mrs(X, Y, o, theta=None, pos=1e-7, slack=1e-9):
    """Members by ``max lam_j`` over the optimal face, solved with HiGHS.

    The face is taken at ``theta`` exactly; only if HiGHS finds that empty is
    the input level loosened by the relative ``slack``. Loosening first would
    let near-face DMUs pick up weights of order ``slack / gap``.
    """
    if theta is None:
        theta = highs_theta(X, Y, o)
    n = X.shape[0]
    A_ub = np.vstack([X.T, -Y.T])
    opts = {"primal_feasibility_tolerance": 1e-10}
    members = set()
    for j in range(n):
        c = np.zeros(n)
        c[j] = -1.0
        for loosen in (0.0, slack):
            b_ub = np.r_[theta * X[o] * (1 + loosen), -Y[o]]
            r = linprog(
                c, A_ub=A_ub, b_ub=b_ub, A_eq=np.ones((1, n)), b_eq=[1.0],
                bounds=[(0, None)] * n, method="highs", options=opts,
            )
            if r.status == 0:
                break
        assert r.status == 0
        if -r.fun > pos:
            members.add(j)
    return frozenset(members)


def highs_lp(c, A, b, senses, direction="max"):
    """``(status, objective)`` with status in {optimal, infeasible, unbounded}."""
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    ub = [i for i, s in enumerate(senses) if s == "<="]
    lb = [i for i, s in enumerate(senses) if s == ">="]
    eq = [i for i, s in enumerate(senses) if s == "="]
    A_ub = np.vstack([A[ub], -A[lb]]) if ub or lb else None
    b_ub = np.r_[b[ub], -b[lb]] if ub or lb else None
    sign = -1.0 if direction == "max" else 1.0
    r = linprog(
        sign * c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A[eq] if eq else None,
        b_eq=b[eq] if eq else None,
        bounds=[(0, None)] * len(c),
        method="highs",
    )
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[r.status]
    return status, (sign * r.fun if r.status == 0 else None)
