"""Maximal reference sets.

A DMU ``j`` is in the maximal reference set of ``o`` iff some optimal
intensity vector of the envelopment LP gives it positive weight. The optimal
set is convex, so this equals the support of any optimal solution of maximal
support. Four routes compute it:

``primal_milp``
    maximize the number of positive intensities over the optimal face using
    indicators ``I_j <= M lam_j``;
``lp_procedure``
    the reduced-cost driven sequence of LPs that grows ``R`` (confirmed),
    ``S`` (excluded) and shrinks ``T`` (undecided);
``dual_milp``
    maximize the number of DMUs strictly below an optimal supporting
    hyperplane, ``I_j <= M t_j``; members are the DMUs left on it;
``oracle``
    one LP per DMU, ``max lam_j`` over the optimal face.

Non-radial variants cover the weighted additive/RAM optimal face and the face
through a single supplied projection point. All routes share the positivity
threshold ``tol.pos``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import dea, lp
from .dataset import Dataset
from .errors import NotInTechnology, SolverError
from .lp import DEFAULT_TOL, EQ, GE, LE, LpProblem, Tolerances
from .milp import DEFAULT_BIG_M, MilpProblem, solve_milp

PRIMAL_MILP = "primal_milp"
LP_PROCEDURE = "lp_procedure"
DUAL_MILP = "dual_milp"
ADDITIVE_MILP = "additive_milp"
PROJECTION_MILP = "projection_milp"
ORACLE = "oracle"

BCC_METHODS = (PRIMAL_MILP, LP_PROCEDURE, DUAL_MILP, ORACLE)


@dataclass(frozen=True)
class ProcedureState:
    R: frozenset
    S: frozenset
    T: frozenset
    step: int
    gamma: Optional[float] = None


@dataclass
class MrsResult:
    dmu_index: int
    members: frozenset
    method: str
    witness: dict
    iterations: int = 0
    objective: Optional[float] = None
    verified: bool = True
    notes: list = field(default_factory=list)
    history: list = field(default_factory=list)

    def names(self, ds: Dataset) -> list:
        return [ds.dmus[j].name for j in sorted(self.members)]


@dataclass(frozen=True)
class _Face:
    """Rows over ``(lam_1..lam_n, aux_1..aux_k)`` describing an optimal face."""

    A: np.ndarray
    b: np.ndarray
    senses: tuple
    n: int

    @property
    def width(self) -> int:
        return self.A.shape[1]

    def columns(self, keep_lam) -> "_Face":
        cols = list(keep_lam) + list(range(self.n, self.width))
        return _Face(self.A[:, cols], self.b, self.senses, len(keep_lam))


def _bcc_face(ds: Dataset, o: int, theta_star: float, tol: Tolerances, relax: bool) -> _Face:
    level = dea.fixed_level(theta_star, tol, relax, upward=True)
    A, b, senses = dea.technology_rows(ds, level * ds.X[o], ds.Y[o])
    return _Face(A, b, senses, ds.n)


def _additive_face(ds, o, sigma_star, w_in, w_out, tol, relax) -> _Face:
    m, s, n = ds.m, ds.s, ds.n
    p = dea.additive_lp(ds, o, w_in, w_out)
    level = dea.fixed_level(sigma_star, tol, relax, upward=False)
    row = np.concatenate([np.zeros(n), w_in, w_out])
    A = np.vstack([p.A, row])
    b = np.concatenate([p.b, [level]])
    return _Face(A, b, p.senses + ((GE if relax else EQ),), n)


def _projection_face(ds, o, theta, phi) -> _Face:
    A, b, senses = dea.technology_rows(ds, np.asarray(theta) * ds.X[o], np.asarray(phi) * ds.Y[o], equality=True)
    return _Face(A, b, senses, ds.n)


def _relaxed(build, attempt):
    """Run ``attempt(build(relax))`` with the exact level first, then the relaxed one."""
    last = None
    for relax in (False, True):
        out = attempt(build(relax))
        if out is not None:
            return out, relax
        last = relax
    return None, last


# -- primal routes ---------------------------------------------------------


def _face_milp(face: _Face, tol: Tolerances, big_M: float):
    n, w = face.n, face.width
    links = np.zeros((n, w + n))
    links[:, :n] = -big_M * np.eye(n)
    links[:, w:] = np.eye(n)
    A = np.vstack([np.hstack([face.A, np.zeros((face.A.shape[0], n))]), links])
    b = np.concatenate([face.b, np.zeros(n)])
    c = np.concatenate([np.zeros(w), np.ones(n)])
    base = LpProblem(c, A, b, face.senses + (LE,) * n, "max")
    prob = MilpProblem(base, tuple(range(w, w + n)), big_M, links={w + j: j for j in range(n)})
    sol = solve_milp(prob, tol)
    if not sol.optimal:
        return None
    return sol


def _polish_primal(face: _Face, members, tol: Tolerances):
    """Optimal-face point maximizing ``min lam_j`` over ``members``; zero elsewhere."""
    mem = sorted(members)
    sub = face.columns(mem)
    k = len(mem)
    width = sub.width
    A = np.hstack([sub.A, np.zeros((sub.A.shape[0], 1))])
    lower = np.zeros((k + 1, width + 1))
    lower[:k, :k] = np.eye(k)
    lower[:k, -1] = -1.0
    lower[k, -1] = 1.0
    A = np.vstack([A, lower])
    b = np.concatenate([sub.b, np.zeros(k), [1.0]])
    c = np.zeros(width + 1)
    c[-1] = 1.0
    sol = lp.solve(LpProblem(c, A, b, sub.senses + (GE,) * k + (LE,), "max"), tol)
    if not sol.optimal:
        return None, 0.0
    lam = np.zeros(face.n)
    lam[mem] = sol.x[:k]
    return lam, float(sol.x[-1])


def _primal_result(ds, o, method, face, members, tol, big_M=None, **extra) -> MrsResult:
    """Polish ``members`` into a clean witness and keep those it leaves above ``tol.pos``.

    For a MILP route ``members`` are the indicated DMUs. The polished point
    uses the same indicators with a margin no smaller than the MILP's own, so
    it is an optimal MILP solution too.
    """
    lam, tau = _polish_primal(face, members, tol) if members else (None, 0.0)
    if lam is None:
        res = MrsResult(o, frozenset(members), method, {}, **extra)
        res.verified = False
        res.notes.append("support verification LP is infeasible for the indicated members")
        res.witness = {"lambda": np.full(ds.n, np.nan), "min_member_weight": 0.0}
        return res
    kept = frozenset(j for j in members if lam[j] > tol.pos)
    res = MrsResult(o, kept, method, {"lambda": lam, "min_member_weight": tau}, **extra)
    if kept != frozenset(members):
        res.notes.append(
            f"big-M suspect: indicated {sorted(members)} but only {sorted(kept)} can be kept above eps_pos"
        )
    elif big_M is not None and tau < 10.0 / big_M:
        res.notes.append(f"big-M suspect: best smallest member weight {tau:.3g} is below 10/big_M")
    return res


def _milp_route(ds, o, method, build, tol, big_M, errmsg) -> MrsResult:
    sol, relax = _relaxed(build, lambda face: _face_milp(face, tol, big_M))
    if sol is None:
        raise SolverError(errmsg)
    face = build(relax)
    indicated = {j for j in range(ds.n) if sol.x[face.width + j] > 0.5}
    return _primal_result(ds, o, method, face, indicated, tol, big_M, objective=float(round(sol.objective)))


def mrs_primal_milp(
    ds: Dataset, o: int, theta_star: float, tol: Tolerances = DEFAULT_TOL, big_M: float = DEFAULT_BIG_M
) -> MrsResult:
    """Maximal reference set as the support of a count-maximizing optimal intensity vector."""
    return _milp_route(
        ds,
        o,
        PRIMAL_MILP,
        lambda relax: _bcc_face(ds, o, theta_star, tol, relax),
        tol,
        big_M,
        f"primal MRS MILP infeasible for DMU index {o}: theta_star={theta_star!r} is not attainable",
    )


def mrs_additive_milp(
    ds: Dataset,
    o: int,
    sigma_star: float,
    weights=None,
    tol: Tolerances = DEFAULT_TOL,
    big_M: float = DEFAULT_BIG_M,
) -> MrsResult:
    """Reference DMUs over every optimal projection of a weighted additive model.

    ``weights`` is ``(w_in, w_out)``; ``None`` means unit weights (the additive
    model). Pass :func:`dea.ram_weights` for RAM.
    """
    if weights is None:
        w_in, w_out = np.ones(ds.m), np.ones(ds.s)
    else:
        w_in, w_out = (np.asarray(w, dtype=float) for w in weights)
    return _milp_route(
        ds,
        o,
        ADDITIVE_MILP,
        lambda relax: _additive_face(ds, o, sigma_star, w_in, w_out, tol, relax),
        tol,
        big_M,
        f"additive MRS MILP infeasible for DMU index {o}: sigma_star={sigma_star!r} is not attainable",
    )


def mrs_for_projection(
    ds: Dataset, o: int, theta, phi, tol: Tolerances = DEFAULT_TOL, big_M: float = DEFAULT_BIG_M
) -> MrsResult:
    """Reference DMUs of the single point ``(theta * x_o, phi * y_o)``.

    Results for several optimal projections are combined by the caller with a
    set union.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if theta.shape != (ds.m,) or phi.shape != (ds.s,):
        raise ValueError(f"theta needs {ds.m} entries and phi {ds.s}")
    face = _projection_face(ds, o, theta, phi)
    sol = _face_milp(face, tol, big_M)
    if sol is None:
        raise NotInTechnology(f"point not in technology: projection of DMU index {o} is not attainable")
    indicated = {j for j in range(ds.n) if sol.x[face.width + j] > 0.5}
    return _primal_result(ds, o, PROJECTION_MILP, face, indicated, tol, big_M, objective=float(round(sol.objective)))


def _check_theta(sol, theta_star, tol, o):
    theta = float(sol.x[0])
    if abs(theta - theta_star) > 1e-6 * max(1.0, abs(theta_star)):
        raise SolverError(f"theta_star={theta_star!r} does not match the envelopment optimum {theta!r} for DMU {o}")


def _reprice(ds, o, keep, sol7, theta_star, tol):
    """Reduced costs of the envelopment LP (restricted to ``keep``) at the basis of the face LP.

    The face LP fixes theta, so its basis lacks the theta column; theta is
    swapped in for a zero-valued basic variable (a degenerate exchange) and
    phase 2 of ``min theta`` continues from there.
    """
    p3 = dea.envelopment_lp(ds, o, keep)
    shifted = [j + 1 for j in sol7.basis]
    values = sol7.x_full
    zero_pos = sorted((j, i) for i, j in enumerate(sol7.basis) if values[j] <= tol.pos)
    sol = None
    for _, i in zero_pos:
        cand = list(shifted)
        cand[i] = 0
        trial = lp.solve(p3, tol, basis=cand, rows=sol7.rows)
        if trial.warm and trial.optimal:
            sol = trial
            break
    if sol is None:
        sol = lp.solve(p3, tol)
    if not sol.optimal or abs(sol.x[0] - theta_star) > 1e-6 * max(1.0, theta_star):
        return None
    return dict(zip(keep, sol.reduced_costs[1 : len(keep) + 1]))


def mrs_lp_procedure(ds: Dataset, o: int, theta_star: float, tol: Tolerances = DEFAULT_TOL) -> MrsResult:
    """LP-only computation of the maximal reference set driven by reduced costs."""
    n = ds.n
    sol3 = lp.solve(dea.envelopment_lp(ds, o), tol)
    if not sol3.optimal:
        raise SolverError(f"envelopment LP for DMU index {o} returned {sol3.status}")
    _check_theta(sol3, theta_star, tol, o)
    lam = sol3.x[1:]
    rc = sol3.reduced_costs[1 : n + 1]
    basic = set(sol3.basis)
    is_basic = [j + 1 in basic for j in range(n)]

    R = frozenset(j for j in range(n) if lam[j] > tol.pos)
    if all(lam[j] > tol.pos for j in range(n) if is_basic[j]) and all(
        rc[j] < -tol.rc for j in range(n) if not is_basic[j]
    ):
        state = ProcedureState(R, frozenset(set(range(n)) - R), frozenset(), 0)
        res = _primal_result(ds, o, LP_PROCEDURE, _bcc_face(ds, o, theta_star, tol, True), R, tol, iterations=0)
        res.history = [state]
        res.notes.append("unique optimum: all non-basic intensities have negative reduced cost")
        return res

    S = frozenset(j for j in range(n) if not is_basic[j] and rc[j] < -tol.rc)
    T = frozenset(set(range(n)) - R - S)
    history = [ProcedureState(R, S, T, 0)]
    step = 0
    while T:
        step += 1
        keep = sorted(set(range(n)) - S)
        in_T = [j in T for j in keep]

        def attempt(face):
            c = np.concatenate([np.array(in_T, dtype=float), np.zeros(face.width - face.n)])
            s7 = lp.solve(LpProblem(c, face.A, face.b, face.senses, "max"), tol)
            return s7 if s7.optimal else None

        sol7, relax = _relaxed(lambda r: _bcc_face(ds, o, theta_star, tol, r).columns(keep), attempt)
        if sol7 is None:
            raise SolverError(f"restricted face LP infeasible for DMU index {o} at step {step}")
        gamma = float(sol7.objective)
        lam7 = dict(zip(keep, sol7.x))
        if gamma <= tol.pos:
            history.append(ProcedureState(R, S, T, step, gamma))
            break
        L = frozenset(j for j in T if lam7[j] > tol.pos)
        priced = _reprice(ds, o, keep, sol7, theta_star, tol) or {}
        K = frozenset(j for j in T - L if lam7[j] <= tol.pos and priced.get(j, 0.0) < -tol.rc)
        if not (L | K):
            raise SolverError(f"undecided set did not shrink at step {step} for DMU index {o} (gamma={gamma!r})")
        R, S, T = R | L, S | K, T - (L | K)
        history.append(ProcedureState(R, S, T, step, gamma))

    res = _primal_result(ds, o, LP_PROCEDURE, _bcc_face(ds, o, theta_star, tol, True), R, tol, iterations=step)
    res.history = history
    return res


def _face_oracle(ds, o, build, tol, errmsg) -> MrsResult:
    best = np.zeros(ds.n)
    points = []
    for j in range(ds.n):

        def attempt(face, j=j):
            c = np.zeros(face.width)
            c[j] = 1.0
            s = lp.solve(LpProblem(c, face.A, face.b, face.senses, "max"), tol)
            return s if s.optimal else None

        sol, _ = _relaxed(build, attempt)
        if sol is None:
            raise SolverError(errmsg)
        best[j] = sol.objective
        if sol.objective > tol.pos:
            points.append(sol.x[: ds.n])
    members = frozenset(j for j in range(ds.n) if best[j] > tol.pos)
    # the optimal face is convex, so the average of the per-DMU optima is a maximal-support witness
    lam = np.mean(points, axis=0) if points else np.full(ds.n, np.nan)
    res = MrsResult(o, members, ORACLE, {"lambda": lam, "max_weight": best})
    if not all(lam[j] > tol.pos for j in members):
        res.verified = False
        res.notes.append("averaged witness has a member at or below the positivity threshold")
    return res


def oracle_mrs(ds: Dataset, o: int, theta_star: float, tol: Tolerances = DEFAULT_TOL) -> MrsResult:
    """Independent check: ``max lam_j`` over the optimal face, one LP per DMU."""
    return _face_oracle(
        ds,
        o,
        lambda r: _bcc_face(ds, o, theta_star, tol, r),
        tol,
        f"optimal face empty for DMU index {o}: theta_star={theta_star!r}",
    )


def additive_oracle_mrs(
    ds: Dataset, o: int, sigma_star: float, weights=None, tol: Tolerances = DEFAULT_TOL
) -> MrsResult:
    """The same per-DMU check over the optimal face of a weighted additive model."""
    if weights is None:
        w_in, w_out = np.ones(ds.m), np.ones(ds.s)
    else:
        w_in, w_out = (np.asarray(w, dtype=float) for w in weights)
    return _face_oracle(
        ds,
        o,
        lambda r: _additive_face(ds, o, sigma_star, w_in, w_out, tol, r),
        tol,
        f"additive optimal face empty for DMU index {o}: sigma_star={sigma_star!r}",
    )


# -- dual route ------------------------------------------------------------


def _dual_rows(ds, o, theta_star, tol, relax):
    """Multiplier rows plus the objective-fixing row, variables ``(V, U, u+, u-, t)``."""
    p = dea.multiplier_lp(ds, o)
    level = dea.fixed_level(theta_star, tol, relax, upward=False)
    A = np.vstack([p.A, p.c])
    b = np.concatenate([p.b, [level]])
    return A, b, p.senses + ((GE if relax else EQ),)


def _polish_dual(ds, o, members, theta_star, tol, relax):
    """Optimal hyperplane through ``members`` maximizing the smallest gap elsewhere."""
    m, s, n = ds.m, ds.s, ds.n
    A, b, senses = _dual_rows(ds, o, theta_star, tol, relax)
    head = m + s + 2
    t_free = [j for j in range(n) if j not in members]
    cols = list(range(head)) + [head + j for j in t_free]
    A = np.hstack([A[:, cols], np.zeros((A.shape[0], 1))])
    k = len(t_free)
    extra = np.zeros((k + 1, A.shape[1]))
    extra[:k, head : head + k] = np.eye(k)
    extra[:k, -1] = -1.0
    extra[k, -1] = 1.0
    A = np.vstack([A, extra])
    b = np.concatenate([b, np.zeros(k), [1.0]])
    c = np.zeros(A.shape[1])
    c[-1] = 1.0
    sol = lp.solve(LpProblem(c, A, b, senses + (GE,) * k + (LE,), "max"), tol)
    if not sol.optimal:
        return None, 0.0
    return dea.unpack_multiplier(ds, o, sol.x[:head]), float(sol.x[-1])


def mrs_dual_milp(
    ds: Dataset, o: int, theta_star: float, tol: Tolerances = DEFAULT_TOL, big_M: float = DEFAULT_BIG_M
) -> MrsResult:
    """Members are the DMUs left on an optimal hyperplane that leaves as many as possible strictly below."""
    m, s, n = ds.m, ds.s, ds.n
    head = m + s + 2
    # a dual objective below the optimum is still dual feasible; the primal face catches that
    face = _bcc_face(ds, o, theta_star, tol, True)
    probe = lp.solve(LpProblem(np.zeros(face.width), face.A, face.b, face.senses, "max"), tol)
    if not probe.optimal:
        raise SolverError(f"theta_star={theta_star!r} is below the optimum for DMU index {o}")

    def attempt(rows):
        A, b, senses = rows
        w = A.shape[1]
        links = np.zeros((n, w + n))
        links[:, head:w] = -big_M * np.eye(n)
        links[:, w:] = np.eye(n)
        A2 = np.vstack([np.hstack([A, np.zeros((A.shape[0], n))]), links])
        b2 = np.concatenate([b, np.zeros(n)])
        c = np.concatenate([np.zeros(w), np.ones(n)])
        base = LpProblem(c, A2, b2, senses + (LE,) * n, "max")
        sol = solve_milp(MilpProblem(base, tuple(range(w, w + n)), big_M, links={w + j: head + j for j in range(n)}), tol)
        return (sol, w) if sol.optimal else None

    out, relax = _relaxed(lambda r: _dual_rows(ds, o, theta_star, tol, r), attempt)
    if out is None:
        raise SolverError(f"dual MRS MILP infeasible for DMU index {o}: theta_star={theta_star!r} is not attainable")
    sol, w_all = out
    separated = frozenset(j for j in range(n) if sol.x[w_all + j] > 0.5)
    hyper, tau = _polish_dual(ds, o, frozenset(range(n)) - separated, theta_star, tol, relax)
    if hyper is None:
        members = frozenset(range(n)) - separated
        res = MrsResult(o, members, DUAL_MILP, {}, objective=float(round(sol.objective)), verified=False)
        res.notes.append("hyperplane verification LP is infeasible for the indicated members")
        hyper = dea.unpack_multiplier(ds, o, sol.x[:head])
    else:
        t = hyper.t
        members = frozenset(j for j in range(n) if j not in separated or t[j] <= tol.pos)
        res = MrsResult(o, members, DUAL_MILP, {}, objective=float(round(sol.objective)))
        if len(members) != n - len(separated):
            res.notes.append(
                f"big-M suspect: {len(separated)} DMUs indicated off the hyperplane but only "
                f"{n - len(members)} can be kept below it by more than eps_pos"
            )
        elif separated and tau < 10.0 / big_M:
            res.notes.append(f"big-M suspect: best smallest non-member slack {tau:.3g} is below 10/big_M")
    res.witness = {
        "V": hyper.V,
        "U": hyper.U,
        "u_o": hyper.u_o,
        "t": np.maximum(hyper.t, 0.0),
        "gaps": hyper.gaps(ds),
        "objective": hyper.objective,
        "min_nonmember_gap": min((float(hyper.t[j]) for j in range(n) if j not in members), default=0.0),
    }
    return res


# -- helpers ---------------------------------------------------------------


def filter_pareto_efficient(ds: Dataset, mrs: MrsResult, tol: Tolerances = DEFAULT_TOL, classifications=None) -> frozenset:
    """Members of ``mrs`` that are BCC-efficient (radially efficient with zero slacks)."""
    out = set()
    for j in mrs.members:
        cls = classifications[j] if classifications is not None else dea.bcc_evaluate(ds, j, tol).classification
        if cls == dea.BCC_EFFICIENT:
            out.add(j)
    return frozenset(out)


def bcc_mrs(
    ds: Dataset,
    o: int,
    method: str,
    theta_star: Optional[float] = None,
    tol: Tolerances = DEFAULT_TOL,
    big_M: float = DEFAULT_BIG_M,
) -> MrsResult:
    """Dispatch to one of the BCC routes, computing ``theta_star`` if not given."""
    if theta_star is None:
        theta_star = dea.bcc_evaluate(ds, o, tol).theta_star
    if method == PRIMAL_MILP:
        return mrs_primal_milp(ds, o, theta_star, tol, big_M)
    if method == LP_PROCEDURE:
        return mrs_lp_procedure(ds, o, theta_star, tol)
    if method == DUAL_MILP:
        return mrs_dual_milp(ds, o, theta_star, tol, big_M)
    if method == ORACLE:
        return oracle_mrs(ds, o, theta_star, tol)
    raise ValueError(f"unknown BCC method {method!r}")


def union_members(results: Sequence[MrsResult]) -> frozenset:
    out = frozenset()
    for r in results:
        out |= r.members
    return out
