from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dea_mrs import _kernels, lp
from dea_mrs.errors import SolverError
from dea_mrs.lp import LpProblem, Tolerances

from oracles import highs_lp, vertex_optimum

F = Fraction

# (name, c, A, b, senses, direction, status, objective); objectives worked by hand
BATTERY = [
    ("single_bound", [1], [[1]], [5], ["<="], "max", "optimal", 5),
    ("negative_bound", [1], [[1]], [-1], ["<="], "max", "infeasible", None),
    ("dantzig", [3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18], ["<="] * 3, "max", "optimal", 36),
    ("covering", [1, 1], [[1, 2], [3, 1]], [4, 6], [">="] * 2, "min", "optimal", F(14, 5)),
    ("open_wedge", [1, 1], [[1, -1]], [1], ["<="], "max", "unbounded", None),
    (
        "beale_cycling",
        [F(-3, 4), 20, F(-1, 2), 6],
        [[F(1, 4), -8, -1, 9], [F(1, 2), -12, F(-1, 2), 3], [0, 0, 1, 0]],
        [0, 0, 1],
        ["<="] * 3,
        "min",
        "optimal",
        F(-5, 4),
    ),
    (
        "chvatal_cycling",
        [10, -57, -9, -24],
        [[F(1, 2), F(-11, 2), F(-5, 2), 9], [F(1, 2), F(-3, 2), F(-1, 2), 1], [1, 0, 0, 0]],
        [0, 0, 1],
        ["<="] * 3,
        "max",
        "optimal",
        1,
    ),
    ("equality_mix", [2, 3], [[1, 1], [1, 0]], [10, 4], ["=", "<="], "min", "optimal", 26),
    ("degenerate_corner", [1, 1], [[1, 1], [1, 0], [0, 1], [1, 2]], [1, 1, 1, 2], ["<="] * 4, "max", "optimal", 1),
    ("redundant_equalities", [1, 0], [[1, 1], [2, 2]], [2, 4], ["=", "="], "max", "optimal", 2),
    ("inconsistent_equalities", [1, 1], [[1, 1], [1, 1]], [1, 2], ["=", "="], "max", "infeasible", None),
    ("empty_band", [1, 1], [[1, 1], [1, 1]], [1, 3], ["<=", ">="], "max", "infeasible", None),
    ("unbounded_min", [-1, 0], [[1, -1]], [2], ["<="], "min", "unbounded", None),
    ("flipped_rhs", [-1, -1], [[-1, -1]], [-3], ["<="], "max", "optimal", -3),
    ("zero_objective", [0, 0], [[1, 1]], [1], ["<="], "max", "optimal", 0),
    ("degenerate_origin", [1], [[1]], [0], [">="], "min", "optimal", 0),
    ("klee_minty_3", [100, 10, 1], [[1, 0, 0], [20, 1, 0], [200, 20, 1]], [1, 100, 10000], ["<="] * 3, "max", "optimal", 10000),
    (
        "transport",
        [2, 3, 4, 1],
        [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]],
        [5, 5, 4, 6],
        ["="] * 4,
        "min",
        "optimal",
        16,
    ),
    (
        "bcc_dmu6",
        [1, 0, 0, 0, 0, 0, 0, 0],
        [[-5, 1, 2, 3, 4, 6, 5, 4], [0, 1, 3, 4, 5, 6, 4, 3], [0, 1, 1, 1, 1, 1, 1, 1]],
        [0, 4, 1],
        ["<=", ">=", "="],
        "min",
        "optimal",
        F(3, 5),
    ),
    ("optimal_edge", [1, 1], [[1, 1], [1, 0], [0, 1]], [3, 2, 2], ["<="] * 3, "max", "optimal", 3),
]

IDS = [case[0] for case in BATTERY]


def _problem(case):
    _, c, A, b, senses, direction, _, _ = case
    to = lambda v: np.array(v, dtype=object).astype(float)  # noqa: E731
    return LpProblem(to(c), to(A), to(b), senses, direction)


def test_battery_size():
    assert len(BATTERY) == 20
    statuses = {case[6] for case in BATTERY}
    assert statuses == {"optimal", "infeasible", "unbounded"}


@pytest.mark.parametrize("case", BATTERY, ids=IDS)
def test_expected_values_agree_with_oracles(case):
    name, c, A, b, senses, direction, status, obj = case
    assert highs_lp(_problem(case).c, _problem(case).A, _problem(case).b, senses, direction)[0] == status
    if status == "optimal":
        assert vertex_optimum(c, A, b, senses, direction)[0] == obj
    if status == "infeasible":
        assert vertex_optimum(c, A, b, senses, direction) is None


@pytest.mark.parametrize("case", BATTERY, ids=IDS)
def test_battery(case, kernel_backend):
    name, _, _, _, _, direction, status, obj = case
    p = _problem(case)
    sol = lp.solve(p)
    assert sol.status == status
    if status != "optimal":
        if status == "unbounded":
            assert sol.objective == (np.inf if direction == "max" else -np.inf)
        return
    assert abs(sol.objective - float(obj)) <= 1e-9
    assert lp.residual(p, sol.x) <= 1e-9
    assert abs(float(p.c @ sol.x) - sol.objective) <= 1e-9
    # optimality sign condition, z_j - c_j of the min form
    assert np.all(sol.reduced_costs <= 1e-9)
    assert np.all(sol.reduced_costs[list(sol.basis)] == 0.0)
    assert np.all(sol.x_full >= 0.0)


@pytest.mark.parametrize("name", ["beale_cycling", "chvatal_cycling"])
def test_classic_cycling_instances_terminate(name, kernel_backend):
    case = BATTERY[IDS.index(name)]
    p = _problem(case)
    sol = lp.solve(p)
    assert sol.optimal
    assert sol.iterations < 20


def test_unbounded_ray_is_a_recession_direction():
    p = _problem(BATTERY[IDS.index("open_wedge")])
    sol = lp.solve(p)
    d = sol.ray
    assert d is not None and np.all(d >= -1e-12)
    assert np.all(p.A @ d <= 1e-12)
    assert p.c @ d > 0


def test_basic_variable_reported():
    sol = lp.solve(_problem(BATTERY[0]))
    assert 0 in sol.basis and sol.x[0] == 5.0


def test_redundant_row_dropped():
    sol = lp.solve(_problem(BATTERY[IDS.index("redundant_equalities")]))
    assert len(sol.rows) == 1


def test_deterministic_bases(kernel_backend):
    p = _problem(BATTERY[IDS.index("bcc_dmu6")])
    first = lp.solve(p)
    for _ in range(3):
        again = lp.solve(p)
        assert again.basis == first.basis
        np.testing.assert_array_equal(again.x, first.x)


def test_backends_agree_on_battery():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    for case in BATTERY:
        p = _problem(case)
        with _kernels.use_backend("numpy"):
            a = lp.solve(p)
        with _kernels.use_backend("numba"):
            b = lp.solve(p)
        assert a.status == b.status and a.basis == b.basis and a.iterations == b.iterations


def test_reprice_identity_needs_no_pivots():
    p = _problem(BATTERY[IDS.index("dantzig")])
    sol = lp.solve(p)
    again = lp.reoptimize_with_new_objective(sol, p, p.c)
    assert again.warm and again.iterations == 0
    np.testing.assert_allclose(again.x, sol.x)
    assert again.basis == sol.basis


def test_reprice_unit_box_to_opposite_vertex():
    box = LpProblem([1.0, 1.0], np.eye(2), [1.0, 1.0], ["<=", "<="], "max")
    top = lp.solve(box)
    np.testing.assert_allclose(top.x, [1.0, 1.0])
    low = lp.reoptimize_with_new_objective(top, box, [-1.0, -1.0])
    np.testing.assert_allclose(low.x, [0.0, 0.0])
    assert low.objective == 0.0


def test_reprice_rejects_bad_shape():
    p = _problem(BATTERY[0])
    sol = lp.solve(p)
    with pytest.raises(ValueError):
        lp.reoptimize_with_new_objective(sol, p, [1.0, 2.0])


def test_warm_start_with_infeasible_basis_falls_back():
    p = _problem(BATTERY[IDS.index("dantzig")])
    cold = lp.solve(p)
    # x1 basic with slacks s1, s2 puts x1 = 6 and s1 = -2
    warm = lp.solve(p, basis=[2, 3, 0], rows=[0, 1, 2])
    assert not warm.warm
    assert warm.optimal and abs(warm.objective - cold.objective) < 1e-12
    assert not lp.solve(p, basis=[0, 0, 2]).warm


def test_iteration_limit_is_an_error(monkeypatch):
    monkeypatch.setattr(lp, "_max_iter", lambda rows, cols: 1)
    with pytest.raises(SolverError):
        lp.solve(_problem(BATTERY[IDS.index("klee_minty_3")]))


def test_problem_validation():
    with pytest.raises(ValueError):
        LpProblem([1, 2], [[1, 2, 3]], [1], ["<="])
    with pytest.raises(ValueError):
        LpProblem([1], [[1]], [1], ["<"])
    with pytest.raises(ValueError):
        LpProblem([1], [[1]], [1], ["<="], "maximize")
    with pytest.raises(ValueError):
        LpProblem([np.nan], [[1]], [1], ["<="])


def test_tolerance_invariants():
    with pytest.raises(ValueError):
        Tolerances(pos=0.0)
    with pytest.raises(ValueError):
        Tolerances(feas=1e-6, pos=1e-7)


@st.composite
def random_lps(draw):
    k = draw(st.integers(1, 5))
    n = draw(st.integers(1, 5))
    ints = st.integers(-5, 5)
    A = np.array(draw(st.lists(st.lists(ints, min_size=n, max_size=n), min_size=k, max_size=k)), float)
    b = np.array(draw(st.lists(st.integers(-3, 8), min_size=k, max_size=k)), float)
    c = np.array(draw(st.lists(ints, min_size=n, max_size=n)), float)
    senses = draw(st.lists(st.sampled_from(["<=", ">=", "="]), min_size=k, max_size=k))
    direction = draw(st.sampled_from(["min", "max"]))
    return c, A, b, senses, direction


@settings(max_examples=150, deadline=None)
@given(random_lps())
def test_matches_highs_on_random_lps(data):
    c, A, b, senses, direction = data
    sol = lp.solve(LpProblem(c, A, b, senses, direction))
    status, obj = highs_lp(c, A, b, senses, direction)
    assert sol.status == status
    if status == "optimal":
        assert abs(sol.objective - obj) <= 1e-7 * max(1.0, abs(obj))
        assert np.all(sol.reduced_costs <= 1e-9)


def test_problems_without_columns():
    assert lp.solve(LpProblem([], [[]], [-1.0], [">="])).optimal
    assert lp.solve(LpProblem([], [[], []], [1.0, 0.0], ["<=", "="])).optimal
    assert lp.solve(LpProblem([], [[]], [1.0], ["="])).status == "infeasible"
