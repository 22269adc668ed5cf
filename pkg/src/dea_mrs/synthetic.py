"""Random DEA datasets for property tests and benchmarks.

``planted_face`` puts ``k = m + s + 1`` DMUs exactly on one supporting
hyperplane ``U.y - V.x + u0 = 0`` with ``U, V > 0`` and every other DMU
strictly below it. Such ``k`` points in an ``(m + s - 1)``-dimensional
hyperplane are affinely dependent, so a point in the relative interior of
their hull has a whole segment of convex representations. Some inefficient
DMUs are built to contract radially onto exactly such a point; their optimal
intensity vectors are then not unique.
"""

import numpy as np

from .dataset import Dataset

LOW, HIGH = 1.0, 10.0


def uniform(rng: np.random.Generator, n: int, m: int, s: int) -> Dataset:
    return Dataset.from_arrays(rng.uniform(LOW, HIGH, (n, m)), rng.uniform(LOW, HIGH, (n, s)))


def planted_face(rng: np.random.Generator, n: int, m: int, s: int, k=None, margin=0.05, projected=None) -> Dataset:
    """``k`` DMUs on a facet, ``projected`` DMUs aimed inside it, the rest strictly below."""
    k = m + s + 1 if k is None else k
    projected = max(1, (n - k) // 2) if projected is None else projected
    if n < k + projected:
        raise ValueError(f"n={n} is too small for k={k} face DMUs and {projected} projected DMUs")
    V = rng.uniform(0.5, 1.5, m)
    U = rng.uniform(0.5, 1.5, s)
    x_ref = np.full(m, 3.0)
    y_ref = np.full(s, 8.0)

    def gap(x, y):
        return U @ (y - y_ref) - V @ (x - x_ref)

    X, Y = [], []
    while len(X) < k:
        x = rng.uniform(LOW, HIGH, m)
        y = rng.uniform(LOW, HIGH, s)
        y[-1] = 0.0
        y[-1] = y_ref[-1] + (V @ (x - x_ref) - U[:-1] @ (y[:-1] - y_ref[:-1])) / U[-1]
        if LOW <= y[-1] <= HIGH:
            X.append(x)
            Y.append(y)
    face_x, face_y = np.array(X), np.array(Y)
    for _ in range(projected):
        # (theta0 * x, y) is a strictly positive mix of the face DMUs, so theta* = theta0
        w = rng.dirichlet(np.ones(k))
        px, py = w @ face_x, w @ face_y
        lo = max(0.4, px.max() / HIGH)
        theta0 = rng.uniform(lo, max(lo, 0.95))
        X.append(px / theta0)
        Y.append(py)
    scale = float(V.sum() + U.sum())
    while len(X) < n:
        x = rng.uniform(LOW, HIGH, m)
        y = rng.uniform(LOW, HIGH, s)
        if gap(x, y) < -margin * scale:
            X.append(x)
            Y.append(y)
    order = rng.permutation(n)
    return Dataset.from_arrays(np.array(X)[order], np.array(Y)[order])


def duplicated_vertex(rng: np.random.Generator, n: int, m: int, s: int) -> Dataset:
    """Uniform data where one DMU with the best output sum is repeated."""
    ds = uniform(rng, n - 1, m, s)
    X, Y = np.array(ds.X), np.array(ds.Y)
    j = int(np.argmax(Y.sum(axis=1) - X.sum(axis=1)))
    return Dataset.from_arrays(np.vstack([X, X[j]]), np.vstack([Y, Y[j]]))


def suite(seed: int = 2024, total: int = 50, engineered: int = 25):
    """Deterministic list of desk-scale instances, ``engineered`` of them with non-unique optima."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(total):
        n = int(rng.integers(5, 16))
        m = int(rng.integers(1, 4))
        s = int(rng.integers(1, 4))
        if i < engineered and i % 5:
            ds = planted_face(rng, max(n, m + s + 3), m, s)
        elif i < engineered:
            ds = duplicated_vertex(rng, n, m, s)
        else:
            ds = uniform(rng, n, m, s)
        out.append(ds)
    return out
