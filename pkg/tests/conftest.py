import itertools

import numpy as np
import pytest

from DAdmmSim.src.NetworkGraph import Graph, gen_lattice


def grid_minimize_1d(f, lo, hi, points=2001, rounds=6):
    """Brute-force minimizer of a scalar function by repeated grid refinement."""
    best = lo
    for _ in range(rounds):
        xs = np.linspace(lo, hi, points)
        values = np.array([f(x) for x in xs])
        best = xs[int(np.argmin(values))]
        width = (hi - lo) / (points - 1)
        lo, hi = best - 2 * width, best + 2 * width
    return best


def active_set_qp(Q, q, G, h, tol=1e-9):
    """
    Exhaustive active-set solve of min ½zᵀQz + qᵀz s.t. Gz ≥ h: tries every
    subset of constraints as equalities and keeps the KKT point.
    """
    Q, q, G, h = (np.asarray(a, dtype=float) for a in (Q, q, G, h))
    n, m = q.size, h.size
    best, best_value = None, np.inf
    for size in range(0, min(m, n) + 1):
        for active in itertools.combinations(range(m), size):
            G_a = G[list(active)]
            kkt = np.block([[Q, -G_a.T], [G_a, np.zeros((size, size))]])
            rhs = np.concatenate([-q, h[list(active)]])
            try:
                solution = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            z, mu = solution[:n], solution[n:]
            if np.all(G @ z >= h - tol) and np.all(mu >= -tol):
                value = 0.5 * z @ Q @ z + q @ z
                if value < best_value:
                    best, best_value = z, value
    return best


@pytest.fixture
def path2() -> Graph:
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def path3() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def star() -> Graph:
    return Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def lattice10() -> Graph:
    return gen_lattice(10)


@pytest.fixture
def theta10() -> np.ndarray:
    return np.random.default_rng(7).normal(10.0, 100.0, size=10)
