"""
The four application families: node solvers, instances that split global
data across the nodes, centralized reference solvers and the synthetic data
generators standing in for the benchmark datasets.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .DistributedOptimizer import NodeProblem
from .errors import BudgetExceededError, ConfigurationError
from .ProxSolvers import (
    ProxProblem,
    fista_solve,
    lipschitz_bound,
    phi_gradient,
    phi_value,
    project_polyhedron,
    project_soc_vector,
    qp_solve,
    sigma_max,
    soft_threshold,
    x_of_lambda,
)
from .utils.logger_utils import get_logger

logger = get_logger(__name__, "INFO")

FAMILIES = ("consensus", "bpdn", "lasso", "svm")
MATRIX_KINDS = ("gaussian", "dct")

# Desk-scale stand-ins for the benchmark matrices, keyed by matrix kind.
CS_DEFAULTS = {
    "gaussian": {"m": 60, "n": 256, "beta": 1.0, "sigma": 0.5},
    "dct": {"m": 50, "n": 250, "beta": 0.3, "sigma": 0.1},
}
SPARSITY = 5
NOISE_STD = 0.01
DELTA = 1e-3
SVM_POINTS = 100
SVM_FEATURES = 4
SVM_MARGIN = 1.0
THETA_MEAN = 10.0
THETA_STD = 100.0

BPDN_NODE_MAX_ITER = 5000
LASSO_NODE_MAX_ITER = 500
NODE_TOL = 1e-10
REFERENCE_TOL = 1e-10
REFERENCE_MAX_ITER = 100_000
SVM_PROXIMAL_WEIGHT = 1.0
SVM_MAX_OUTER = 10_000


def _identity(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# Node solvers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsensusNodeSolver:
    theta: float

    def __call__(self, v, c):
        if np.any(np.asarray(c) < 0):
            raise ValueError("c must be nonnegative")
        return (2.0 * self.theta - v) / (2.0 * (1.0 + c))

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (np.asarray(x, dtype=float) - self.theta)


@dataclass
class BpdnNodeSolver:
    """
    argmin ‖A_p x − b_p‖² + (β/P)‖x‖₁ + vᵀx + c‖x‖² by FISTA.

    The solver starts from its previous answer, so build one per run.
    """

    A_p: np.ndarray
    b_p: np.ndarray
    beta: float
    node_count: int
    max_iter: int = BPDN_NODE_MAX_ITER
    tol: float = NODE_TOL
    warm_start: bool = True
    _sigma: float = field(init=False, default=0.0, repr=False)
    _last: Optional[np.ndarray] = field(init=False, default=None, repr=False)

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        self.A_p = np.atleast_2d(np.asarray(self.A_p, dtype=float))
        self.b_p = np.atleast_1d(np.asarray(self.b_p, dtype=float))
        self._sigma = sigma_max(self.A_p)

    @property
    def weight(self) -> float:
        return self.beta / self.node_count

    def __call__(self, v: np.ndarray, c: float) -> np.ndarray:
        if c < 0:
            raise ValueError("c must be nonnegative")
        A, b, weight = self.A_p, self.b_p, self.weight
        v = np.asarray(v, dtype=float)

        def gradient(x):
            return 2.0 * A.T @ (A @ x - b) + v + 2.0 * c * x

        def objective(x):
            residual = A @ x - b
            return float(
                residual @ residual + v @ x + c * (x @ x) + weight * np.abs(x).sum()
            )

        start = self._last if self.warm_start and self._last is not None else None
        result = fista_solve(
            ProxProblem(
                gradient=gradient,
                lipschitz=max(2.0 * self._sigma**2 + 2.0 * c, 1e-12),
                prox=lambda eta, step: soft_threshold(eta, weight * step),
                x0=np.zeros(A.shape[1]) if start is None else start,
                max_iter=self.max_iter,
                tol=self.tol,
                objective=objective,
            )
        )
        if not result.converged:
            raise BudgetExceededError(
                f"BPDN node solve hit the {self.max_iter}-iteration budget",
                best_iterate=result.x,
                residual=result.step_change,
            )
        self._last = result.x
        return result.x

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * self.A_p.T @ (self.A_p @ x - self.b_p) + self.weight * np.sign(x)


@dataclass
class LassoNodeSolver:
    """
    Node dual problem in epigraph form over (λ, t):

        min φ_p(λ) + (1/P)bᵀλ + (σ/P)t + vᵀλ + c‖λ‖²  s.t. ‖λ‖ ≤ t

    solved by FISTA with the second-order cone projection. Returns λ.
    Hitting the iteration cap returns the lowest-objective iterate, sets
    `hit_budget` and bumps `budget_hits`.
    """

    A_p: np.ndarray
    b: np.ndarray
    sigma: float
    delta: float
    node_count: int
    max_iter: int = LASSO_NODE_MAX_ITER
    tol: float = NODE_TOL
    warm_start: bool = True
    budget_hits: int = field(init=False, default=0)
    hit_budget: bool = field(init=False, default=False)
    _last: Optional[np.ndarray] = field(init=False, default=None, repr=False)

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        self.A_p = np.atleast_2d(np.asarray(self.A_p, dtype=float))
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))

    def node_objective(self, lam: np.ndarray, v: np.ndarray, c: float) -> float:
        """g_p(λ) with t at its optimum ‖λ‖."""
        P = self.node_count
        return (
            phi_value(self.A_p, lam, self.delta)
            + float(self.b @ lam) / P
            + self.sigma / P * float(np.linalg.norm(lam))
            + float(v @ lam)
            + c * float(lam @ lam)
        )

    def __call__(self, v: np.ndarray, c: float) -> np.ndarray:
        if c < 0:
            raise ValueError("c must be nonnegative")
        A, delta, P = self.A_p, self.delta, self.node_count
        v = np.asarray(v, dtype=float)
        linear = self.b / P + v
        m = self.b.size

        def gradient(z):
            lam = z[:m]
            return np.append(
                phi_gradient(A, lam, delta) + linear + 2.0 * c * lam, self.sigma / P
            )

        def objective(z):
            lam = z[:m]
            return (
                phi_value(A, lam, delta)
                + float(linear @ lam)
                + self.sigma / P * float(z[m])
                + c * float(lam @ lam)
            )

        start = self._last if self.warm_start and self._last is not None else None
        result = fista_solve(
            ProxProblem(
                gradient=gradient,
                lipschitz=max(lipschitz_bound(A, delta, c), 1e-12),
                prox=project_soc_vector,
                x0=np.zeros(m + 1) if start is None else start,
                max_iter=self.max_iter,
                tol=self.tol,
                objective=objective,
            )
        )
        z = result.x
        self.hit_budget = not result.converged
        if self.hit_budget:
            z = result.best_x
            self.budget_hits += 1
            if self.budget_hits == 1:
                logger.warning(
                    f"LASSO node solve hit the {self.max_iter}-iteration budget, "
                    f"keeping the best iterate (change {result.step_change:.3e})"
                )
        self._last = z
        return z[:m]

    def subgradient(self, lam: np.ndarray) -> np.ndarray:
        P = self.node_count
        norm = float(np.linalg.norm(lam))
        cone = lam / norm if norm > 0 else np.zeros_like(lam)
        gradient = phi_gradient(self.A_p, lam, self.delta)
        return gradient + self.b / P + self.sigma / P * cone


@dataclass(frozen=True)
class SvmNodeSolver:
    """argmin ‖s‖² + vᵀ(s;r) + c‖(s;r)‖² over D_p(A_p s − 1r) ≥ 1."""

    A_p: np.ndarray
    labels: np.ndarray

    @cached_property
    def constraints(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.atleast_2d(np.asarray(self.A_p, dtype=float))
        d = np.asarray(self.labels, dtype=float).reshape(-1)
        G = d[:, None] * np.hstack([A, -np.ones((A.shape[0], 1))])
        return G, np.ones(A.shape[0])

    def __call__(self, v: np.ndarray, c: float) -> np.ndarray:
        if c <= 0:
            raise ValueError("SVM node solves need c > 0")
        G, h = self.constraints
        n = G.shape[1] - 1
        Q = 2.0 * np.append(np.full(n, 1.0 + c), c)
        return qp_solve(Q, np.asarray(v, dtype=float), G, h)

    def subgradient(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.append(2.0 * z[:-1], 0.0)

    def project(self, z: np.ndarray) -> np.ndarray:
        G, h = self.constraints
        return project_polyhedron(z, G, h)


def consensus_node_solve(theta_p: float) -> ConsensusNodeSolver:
    return ConsensusNodeSolver(float(theta_p))


def bpdn_node_solve(
    A_p: np.ndarray, b_p: np.ndarray, beta: float, P: int
) -> BpdnNodeSolver:
    return BpdnNodeSolver(A_p, b_p, beta, P)


def lasso_node_solve(
    A_p: np.ndarray, b: np.ndarray, sigma: float, delta: float, P: int
) -> LassoNodeSolver:
    return LassoNodeSolver(A_p, b, sigma, delta, P)


def svm_node_solve(A_p: np.ndarray, D_p: np.ndarray) -> SvmNodeSolver:
    return SvmNodeSolver(A_p, _labels_of(D_p))


def _labels_of(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    labels = np.diag(D).copy() if D.ndim == 2 else D.reshape(-1)
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("Labels must be +1 or -1")
    return labels


# ---------------------------------------------------------------------------
# Centralized references
# ---------------------------------------------------------------------------


def reference_consensus(theta: np.ndarray) -> float:
    theta = np.asarray(theta, dtype=float).reshape(-1)
    return float(theta.sum() / theta.size)


def reference_bpdn(
    A: np.ndarray, b: np.ndarray, beta: float, tol: float = REFERENCE_TOL
) -> np.ndarray:
    solver = BpdnNodeSolver(
        A, b, beta, node_count=1, max_iter=REFERENCE_MAX_ITER, tol=tol, warm_start=False
    )
    return solver(np.zeros(solver.A_p.shape[1]), 0.0)


def solve_lasso_reference(
    A: np.ndarray, b: np.ndarray, sigma: float, delta: float, tol: float = REFERENCE_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Returns (λ*, x*) of the δ-regularized LASSO from a single-node dual solve."""
    solver = LassoNodeSolver(
        A,
        b,
        sigma,
        delta,
        node_count=1,
        max_iter=REFERENCE_MAX_ITER,
        tol=tol,
        warm_start=False,
    )
    lam = solver(np.zeros(solver.b.size), 0.0)
    if solver.budget_hits:
        raise BudgetExceededError(
            f"LASSO reference did not converge in {REFERENCE_MAX_ITER} iterations",
            best_iterate=lam,
        )
    return lam, x_of_lambda(solver.A_p, lam, delta)


def reference_lasso(
    A: np.ndarray, b: np.ndarray, sigma: float, delta: float
) -> np.ndarray:
    return solve_lasso_reference(A, b, sigma, delta)[1]


def reference_svm(
    A: np.ndarray,
    D: np.ndarray,
    tol: float = REFERENCE_TOL,
    proximal_weight: float = SVM_PROXIMAL_WEIGHT,
    max_outer: int = SVM_MAX_OUTER,
) -> np.ndarray:
    """
    Hard-margin SVM min ‖s‖² s.t. D(As − 1r) ≥ 1, returned as (s; r).

    The offset r carries no penalty, so each outer step adds the proximal term
    (μ/2)(r − r_k)², which keeps the QP's quadratic positive definite.
    """
    solver = SvmNodeSolver(np.atleast_2d(A), _labels_of(D))
    G, h = solver.constraints
    n = G.shape[1] - 1
    Q = np.append(np.full(n, 2.0), proximal_weight)
    r = 0.0
    for outer in range(1, max_outer + 1):
        q = np.append(np.zeros(n), -proximal_weight * r)
        z = qp_solve(Q, q, G, h, tol=tol)
        if abs(z[-1] - r) <= tol * (1.0 + abs(r)):
            logger.debug(f"reference_svm settled after {outer} proximal steps")
            return z
        r = float(z[-1])
    raise BudgetExceededError(
        f"reference_svm offset still moving after {max_outer} proximal steps",
        best_iterate=z,
    )


def svm_classify(z: np.ndarray, A: np.ndarray) -> np.ndarray:
    return np.sign(np.atleast_2d(A) @ z[:-1] - z[-1])


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------


def _check_cs_shape(m: int, n: int, k: int) -> None:
    if not 0 < k < m < n:
        raise ValueError(f"Need 0 < k < m < n, got k={k}, m={m}, n={n}")


def _sparse_signal(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    x = np.zeros(n)
    support = rng.choice(n, size=k, replace=False)
    x[support] = rng.choice([-1.0, 1.0], size=k)
    return x


def gen_gaussian_cs(
    m: int, n: int, k: int, noise_std: float, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _check_cs_shape(m, n, k)
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / math.sqrt(m)
    x_true = _sparse_signal(rng, n, k)
    b = A @ x_true + noise_std * rng.standard_normal(m)
    return A, b, x_true


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix, C[k, j] = α_k cos(π(2j+1)k / 2n)."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    C = np.cos(np.pi * (2 * j + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    C[0] /= math.sqrt(2.0)
    return C


def gen_partial_dct_cs(
    m: int, n: int, k: int, noise_std: float, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _check_cs_shape(m, n, k)
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(n, size=m, replace=False))
    A = dct_matrix(n)[rows]
    x_true = _sparse_signal(rng, n, k)
    b = A @ x_true + noise_std * rng.standard_normal(m)
    return A, b, x_true


def gen_separable_svm(
    m: int, n: int, margin: float, seed: int, P: int = 1
) -> "SvmInstance":
    """
    Two unit-variance Gaussian clusters at ±(margin+1)u with alternating
    labels; a point is redrawn until d·uᵀa ≥ margin.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    labels = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    A = np.empty((m, n))
    for i, d in enumerate(labels):
        while True:
            a = d * (margin + 1.0) * u + rng.standard_normal(n)
            if d * (u @ a) >= margin:
                break
        A[i] = a
    return SvmInstance(A=A, labels=labels, node_count=P, direction=u)


def partition_rows(
    A: np.ndarray, b: np.ndarray, P: int, pattern: str = "contiguous"
) -> list[tuple[np.ndarray, np.ndarray]]:
    _check_partition(A.shape[0], P, pattern, "rows")
    return list(zip(np.array_split(A, P, axis=0), np.array_split(b, P)))


def partition_cols(
    A: np.ndarray, P: int, pattern: str = "contiguous"
) -> list[np.ndarray]:
    _check_partition(A.shape[1], P, pattern, "columns")
    return np.array_split(A, P, axis=1)


def _check_partition(size: int, P: int, pattern: str, what: str) -> None:
    if pattern != "contiguous":
        raise ValueError(f"Unsupported partition pattern '{pattern}'")
    if not 1 <= P <= size:
        raise ValueError(f"Cannot split {size} {what} across {P} nodes")


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


class ProblemInstance:
    """Shared surface of the four instance types."""

    kind: str = ""

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    @property
    def reference(self) -> np.ndarray:
        raise NotImplementedError

    def node_problems(self) -> list[NodeProblem]:
        raise NotImplementedError

    def params(self) -> dict[str, Union[int, float]]:
        raise NotImplementedError

    def matrices(self) -> dict[str, np.ndarray]:
        raise NotImplementedError

    def is_feasible(self, x: np.ndarray) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class ConsensusInstance(ProblemInstance):
    theta: np.ndarray
    kind = "consensus"

    @property
    def node_count(self) -> int:
        return int(np.asarray(self.theta).size)

    @property
    def dimension(self) -> int:
        return 1

    @cached_property
    def reference(self) -> np.ndarray:
        return np.array([reference_consensus(self.theta)])

    def node_problems(self) -> list[NodeProblem]:
        problems = []
        for p, theta_p in enumerate(np.asarray(self.theta, dtype=float).reshape(-1)):
            solver = consensus_node_solve(theta_p)
            problems.append(
                NodeProblem(p, 1, solver, solver.subgradient, _identity)
            )
        return problems

    def params(self):
        return {"P": self.node_count}

    def matrices(self):
        return {"theta": np.asarray(self.theta, dtype=float).reshape(-1, 1)}


@dataclass(frozen=True, eq=False)
class BpdnInstance(ProblemInstance):
    A: np.ndarray
    b: np.ndarray
    beta: float
    node_count: int
    kind = "bpdn"

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    @property
    def dimension(self) -> int:
        return int(self.A.shape[1])

    @cached_property
    def blocks(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return partition_rows(self.A, self.b, self.node_count)

    @cached_property
    def reference(self) -> np.ndarray:
        return reference_bpdn(self.A, self.b, self.beta)

    def node_problems(self) -> list[NodeProblem]:
        problems = []
        for p, (A_p, b_p) in enumerate(self.blocks):
            solver = bpdn_node_solve(A_p, b_p, self.beta, self.node_count)
            problems.append(
                NodeProblem(p, self.A.shape[1], solver, solver.subgradient, _identity)
            )
        return problems

    def params(self):
        return {"P": self.node_count, "beta": self.beta}

    def matrices(self):
        return {"A": self.A, "b": self.b.reshape(-1, 1)}


@dataclass(frozen=True, eq=False)
class LassoInstance(ProblemInstance):
    """
    Column-partitioned LASSO. Nodes agree on the dual variable λ ∈ ℝᵐ, so
    `reference` is λ*; the primal reference is `primal_reference`.
    """

    A: np.ndarray
    b: np.ndarray
    sigma: float
    delta: float
    node_count: int
    kind = "lasso"

    def __post_init__(self):
        if self.sigma <= 0 or self.delta <= 0:
            raise ValueError("sigma and delta must be positive")

    @property
    def dimension(self) -> int:
        return int(self.b.size)

    @cached_property
    def blocks(self) -> list[np.ndarray]:
        return partition_cols(self.A, self.node_count)

    @cached_property
    def _solution(self) -> tuple[np.ndarray, np.ndarray]:
        return solve_lasso_reference(self.A, self.b, self.sigma, self.delta)

    @property
    def reference(self) -> np.ndarray:
        return self._solution[0]

    @property
    def primal_reference(self) -> np.ndarray:
        return self._solution[1]

    def node_problems(self) -> list[NodeProblem]:
        problems = []
        for p, A_p in enumerate(self.blocks):
            solver = lasso_node_solve(
                A_p, self.b, self.sigma, self.delta, self.node_count
            )
            problems.append(
                NodeProblem(p, self.b.size, solver, solver.subgradient, _identity)
            )
        return problems

    def recover_primal(self, lam_copies: np.ndarray) -> np.ndarray:
        """Concatenates x_p(λ_p) over the nodes' own dual copies."""
        lam_copies = np.asarray(lam_copies, dtype=float).reshape(self.node_count, -1)
        return np.concatenate(
            [
                x_of_lambda(A_p, lam_copies[p], self.delta)
                for p, A_p in enumerate(self.blocks)
            ]
        )

    def primal_error(self, lam_copies: np.ndarray) -> float:
        x = self.recover_primal(lam_copies)
        scale = float(np.linalg.norm(self.primal_reference)) or 1.0
        return float(np.linalg.norm(x - self.primal_reference)) / scale

    def is_feasible(self, x: np.ndarray, slack: float = 1e-3) -> bool:
        return float(np.linalg.norm(self.A @ x - self.b)) <= self.sigma * (1.0 + slack)

    def params(self):
        return {"P": self.node_count, "sigma": self.sigma, "delta": self.delta}

    def matrices(self):
        return {"A": self.A, "b": self.b.reshape(-1, 1)}


@dataclass(frozen=True, eq=False)
class SvmInstance(ProblemInstance):
    A: np.ndarray
    labels: np.ndarray
    node_count: int
    direction: Optional[np.ndarray] = None
    kind = "svm"

    def __post_init__(self):
        _labels_of(self.labels)

    @property
    def dimension(self) -> int:
        return int(self.A.shape[1]) + 1

    @cached_property
    def blocks(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return partition_rows(self.A, self.labels, self.node_count)

    @cached_property
    def reference(self) -> np.ndarray:
        return reference_svm(self.A, self.labels)

    def node_problems(self) -> list[NodeProblem]:
        problems = []
        for p, (A_p, d_p) in enumerate(self.blocks):
            solver = SvmNodeSolver(A_p, d_p)
            problems.append(
                NodeProblem(
                    p, self.A.shape[1] + 1, solver, solver.subgradient, solver.project
                )
            )
        return problems

    def margins(self, z: np.ndarray) -> np.ndarray:
        return self.labels * (self.A @ z[:-1] - z[-1])

    def is_feasible(self, z: np.ndarray, slack: float = 1e-6) -> bool:
        return bool(np.all(self.margins(z) >= 1.0 - slack))

    def params(self):
        return {"P": self.node_count}

    def matrices(self):
        return {"A": self.A, "labels": self.labels.reshape(-1, 1)}


def build_instance(
    family: str, P: int, seed: int = 0, **params
) -> ProblemInstance:
    """
    Builds an instance of `family` for P nodes from the synthetic generators.
    Unset parameters take the desk-scale defaults of the matrix kind.
    """
    if family not in FAMILIES:
        raise ConfigurationError(
            f"Unknown problem family '{family}', expected one of {FAMILIES}"
        )

    if family == "consensus":
        rng = np.random.default_rng(seed)
        mean = params.pop("theta_mean", THETA_MEAN)
        std = params.pop("theta_std", THETA_STD)
        _reject_leftovers(family, params)
        return ConsensusInstance(theta=rng.normal(mean, std, size=P))

    if family == "svm":
        m = params.pop("m", SVM_POINTS)
        n = params.pop("n", SVM_FEATURES)
        margin = params.pop("margin", SVM_MARGIN)
        _reject_leftovers(family, params)
        return gen_separable_svm(m, n, margin, seed, P=P)

    matrix = params.pop("matrix", "gaussian" if family == "bpdn" else "dct")
    if matrix not in MATRIX_KINDS:
        raise ConfigurationError(f"Unknown matrix kind '{matrix}'")
    defaults = CS_DEFAULTS[matrix]
    m = params.pop("m", defaults["m"])
    n = params.pop("n", defaults["n"])
    k = params.pop("k", SPARSITY)
    noise_std = params.pop("noise_std", NOISE_STD)
    generate = gen_gaussian_cs if matrix == "gaussian" else gen_partial_dct_cs
    A, b, _ = generate(m, n, k, noise_std, seed)

    if family == "bpdn":
        beta = params.pop("beta", defaults["beta"])
        _reject_leftovers(family, params)
        return BpdnInstance(A=A, b=b, beta=beta, node_count=P)

    sigma = params.pop("sigma", defaults["sigma"])
    delta = params.pop("delta", DELTA)
    _reject_leftovers(family, params)
    return LassoInstance(A=A, b=b, sigma=sigma, delta=delta, node_count=P)


def _reject_leftovers(family: str, params: dict) -> None:
    if params:
        raise ConfigurationError(
            f"Unused parameters for '{family}': {', '.join(sorted(params))}"
        )
