"""
Numerical kernels shared by the node subproblems: FISTA, soft-thresholding,
second-order cone projection, the closed-form LASSO dual maps and a small
dual projected-gradient QP solver for diagonal quadratics.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BudgetExceededError, NonFiniteError, SolverError
from .utils.logger_utils import get_logger

logger = get_logger(__name__, "INFO")

FISTA_MAX_ITER = 500
FISTA_TOL = 1e-8
POWER_MAX_ITER = 200
POWER_TOL = 1e-10
QP_MAX_ITER = 100_000


@dataclass
class ProxProblem:
    """
    Composite problem min f(x) + g(x) for FISTA.

    `gradient` is the gradient of the smooth part f, `lipschitz` its Lipschitz
    constant and `prox(eta, step)` the proximal map of step*g (the projection
    when g is an indicator). `objective`, when given, is f + g; it enables the
    restart-on-increase rule and best-iterate tracking.
    """

    gradient: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    prox: Callable[[np.ndarray, float], np.ndarray]
    x0: np.ndarray
    max_iter: int = FISTA_MAX_ITER
    tol: float = FISTA_TOL
    objective: Optional[Callable[[np.ndarray], float]] = None
    accelerated: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lipschitz) and self.lipschitz > 0):
            raise ValueError(
                f"Lipschitz constant must be positive, got {self.lipschitz}"
            )
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        self.x0 = np.asarray(self.x0, dtype=float)


@dataclass(frozen=True)
class ProxResult:
    x: np.ndarray
    iterations: int
    converged: bool
    step_change: float
    # Lowest-objective iterate seen, when the problem has an objective.
    best_x: Optional[np.ndarray] = None
    best_objective: float = math.inf


@dataclass(frozen=True)
class SocPoint:
    lam: np.ndarray
    t: float

    def as_vector(self) -> np.ndarray:
        return np.append(self.lam, self.t)

    @classmethod
    def from_vector(cls, z: np.ndarray) -> "SocPoint":
        return cls(lam=np.asarray(z[:-1], dtype=float), t=float(z[-1]))


def _check_finite(values: np.ndarray, what: str, best: np.ndarray, iteration: int):
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(
            f"non-finite {what} at iteration {iteration}", best_iterate=best
        )


def fista_solve(problem: ProxProblem) -> ProxResult:
    step = 1.0 / problem.lipschitz
    x = problem.x0.copy()
    y = x.copy()
    t = 1.0
    tracked = problem.objective is not None
    use_restart = problem.accelerated and tracked
    f_prev = problem.objective(x) if tracked else math.inf
    best_x, best_f = x, f_prev
    change = float("inf")

    for k in range(1, problem.max_iter + 1):
        grad = problem.gradient(y)
        _check_finite(grad, "gradient", x, k)
        x_new = problem.prox(y - step * grad, step)
        _check_finite(x_new, "prox output", x, k)
        change = float(np.linalg.norm(x_new - x))
        threshold = problem.tol * (1.0 + float(np.linalg.norm(x)))

        if tracked:
            f_new = problem.objective(x_new)
            if f_new < best_f:
                best_x, best_f = x_new, f_new
            if use_restart and f_new > f_prev:
                t = 1.0
            f_prev = f_new

        if problem.accelerated:
            t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
            y = x_new + ((t - 1.0) / t_next) * (x_new - x)
            t = t_next
        else:
            y = x_new
        x = x_new

        if change <= threshold:
            return ProxResult(
                x=x,
                iterations=k,
                converged=True,
                step_change=change,
                best_x=best_x if tracked else None,
                best_objective=best_f,
            )

    logger.debug(
        f"FISTA stopped at the {problem.max_iter}-iteration cap, "
        f"last change {change:.3e}"
    )
    return ProxResult(
        x=x,
        iterations=problem.max_iter,
        converged=False,
        step_change=change,
        best_x=best_x if tracked else None,
        best_objective=best_f,
    )


def fista(problem: ProxProblem) -> np.ndarray:
    return fista_solve(problem).x


def soft_threshold(x: np.ndarray, tau: float) -> np.ndarray:
    if tau < 0:
        raise ValueError("Threshold must be nonnegative")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def project_soc(q: SocPoint) -> SocPoint:
    norm = float(np.linalg.norm(q.lam))
    if q.t >= norm:
        return SocPoint(lam=np.array(q.lam, dtype=float), t=float(q.t))
    if q.t <= -norm:
        return SocPoint(lam=np.zeros_like(q.lam, dtype=float), t=0.0)
    scale = (q.t + norm) / 2.0
    lam = scale * (q.lam / norm)
    # Rounding may leave ‖lam‖ a hair above scale; keep the output inside the cone.
    return SocPoint(lam=lam, t=max(scale, float(np.linalg.norm(lam))))


def project_soc_vector(z: np.ndarray, step: float = 1.0) -> np.ndarray:
    """project_soc on the stacked vector (λ, t), in the prox(eta, step) shape."""
    return project_soc(SocPoint.from_vector(z)).as_vector()


def x_of_lambda(A_p: np.ndarray, lam: np.ndarray, delta: float) -> np.ndarray:
    if delta <= 0:
        raise ValueError("delta must be positive")
    r = A_p.T @ lam
    return -soft_threshold(r, 1.0) / delta


def phi_value(A_p: np.ndarray, lam: np.ndarray, delta: float) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    excess = np.maximum(np.abs(A_p.T @ lam) - 1.0, 0.0)
    return float(excess @ excess) / (2.0 * delta)


def phi_gradient(A_p: np.ndarray, lam: np.ndarray, delta: float) -> np.ndarray:
    return -A_p @ x_of_lambda(A_p, lam, delta)


def sigma_max(
    A: np.ndarray,
    max_iter: int = POWER_MAX_ITER,
    tol: float = POWER_TOL,
    seed: int = 0,
) -> float:
    """Largest singular value by power iteration on AᵀA from a seeded start."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    v = np.random.default_rng(seed).normal(size=A.shape[1])
    v /= np.linalg.norm(v)
    eigenvalue = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        estimate = float(np.linalg.norm(w))
        if estimate == 0.0:
            return 0.0
        v = w / estimate
        converged = abs(estimate - eigenvalue) <= tol * estimate
        eigenvalue = estimate
        if converged:
            break
    return math.sqrt(eigenvalue)


def lipschitz_bound(A_p: np.ndarray, delta: float, c: float) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    if c < 0:
        raise ValueError("c must be nonnegative")
    return sigma_max(A_p) ** 2 / delta + 2.0 * c


def _kkt_residual(mu: np.ndarray, slack: np.ndarray) -> float:
    infeasibility = float(np.max(np.maximum(-slack, 0.0), initial=0.0))
    complementarity = float(np.max(np.abs(mu * slack), initial=0.0))
    return max(infeasibility, complementarity)


def qp_solve(
    Q: np.ndarray,
    q: np.ndarray,
    G: np.ndarray,
    h: np.ndarray,
    tol: float = 1e-9,
    max_iter: int = QP_MAX_ITER,
) -> np.ndarray:
    """
    Minimize ½zᵀQz + qᵀz subject to Gz ≥ h for diagonal positive Q.

    Runs projected gradient ascent on the Lagrange dual with Nesterov momentum
    and gradient restart, recovering z = Q⁻¹(Gᵀμ − q). Stops when the primal
    infeasibility and the complementary slackness are both below `tol`.

    Q may be given as a matrix or as its diagonal.
    """
    Q = np.asarray(Q, dtype=float)
    diag = np.diag(Q).copy() if Q.ndim == 2 else Q.copy()
    if Q.ndim == 2 and np.any(Q - np.diag(diag)):
        raise ValueError("Q must be diagonal")
    if np.any(diag <= 0):
        raise ValueError("Q must have strictly positive diagonal entries")
    q = np.asarray(q, dtype=float)
    h = np.atleast_1d(np.asarray(h, dtype=float))
    G = np.asarray(G, dtype=float).reshape(h.size, q.size)
    q_inv = 1.0 / diag

    if h.size == 0:
        return -q * q_inv

    dual_lipschitz = sigma_max(G * np.sqrt(q_inv)) ** 2
    if dual_lipschitz == 0.0:
        z = -q * q_inv
        if np.any(h > tol):
            raise SolverError("constraints 0 ≥ h are infeasible", best_iterate=z)
        return z
    step = 1.0 / dual_lipschitz

    mu = np.zeros(h.size)
    y = mu.copy()
    t = 1.0
    best_z, best_residual = -q * q_inv, float("inf")
    for iteration in range(1, max_iter + 1):
        z_y = q_inv * (G.T @ y - q)
        mu_next = np.maximum(0.0, y + step * (h - G @ z_y))
        z = q_inv * (G.T @ mu_next - q)
        _check_finite(z, "QP primal iterate", best_z, iteration)

        residual = _kkt_residual(mu_next, G @ z - h)
        if residual < best_residual:
            best_z, best_residual = z, residual
        if residual <= tol:
            logger.debug(f"qp_solve converged in {iteration} iterations")
            return z

        if (y - mu_next) @ (mu_next - mu) > 0:
            t = 1.0
        t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = mu_next + ((t - 1.0) / t_next) * (mu_next - mu)
        mu, t = mu_next, t_next

    raise BudgetExceededError(
        f"qp_solve did not reach tolerance {tol:g} in {max_iter} iterations",
        best_iterate=best_z,
        residual=best_residual,
    )


def project_polyhedron(
    y: np.ndarray, G: np.ndarray, h: np.ndarray, tol: float = 1e-9
) -> np.ndarray:
    """Euclidean projection of y onto {z : Gz ≥ h}."""
    y = np.asarray(y, dtype=float)
    return qp_solve(2.0 * np.ones(y.size), -2.0 * y, G, h, tol=tol)
