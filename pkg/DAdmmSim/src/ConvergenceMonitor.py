"""
Post-run diagnostics computed from the per-step snapshots of an ADMM run:
edge duals, primal residuals and the Lyapunov sequence of the two-color
(bipartite) case.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .DistributedOptimizer import AlgorithmState
from .NetworkGraph import Coloring, Graph, incidence_matrix
from .utils.logger_utils import get_logger

logger = get_logger(__name__, "INFO")


@dataclass
class IterateRecorder:
    """Callback collecting every snapshot a run hands out."""

    states: list[AlgorithmState] = field(default_factory=list)

    def __call__(self, state: AlgorithmState) -> None:
        self.states.append(state)

    def __len__(self) -> int:
        return len(self.states)


def edge_duals(
    states: Sequence[AlgorithmState], g: Graph, rho: float
) -> list[np.ndarray]:
    """
    Rebuilds λ^k from the iterates with λ^0 = 0 and
    λ^{k+1} = λ^k + ρ(Bᵀ⊗I)x̄^{k+1}. Entry k belongs to states[k].
    """
    B = incidence_matrix(g).matrix
    duals = []
    lam = None
    for state in states:
        step = rho * (B.T @ state.x)
        lam = step if lam is None else lam + step
        duals.append(lam.copy())
    return duals


def primal_residuals(states: Sequence[AlgorithmState], g: Graph) -> np.ndarray:
    B = incidence_matrix(g).matrix
    return np.array([np.linalg.norm(B.T @ state.x) for state in states])


def lyapunov_sequence(
    states: Sequence[AlgorithmState],
    g: Graph,
    col: Coloring,
    rho: float,
    x_star: np.ndarray,
    lam_star: np.ndarray,
) -> np.ndarray:
    """
    V^k = (1/ρ)‖λ^k − λ*‖² + ρ Σ_p D_p ‖x_p^k − x_p*‖², p over the second class.

    Only defined for two colors, where D-ADMM is two-block ADMM and V is
    nonincreasing.
    """
    if col.count != 2:
        raise ValueError(
            f"Lyapunov sequence needs a 2-coloring, got {col.count} colors"
        )
    x_star = np.asarray(x_star, dtype=float)
    if x_star.ndim == 1:
        x_star = np.broadcast_to(x_star, (g.node_count, x_star.size))
    lam_star = np.asarray(lam_star, dtype=float).reshape(g.edge_count, -1)

    second = list(col.classes[1])
    weights = g.degrees[second].astype(float)
    values = []
    for state, lam in zip(states, edge_duals(states, g, rho)):
        dual_term = float(np.sum((lam - lam_star) ** 2)) / rho
        gaps = np.sum((state.x[second] - x_star[second]) ** 2, axis=1)
        values.append(dual_term + rho * float(weights @ gaps))

    sequence = np.array(values)
    increases = int(np.sum(np.diff(sequence) > 0))
    if increases:
        logger.debug(f"Lyapunov sequence increased at {increases} steps")
    return sequence
