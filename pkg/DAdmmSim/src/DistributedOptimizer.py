"""
Distributed optimizers over a simulated synchronous-round network.

Every algorithm shares the round loop of DistributedOptimizer: one call to
communication_step is one round in which each node broadcasts its estimate
once, and the relative error against the stop rule's reference is recorded
after every round.
"""

import copy
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .errors import ConfigurationError, DAdmmError, NodeSolveError, NonFiniteError
from .NetworkGraph import Coloring, Graph, incidence_matrix
from .utils.logger_utils import get_logger

NodeSolve = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class NodeProblem:
    """
    What node p privately knows: solve(v, c) returns
    argmin_{x ∈ X_p} f_p(x) + vᵀx + c‖x‖². The subgradient and projection
    oracles are only needed by the subgradient baseline.
    """

    index: int
    dimension: int
    solve: NodeSolve
    subgradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass
class AlgorithmState:
    x: np.ndarray
    gamma: np.ndarray
    edge_duals: Optional[np.ndarray] = None
    comm_steps: int = 0
    iterations: int = 0

    def snapshot(self) -> "AlgorithmState":
        return copy.deepcopy(self)


class Termination(str, Enum):
    REACHED_TOL = "reached_tol"
    MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class StopRule:
    reference: np.ndarray
    tol: float = 1e-4
    max_steps: int = 1000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("Stop tolerance must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        object.__setattr__(
            self, "reference", np.atleast_1d(np.asarray(self.reference, dtype=float))
        )

    def relative_error(self, x: np.ndarray) -> float:
        """‖x − 1_P⊗x*‖ / (√P‖x*‖), or the distance over √P when x* = 0."""
        node_count = x.shape[0]
        distance = float(np.linalg.norm(x - self.reference[None, :]))
        scale = float(np.linalg.norm(self.reference))
        if scale == 0.0:
            scale = 1.0
        return distance / (math.sqrt(node_count) * scale)


@dataclass
class RunTrace:
    algorithm: str
    records: list[tuple[int, float]]
    termination: Termination
    estimate: np.ndarray
    state: AlgorithmState

    @property
    def steps(self) -> int:
        return self.records[-1][0] if self.records else 0

    @property
    def final_error(self) -> float:
        return self.records[-1][1] if self.records else float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=["step", "rel_error"])

    def write_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.8e")


@dataclass(frozen=True)
class InnerRule:
    """
    Inner Gauss-Seidel stop: the sweep change falls below `tol` relative to
    the iterate, or below `forcing` times the primal residual ‖Bᵀx‖, or the
    sweep count reaches `max_sweeps`.
    """

    tol: float = 1e-6
    max_sweeps: int = 50
    forcing: float = 0.1

    def __post_init__(self):
        if self.tol <= 0 or self.forcing < 0:
            raise ValueError("Inner tol must be positive and forcing nonnegative")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


class DistributedOptimizer:
    name = "distributed"

    def __init__(
        self,
        g: Graph,
        stop: StopRule,
        dimension: int,
        callback: Optional[Callable[[AlgorithmState], None]] = None,
        initial: Optional[np.ndarray] = None,
    ):
        self.graph = g
        self.stop = stop
        self.dimension = dimension
        self.callback = callback
        self.initial = initial
        self.degrees = g.degrees
        self.neighbor_index = [list(g.neighbors(p)) for p in range(g.node_count)]
        self.logger = get_logger(self.__class__.__name__, "INFO")
        if stop.reference.size != dimension:
            raise ConfigurationError(
                f"Reference has {stop.reference.size} entries, nodes hold {dimension}"
            )

    def _check_problems(self, problems: Sequence[NodeProblem]) -> None:
        if len(problems) != self.graph.node_count:
            raise ConfigurationError(
                f"{len(problems)} node problems for a "
                f"{self.graph.node_count}-node graph"
            )
        for problem in problems:
            if problem.dimension != self.dimension:
                raise ConfigurationError(
                    f"Node {problem.index} has dimension {problem.dimension}, "
                    f"expected {self.dimension}"
                )

    def initial_state(self) -> AlgorithmState:
        shape = (self.graph.node_count, self.dimension)
        x = np.zeros(shape) if self.initial is None else np.array(self.initial, float)
        return AlgorithmState(x=x.reshape(shape), gamma=np.zeros(shape))

    def _solve(self, problem: NodeProblem, v: np.ndarray, c: float, iteration: int):
        try:
            return np.asarray(problem.solve(v, c), dtype=float)
        except (DAdmmError, ArithmeticError, ValueError) as e:
            self.logger.error(
                f"Node {problem.index} failed at iteration {iteration}: {e}"
            )
            raise NodeSolveError(problem.index, iteration, e) from e

    def _update_gamma(self, state: AlgorithmState, rho: float) -> None:
        x = state.x
        for p, neighbors in enumerate(self.neighbor_index):
            state.gamma[p] = state.gamma[p] + rho * (
                self.degrees[p] * x[p] - x[neighbors].sum(axis=0)
            )

    def communication_step(self, state: AlgorithmState) -> None:
        raise NotImplementedError

    def run(self) -> RunTrace:
        state = self.initial_state()
        records: list[tuple[int, float]] = []
        termination = Termination.MAX_STEPS
        for _ in range(self.stop.max_steps):
            self.communication_step(state)
            state.comm_steps += 1
            error = self.stop.relative_error(state.x)
            if not math.isfinite(error):
                raise NonFiniteError(
                    f"{self.name} diverged at step {state.comm_steps}",
                    best_iterate=state.x,
                )
            records.append((state.comm_steps, error))
            self.logger.debug(f"step {state.comm_steps}: relative error {error:.3e}")
            if self.callback is not None:
                self.callback(state.snapshot())
            if error <= self.stop.tol:
                termination = Termination.REACHED_TOL
                break

        self.logger.info(
            f"{self.name} finished after {state.comm_steps} communication steps "
            f"({termination.value}), relative error {records[-1][1]:.3e}"
        )
        return RunTrace(
            algorithm=self.name,
            records=records,
            termination=termination,
            estimate=state.x.copy(),
            state=state,
        )


class DAdmm(DistributedOptimizer):
    """
    D-ADMM: color classes update one after another, each node using the
    fresh estimates of lower-colored neighbors and the previous ones of
    higher-colored neighbors. With two colors this is the bipartite variant.
    """

    name = "d-admm"

    def __init__(
        self,
        problems: Sequence[NodeProblem],
        g: Graph,
        col: Coloring,
        rho: float,
        stop: StopRule,
        callback: Optional[Callable[[AlgorithmState], None]] = None,
    ):
        if rho <= 0:
            raise ValueError("rho must be positive")
        if not col.is_proper(g):
            raise ConfigurationError("D-ADMM needs a proper coloring")
        super().__init__(g, stop, problems[0].dimension, callback)
        self._check_problems(problems)
        self.problems = problems
        self.coloring = col
        self.rho = rho

    def communication_step(self, state: AlgorithmState) -> None:
        iteration = state.iterations + 1
        x = state.x
        # Updating x in place is safe: nodes of one class are never neighbors.
        for members in self.coloring.classes:
            for p in members:
                neighbors = self.neighbor_index[p]
                v = state.gamma[p] - self.rho * x[neighbors].sum(axis=0)
                x[p] = self._solve(
                    self.problems[p], v, self.degrees[p] * self.rho / 2, iteration
                )
        self._update_gamma(state, self.rho)
        state.iterations = iteration


class ZhuAdmm(DistributedOptimizer):
    """
    Synchronous ADMM: every node solves at once from the previous round's
    estimates, with quadratic coefficient ρD_p.

    self_term="single", the default, counts x_p once in the sum over N_p ∪ {p}.
    self_term="degree" builds v_p = γ_p − ρ(D_p x_p + Σ_{j∈N_p} x_j), whose
    fixed point is the optimum on every graph; experiments use it.
    """

    name = "zhu-admm"

    def __init__(
        self,
        problems: Sequence[NodeProblem],
        g: Graph,
        rho: float,
        stop: StopRule,
        callback: Optional[Callable[[AlgorithmState], None]] = None,
        self_term: Literal["degree", "single"] = "single",
    ):
        if rho <= 0:
            raise ValueError("rho must be positive")
        if self_term not in ("degree", "single"):
            raise ValueError(f"Unknown self_term '{self_term}'")
        super().__init__(g, stop, problems[0].dimension, callback)
        self._check_problems(problems)
        self.problems = problems
        self.rho = rho
        self.self_term = self_term

    def communication_step(self, state: AlgorithmState) -> None:
        iteration = state.iterations + 1
        previous = state.x.copy()
        for p, neighbors in enumerate(self.neighbor_index):
            weight = self.degrees[p] if self.self_term == "degree" else 1
            v = state.gamma[p] - self.rho * (
                weight * previous[p] + previous[neighbors].sum(axis=0)
            )
            state.x[p] = self._solve(
                self.problems[p], v, self.rho * self.degrees[p], iteration
            )
        self._update_gamma(state, self.rho)
        state.iterations = iteration


def metropolis_weights(g: Graph) -> np.ndarray:
    degrees = g.degrees
    weights = np.zeros((g.node_count, g.node_count))
    for i, j in g.edges:
        weights[i, j] = weights[j, i] = 1.0 / (1.0 + max(degrees[i], degrees[j]))
    np.fill_diagonal(weights, 1.0 - weights.sum(axis=1))
    return weights


def diminishing_step(alpha0: float) -> Callable[[int], float]:
    """α^k = α₀/√k."""
    if alpha0 < 0:
        raise ValueError("alpha0 must be nonnegative")
    return lambda k: alpha0 / math.sqrt(k)


class DistributedSubgradient(DistributedOptimizer):
    name = "subgradient"

    def __init__(
        self,
        problems: Sequence[NodeProblem],
        g: Graph,
        weights: np.ndarray,
        step_schedule: Callable[[int], float],
        stop: StopRule,
        callback: Optional[Callable[[AlgorithmState], None]] = None,
        initial: Optional[np.ndarray] = None,
    ):
        super().__init__(g, stop, problems[0].dimension, callback, initial)
        self._check_problems(problems)
        missing = [
            problem.index
            for problem in problems
            if problem.subgradient is None or problem.project is None
        ]
        if missing:
            raise ConfigurationError(
                f"Subgradient method needs subgradient and projection oracles; "
                f"missing at nodes {missing}"
            )
        self._check_weights(weights)
        self.problems = problems
        self.weights = weights
        self.step_schedule = step_schedule

    def _check_weights(self, weights: np.ndarray) -> None:
        P = self.graph.node_count
        if weights.shape != (P, P):
            raise ConfigurationError(f"Weights must be {P}x{P}")
        allowed = self.graph.adjacency_matrix() + np.eye(P)
        if np.any(weights < -1e-12) or np.any(weights[allowed == 0] != 0):
            raise ConfigurationError("Weights must be nonnegative on the graph pattern")
        if not (
            np.allclose(weights.sum(axis=0), 1.0, atol=1e-9)
            and np.allclose(weights.sum(axis=1), 1.0, atol=1e-9)
        ):
            raise ConfigurationError("Weights must be doubly stochastic")

    def communication_step(self, state: AlgorithmState) -> None:
        iteration = state.iterations + 1
        alpha = self.step_schedule(iteration)
        mixed = self.weights @ state.x
        for p, problem in enumerate(self.problems):
            try:
                direction = problem.subgradient(mixed[p])
                state.x[p] = problem.project(mixed[p] - alpha * direction)
            except (DAdmmError, ArithmeticError, ValueError) as e:
                raise NodeSolveError(p, iteration, e) from e
        state.iterations = iteration


class MmGaussSeidel(DistributedOptimizer):
    """
    Double loop: the outer loop is the method of multipliers on the edge
    duals λ_{ij}, the inner loop nonlinear Gauss-Seidel sweeps in color
    order. Every sweep is one communication step.
    """

    name = "mm-ngs"

    def __init__(
        self,
        problems: Sequence[NodeProblem],
        g: Graph,
        col: Coloring,
        rho: float,
        inner: InnerRule,
        stop: StopRule,
        callback: Optional[Callable[[AlgorithmState], None]] = None,
    ):
        if rho <= 0:
            raise ValueError("rho must be positive")
        if not col.is_proper(g):
            raise ConfigurationError("Gauss-Seidel sweeps need a proper coloring")
        super().__init__(g, stop, problems[0].dimension, callback)
        self._check_problems(problems)
        self.problems = problems
        self.coloring = col
        self.rho = rho
        self.inner = inner
        self.incidence = incidence_matrix(g).matrix
        self.sweeps = 0

    def initial_state(self) -> AlgorithmState:
        self.sweeps = 0
        state = super().initial_state()
        state.edge_duals = np.zeros((self.graph.edge_count, self.dimension))
        return state

    def communication_step(self, state: AlgorithmState) -> None:
        iteration = state.iterations + 1
        x = state.x
        previous = x.copy()
        for members in self.coloring.classes:
            for p in members:
                neighbors = self.neighbor_index[p]
                v = state.gamma[p] - self.rho * x[neighbors].sum(axis=0)
                x[p] = self._solve(
                    self.problems[p], v, self.degrees[p] * self.rho / 2, iteration
                )
        self.sweeps += 1

        change = float(np.linalg.norm(x - previous))
        residual = float(np.linalg.norm(self.incidence.T @ x))
        threshold = max(
            self.inner.tol * (1.0 + float(np.linalg.norm(previous))),
            self.inner.forcing * residual,
        )
        settled = change <= threshold
        if settled or self.sweeps >= self.inner.max_sweeps:
            # λ_{ij} += ρ(x_i − x_j) with i < j, i.e. λ += ρ Bᵀx.
            state.edge_duals += self.rho * (self.incidence.T @ x)
            state.gamma = self.incidence @ state.edge_duals
            self.logger.debug(
                f"outer iteration {iteration} after {self.sweeps} sweeps"
            )
            self.sweeps = 0
            state.iterations = iteration


class LinearConsensus(DistributedOptimizer):
    """Classical averaging x^{k+1} = W x^k from x^0 = θ."""

    name = "linear-consensus"

    def __init__(
        self,
        theta: np.ndarray,
        g: Graph,
        weights: np.ndarray,
        stop: StopRule,
        callback: Optional[Callable[[AlgorithmState], None]] = None,
    ):
        theta = np.asarray(theta, dtype=float).reshape(g.node_count, -1)
        super().__init__(g, stop, theta.shape[1], callback, initial=theta)
        self.weights = weights

    def communication_step(self, state: AlgorithmState) -> None:
        state.x = self.weights @ state.x
        state.iterations += 1


def d_admm(
    problems: Sequence[NodeProblem],
    g: Graph,
    col: Coloring,
    rho: float,
    stop: StopRule,
    callback: Optional[Callable[[AlgorithmState], None]] = None,
) -> RunTrace:
    return DAdmm(problems, g, col, rho, stop, callback).run()


def zhu_admm(
    problems: Sequence[NodeProblem],
    g: Graph,
    rho: float,
    stop: StopRule,
    callback: Optional[Callable[[AlgorithmState], None]] = None,
    self_term: Literal["degree", "single"] = "single",
) -> RunTrace:
    return ZhuAdmm(problems, g, rho, stop, callback, self_term).run()


def subgradient(
    problems: Sequence[NodeProblem],
    g: Graph,
    weights: np.ndarray,
    step_schedule: Callable[[int], float],
    stop: StopRule,
    callback: Optional[Callable[[AlgorithmState], None]] = None,
    initial: Optional[np.ndarray] = None,
) -> RunTrace:
    return DistributedSubgradient(
        problems, g, weights, step_schedule, stop, callback, initial
    ).run()


def mm_gauss_seidel(
    problems: Sequence[NodeProblem],
    g: Graph,
    col: Coloring,
    rho: float,
    inner: InnerRule,
    stop: StopRule,
    callback: Optional[Callable[[AlgorithmState], None]] = None,
) -> RunTrace:
    return MmGaussSeidel(problems, g, col, rho, inner, stop, callback).run()


def linear_consensus(
    theta: np.ndarray,
    g: Graph,
    weights: np.ndarray,
    stop: StopRule,
    callback: Optional[Callable[[AlgorithmState], None]] = None,
) -> RunTrace:
    return LinearConsensus(theta, g, weights, stop, callback).run()


def comm_steps_total(trace: RunTrace, g: Graph) -> int:
    return 2 * g.edge_count * trace.steps


def schizas_steps(zhu_steps: int) -> int:
    """Two communication steps per iteration, iteration count as Zhu's."""
    return 2 * zhu_steps
