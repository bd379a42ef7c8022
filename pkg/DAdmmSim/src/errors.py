from typing import Optional

import numpy as np


class DAdmmError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigurationError(DAdmmError):
    pass


class ConnectivityError(DAdmmError):
    def __init__(self, model: str, attempts: int, last_parameter: Optional[float]):
        self.model = model
        self.attempts = attempts
        self.last_parameter = last_parameter
        super().__init__(
            f"{model}: no connected graph after {attempts} attempts "
            f"(last parameter {last_parameter})"
        )


class SolverError(DAdmmError):
    """
    Numerical kernel failure. Keeps the best iterate seen so callers can
    decide whether it is good enough.
    """

    def __init__(
        self,
        message: str,
        best_iterate: Optional[np.ndarray] = None,
        residual: float = float("nan"),
    ):
        self.best_iterate = best_iterate
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class NonFiniteError(SolverError):
    pass


class BudgetExceededError(SolverError):
    pass


class NodeSolveError(DAdmmError):
    def __init__(self, node: int, iteration: int, cause: Exception):
        self.node = node
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"node {node} failed at iteration {iteration}: {cause}")
