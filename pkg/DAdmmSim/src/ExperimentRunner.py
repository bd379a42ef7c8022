"""
Experiment orchestration. An experiment is a set of cells, one per
(network, algorithm, ρ), run concurrently in worker threads. Every cell writes
its error trace; the summary, best-ρ and failure tables are written sorted,
so the output files do not depend on the order in which cells finish.
"""

import asyncio
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from tqdm.asyncio import tqdm

from .DistributedOptimizer import (
    DAdmm,
    DistributedOptimizer,
    DistributedSubgradient,
    InnerRule,
    LinearConsensus,
    MmGaussSeidel,
    RunTrace,
    StopRule,
    ZhuAdmm,
    diminishing_step,
    metropolis_weights,
    schizas_steps,
)
from .errors import ConfigurationError, DAdmmError
from .NetworkGraph import Coloring, Graph, build_network, greedy_color, network_suite
from .ProblemFactory import ConsensusInstance, ProblemInstance, build_instance
from .utils.config_utils import (
    DEFAULT_MAX_WORKERS,
    DEFAULT_OUT_DIR,
    ExperimentConfig,
    NetworkSpec,
    ProblemSpec,
    RunSpec,
)
from .utils.logger_utils import get_logger

logger = get_logger(__name__, "INFO")

SUMMARY_COLUMNS = [
    "network",
    "algorithm",
    "rho",
    "steps",
    "final_rel_error",
    "messages",
]
BEST_COLUMNS = ["network", "algorithm", "best_rho", "best_steps", "messages"]
FAILURE_COLUMNS = ["network", "algorithm", "rho", "error"]
FIGURE2_ALGORITHMS = ["d-admm", "zhu-admm", "mm-ngs", "subgradient", "linear-consensus"]


@dataclass(frozen=True)
class Cell:
    network: str
    algorithm: str
    rho: Optional[float]


@dataclass(frozen=True)
class CellResult:
    network: str
    algorithm: str
    rho: Optional[float]
    steps: int
    final_rel_error: float
    messages: int
    termination: str
    trace: Optional[RunTrace] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CellFailure:
    network: str
    algorithm: str
    rho: Optional[float]
    error: str


def _format_rho(rho: Optional[float]) -> str:
    return "" if rho is None else f"{rho:g}"


def _sort_key(row: Union[CellResult, CellFailure]):
    return (row.network, row.algorithm, -math.inf if row.rho is None else row.rho)


@dataclass
class ExperimentResult:
    cells: list[CellResult] = field(default_factory=list)
    failures: list[CellFailure] = field(default_factory=list)
    repetition: int = 0

    def sorted_cells(self) -> list[CellResult]:
        return sorted(self.cells, key=_sort_key)

    def best(self) -> list[CellResult]:
        """
        Per (network, algorithm) the cell with the fewest steps; ties go to the
        smaller final error, then to the smaller ρ.
        """
        best: dict[tuple[str, str], CellResult] = {}
        for cell in self.sorted_cells():
            key = (cell.network, cell.algorithm)
            current = best.get(key)
            if current is None or (cell.steps, cell.final_rel_error) < (
                current.steps,
                current.final_rel_error,
            ):
                best[key] = cell
        return [best[key] for key in sorted(best)]

    def summary_frame(self) -> pd.DataFrame:
        rows = [
            [
                cell.network,
                cell.algorithm,
                _format_rho(cell.rho),
                cell.steps,
                f"{cell.final_rel_error:.8e}",
                cell.messages,
            ]
            for cell in self.sorted_cells()
        ]
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    def best_frame(self) -> pd.DataFrame:
        rows = [
            [
                cell.network,
                cell.algorithm,
                _format_rho(cell.rho),
                cell.steps,
                cell.messages,
            ]
            for cell in self.best()
        ]
        return pd.DataFrame(rows, columns=BEST_COLUMNS)

    def failure_frame(self) -> pd.DataFrame:
        rows = [
            [
                failure.network,
                failure.algorithm,
                _format_rho(failure.rho),
                failure.error,
            ]
            for failure in sorted(self.failures, key=_sort_key)
        ]
        return pd.DataFrame(rows, columns=FAILURE_COLUMNS)


def emit_summary_csv(res: ExperimentResult, path: Union[str, Path]) -> None:
    res.summary_frame().to_csv(path, index=False)
    logger.info(f"Wrote summary with {len(res.cells)} rows to {path}")


class ExperimentRunner:
    def __init__(self, config: ExperimentConfig, repetition: int = 0):
        if not config.run.algorithms:
            raise ConfigurationError("nothing to run")
        if (
            "linear-consensus" in config.run.algorithms
            and config.problem.family != "consensus"
        ):
            raise ConfigurationError("linear-consensus only applies to consensus")

        self.config = config
        self.repetition = repetition
        self.network_seed = config.network.seed + repetition
        self.problem_seed = config.problem.seed + repetition
        self.out_dir = Path(config.run.out_dir or DEFAULT_OUT_DIR)
        self.semaphore = asyncio.Semaphore(
            config.run.max_workers or DEFAULT_MAX_WORKERS
        )
        self.logger = get_logger(self.__class__.__name__, "INFO")

        self.networks: dict[str, tuple[Graph, Coloring]] = {}
        self.instance: Optional[ProblemInstance] = None

    @property
    def suffix(self) -> str:
        return "" if self.config.run.seeds == 1 else f"_seed{self.repetition}"

    @property
    def trace_dir(self) -> Path:
        traces = self.out_dir / "traces"
        if self.config.run.seeds == 1:
            return traces
        return traces / f"seed{self.repetition}"

    def build_networks(self) -> None:
        spec = self.config.network
        try:
            if spec.model == "suite":
                labelled = network_suite(spec.nodes, self.network_seed)
            else:
                g = build_network(
                    spec.model, spec.nodes, self.network_seed, **spec.generator_params()
                )
                labelled = [(spec.model, g)]
        except ValueError as e:
            raise ConfigurationError(f"Invalid network: {e}") from e
        for label, g in labelled:
            coloring = greedy_color(g)
            self.networks[label] = (g, coloring)
            self.logger.info(
                f"Network {label}: {g.node_count} nodes, {g.edge_count} edges, "
                f"{coloring.count} colors"
            )

    def build_instance(self) -> None:
        spec = self.config.problem
        try:
            self.instance = build_instance(
                spec.family,
                self.config.network.nodes,
                self.problem_seed,
                **spec.generator_params(),
            )
        except ValueError as e:
            raise ConfigurationError(f"Invalid problem: {e}") from e
        # Computed here so the worker threads only read it.
        reference = self.instance.reference
        self.logger.info(
            f"Built {spec.family} instance, reference of dimension {reference.size}"
        )

    def cells(self) -> list[Cell]:
        cells = []
        for label in self.networks:
            for algorithm in self.config.run.algorithms:
                if algorithm == "linear-consensus":
                    cells.append(Cell(label, algorithm, None))
                else:
                    cells.extend(
                        Cell(label, algorithm, rho) for rho in self.config.run.rho
                    )
        return cells

    def _optimizer(self, cell: Cell, stop: StopRule) -> DistributedOptimizer:
        g, coloring = self.networks[cell.network]
        run = self.config.run
        if cell.algorithm == "linear-consensus":
            assert isinstance(self.instance, ConsensusInstance)
            return LinearConsensus(self.instance.theta, g, metropolis_weights(g), stop)

        problems = self.instance.node_problems()
        if cell.algorithm == "d-admm":
            return DAdmm(problems, g, coloring, cell.rho, stop)
        if cell.algorithm == "zhu-admm":
            return ZhuAdmm(problems, g, cell.rho, stop, self_term=run.zhu_self_term)
        if cell.algorithm == "mm-ngs":
            inner = InnerRule(
                tol=run.inner_tol,
                max_sweeps=run.inner_max_sweeps,
                forcing=run.inner_forcing,
            )
            return MmGaussSeidel(problems, g, coloring, cell.rho, inner, stop)
        if cell.algorithm == "subgradient":
            # The grid value is the initial step α₀.
            return DistributedSubgradient(
                problems, g, metropolis_weights(g), diminishing_step(cell.rho), stop
            )
        raise ConfigurationError(f"Unknown algorithm '{cell.algorithm}'")

    def run_cell(self, cell: Cell) -> Union[CellResult, CellFailure]:
        g, _ = self.networks[cell.network]
        stop = StopRule(
            self.instance.reference,
            tol=self.config.run.tol,
            max_steps=self.config.max_steps,
        )
        try:
            trace = self._optimizer(cell, stop).run()
        except DAdmmError as e:
            self.logger.error(
                f"Cell {cell.network}/{cell.algorithm}/rho={_format_rho(cell.rho)} "
                f"failed: {e}"
            )
            return CellFailure(cell.network, cell.algorithm, cell.rho, str(e))

        rho_tag = _format_rho(cell.rho)
        name = f"{cell.network}__{cell.algorithm}"
        file_name = f"{name}__rho{rho_tag}.csv" if rho_tag else f"{name}.csv"
        trace.write_csv(self.trace_dir / file_name)
        if trace.termination.value != "reached_tol":
            self.logger.warning(
                f"{cell.network}/{cell.algorithm}/rho={rho_tag} stopped at "
                f"{trace.steps} steps with error {trace.final_error:.3e}"
            )
        return CellResult(
            network=cell.network,
            algorithm=cell.algorithm,
            rho=cell.rho,
            steps=trace.steps,
            final_rel_error=trace.final_error,
            messages=2 * g.edge_count * trace.steps,
            termination=trace.termination.value,
            trace=trace,
        )

    async def _run_cell_async(self, cell: Cell, progress_bar: tqdm):
        async with self.semaphore:
            outcome = await asyncio.to_thread(self.run_cell, cell)
            progress_bar.update(1)
            return outcome

    async def run_async(self) -> ExperimentResult:
        self.build_networks()
        self.build_instance()
        self.trace_dir.mkdir(parents=True, exist_ok=True)

        cells = self.cells()
        progress_bar = tqdm(total=len(cells), desc="Experiment cells")
        outcomes = await asyncio.gather(
            *(self._run_cell_async(cell, progress_bar) for cell in cells)
        )
        progress_bar.close()

        result = ExperimentResult(repetition=self.repetition)
        for outcome in outcomes:
            if isinstance(outcome, CellFailure):
                result.failures.append(outcome)
            else:
                result.cells.append(outcome)
        self.write_outputs(result)
        self.logger.info(
            f"Experiment finished: {len(result.cells)} cells, "
            f"{len(result.failures)} failures"
        )
        return result

    def write_outputs(self, result: ExperimentResult) -> None:
        emit_summary_csv(result, self.out_dir / f"summary{self.suffix}.csv")
        result.best_frame().to_csv(self.out_dir / f"best{self.suffix}.csv", index=False)
        if result.failures:
            result.failure_frame().to_csv(
                self.out_dir / f"failures{self.suffix}.csv", index=False
            )

    def run(self) -> ExperimentResult:
        return asyncio.run(self.run_async())


def run_experiment(cfg: ExperimentConfig, repetition: int = 0) -> ExperimentResult:
    return ExperimentRunner(cfg, repetition).run()


def run_all(cfg: ExperimentConfig) -> list[ExperimentResult]:
    """One experiment per repetition, seeds shifted by the repetition index."""
    return [run_experiment(cfg, repetition) for repetition in range(cfg.run.seeds)]


def suite_figure2(
    P: int,
    seed: int = 0,
    out_dir: Union[str, Path] = DEFAULT_OUT_DIR,
    tol: float = 1e-4,
    max_steps: int = 1000,
    max_workers: int = DEFAULT_MAX_WORKERS,
    algorithms: Optional[list[str]] = None,
) -> pd.DataFrame:
    """
    Consensus on the seven-network suite with every algorithm, reduced to the
    best-ρ step count per network. Adds the "schizas" row at twice Zhu's count.
    """
    config = ExperimentConfig(
        network=NetworkSpec(model="suite", nodes=P, seed=seed),
        problem=ProblemSpec(family="consensus", seed=seed),
        run=RunSpec(
            algorithms=algorithms or FIGURE2_ALGORITHMS,
            tol=tol,
            max_steps=max_steps,
            out_dir=str(out_dir),
            max_workers=max_workers,
        ),
    )
    runner = ExperimentRunner(config)
    result = runner.run()

    table = result.best_frame()
    zhu = table[table["algorithm"] == "zhu-admm"]
    if not zhu.empty:
        schizas = zhu.assign(
            algorithm="schizas",
            best_steps=zhu["best_steps"].map(schizas_steps),
            messages=zhu["messages"] * 2,
        )
        table = pd.concat([table, schizas], ignore_index=True)
        table = table.sort_values(["network", "algorithm"], kind="stable").reset_index(
            drop=True
        )
    table.to_csv(Path(out_dir) / "figure2.csv", index=False)
    logger.info(f"Wrote figure2 table for P={P} to {out_dir}")
    return table
