"""
Network topologies for the simulator: immutable graphs, the random and
deterministic generators of the experiment suite, greedy coloring and the
node-arc incidence matrix.

Nodes are indexed 0..P-1 internally. The edge-list text format is 1-based.
"""

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

import networkx as nx
import numpy as np

from .errors import ConnectivityError
from .utils.logger_utils import get_logger

logger = get_logger(__name__, "INFO")

MAX_CONNECTIVITY_ATTEMPTS = 100
DENSITY_NUDGE = 1.05

MODELS = ("erdos-renyi", "watts-strogatz", "barabasi-albert", "geometric", "lattice")


@dataclass(frozen=True)
class Graph:
    node_count: int
    edges: tuple[tuple[int, int], ...]
    _neighbors: tuple[tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("A graph needs at least one node")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"Self-loop at node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValueError(f"Edge {(i, j)} out of range for P={self.node_count}")
            if i > j:
                raise ValueError(f"Edge {(i, j)} is not stored as (smaller, larger)")
            if (i, j) in seen:
                raise ValueError(f"Duplicate edge {(i, j)}")
            seen.add((i, j))
        if list(self.edges) != sorted(self.edges):
            raise ValueError("Edges must be sorted")

        neighbors = [[] for _ in range(self.node_count)]
        for i, j in self.edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        object.__setattr__(
            self, "_neighbors", tuple(tuple(sorted(n)) for n in neighbors)
        )

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        normalized = sorted((min(i, j), max(i, j)) for i, j in edges)
        return cls(node_count=node_count, edges=tuple(normalized))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(n) for n in self._neighbors], dtype=int)

    def neighbors(self, p: int) -> tuple[int, ...]:
        return self._neighbors[p]

    def adjacency_matrix(self) -> np.ndarray:
        adjacency = np.zeros((self.node_count, self.node_count))
        for i, j in self.edges:
            adjacency[i, j] = adjacency[j, i] = 1.0
        return adjacency

    def laplacian(self) -> np.ndarray:
        return np.diag(self.degrees.astype(float)) - self.adjacency_matrix()

    def average_degree(self) -> float:
        return 2.0 * self.edge_count / self.node_count

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from(self.edges)
        return graph


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]

    def __post_init__(self):
        used = set(self.colors)
        if used != set(range(len(used))):
            raise ValueError(
                f"Colors must use every value in 0..C-1, got {sorted(used)}"
            )

    @property
    def count(self) -> int:
        return max(self.colors) + 1 if self.colors else 0

    @property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(p for p, color in enumerate(self.colors) if color == c)
            for c in range(self.count)
        )

    @property
    def node_order(self) -> tuple[int, ...]:
        """Index map listing nodes sorted by (color, index)."""
        return tuple(sorted(range(len(self.colors)), key=lambda p: (self.colors[p], p)))

    def is_proper(self, g: Graph) -> bool:
        return all(self.colors[i] != self.colors[j] for i, j in g.edges)


@dataclass(frozen=True)
class IncidenceMatrix:
    matrix: np.ndarray

    @classmethod
    def from_graph(cls, g: Graph) -> "IncidenceMatrix":
        B = np.zeros((g.node_count, g.edge_count))
        for e, (i, j) in enumerate(g.edges):
            B[i, e] = 1.0
            B[j, e] = -1.0
        return cls(matrix=B)

    def block(self, members: Iterable[int]) -> np.ndarray:
        return self.matrix[list(members), :]


def _retry_until_connected(
    model: str,
    build: Callable[[float], Graph],
    parameter: Optional[float],
    nudge: Callable[[float], float],
) -> Graph:
    for attempt in range(1, MAX_CONNECTIVITY_ATTEMPTS + 1):
        graph = build(parameter)
        if is_connected(graph):
            if attempt > 1:
                logger.info(f"{model}: connected after {attempt} attempts")
            return graph
        next_parameter = nudge(parameter)
        logger.warning(
            f"{model}: attempt {attempt} disconnected, retrying with "
            f"parameter {next_parameter}"
        )
        parameter = next_parameter
    raise ConnectivityError(model, MAX_CONNECTIVITY_ATTEMPTS, parameter)


def gen_erdos_renyi(P: int, p: float, seed: int) -> Graph:
    if P < 2:
        raise ValueError("Erdos-Renyi needs P >= 2")
    if not 0 < p <= 1:
        raise ValueError("Edge probability must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(P), 2))

    def build(probability: float) -> Graph:
        draws = rng.random(len(pairs))
        return Graph.from_edges(
            P, [pair for pair, u in zip(pairs, draws) if u < probability]
        )

    return _retry_until_connected(
        "erdos-renyi", build, p, lambda q: min(1.0, DENSITY_NUDGE * q)
    )


def gen_watts_strogatz(P: int, n: int, p: float, seed: int) -> Graph:
    if n < 2 or n % 2:
        raise ValueError("Watts-Strogatz needs an even neighbor count n >= 2")
    if P <= n:
        raise ValueError("Watts-Strogatz needs P > n")
    if not 0 <= p <= 1:
        raise ValueError("Rewiring probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    lattice = [(i, (i + s) % P) for i in range(P) for s in range(1, n // 2 + 1)]

    def build(probability: float) -> Graph:
        edge_set = {frozenset(edge) for edge in lattice}
        for i, j in lattice:
            if rng.random() >= probability:
                continue
            keep = i if rng.random() < 0.5 else j
            edge_set.discard(frozenset((i, j)))
            candidates = [
                q
                for q in range(P)
                if q != keep and frozenset((keep, q)) not in edge_set
            ]
            if not candidates:
                edge_set.add(frozenset((i, j)))
                continue
            partner = int(rng.choice(candidates))
            edge_set.add(frozenset((keep, partner)))
        return Graph.from_edges(P, [tuple(edge) for edge in edge_set])

    # Retries redraw the rewiring with p unchanged.
    return _retry_until_connected("watts-strogatz", build, p, lambda q: q)


def gen_barabasi_albert(P: int, seed: int) -> Graph:
    if P < 3:
        raise ValueError("Barabasi-Albert needs P >= 3")
    rng = np.random.default_rng(seed)
    edges = [(0, 1)]
    degrees = np.zeros(P)
    degrees[[0, 1]] = 1.0
    for new in range(2, P):
        weights = degrees[:new] / degrees[:new].sum()
        targets = rng.choice(new, size=2, replace=False, p=weights)
        for target in targets:
            edges.append((int(target), new))
            degrees[target] += 1.0
        degrees[new] = 2.0
    return Graph.from_edges(P, edges)


def gen_geometric(P: int, d: float, seed: int) -> Graph:
    if P < 2:
        raise ValueError("Geometric graphs need P >= 2")
    if d <= 0:
        raise ValueError("Connection radius must be positive")
    rng = np.random.default_rng(seed)

    def build(radius: float) -> Graph:
        points = rng.random((P, 2))
        distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
        return Graph.from_edges(
            P,
            [
                (i, j)
                for i, j in itertools.combinations(range(P), 2)
                if distances[i, j] < radius
            ],
        )

    return _retry_until_connected(
        "geometric", build, d, lambda radius: DENSITY_NUDGE * radius
    )


def lattice_shape(P: int) -> tuple[int, int]:
    rows = max(m for m in range(1, math.isqrt(P) + 1) if P % m == 0)
    return rows, P // rows


def gen_lattice(P: int) -> Graph:
    if P < 2:
        raise ValueError("A lattice needs P >= 2")
    rows, cols = lattice_shape(P)
    grid = nx.grid_2d_graph(rows, cols)
    return Graph.from_edges(
        P, [(r1 * cols + c1, r2 * cols + c2) for (r1, c1), (r2, c2) in grid.edges()]
    )


def is_connected(g: Graph) -> bool:
    return nx.is_connected(g.to_networkx())


def greedy_color(g: Graph) -> Coloring:
    """
    Largest-degree-first greedy coloring. Ties keep node index order, so the
    result is deterministic.
    """
    assignment = nx.greedy_color(g.to_networkx(), strategy="largest_first")
    coloring = Coloring(colors=tuple(assignment[p] for p in range(g.node_count)))
    if not coloring.is_proper(g):
        raise RuntimeError("Greedy coloring produced an improper coloring")
    logger.debug(f"Colored {g.node_count} nodes with {coloring.count} colors")
    return coloring


def incidence_matrix(g: Graph) -> IncidenceMatrix:
    return IncidenceMatrix.from_graph(g)


def build_network(model: str, P: int, seed: int = 0, **params) -> Graph:
    if model == "erdos-renyi":
        return gen_erdos_renyi(P, params.get("p", 0.25), seed)
    if model == "watts-strogatz":
        return gen_watts_strogatz(P, params.get("n", 4), params.get("p", 0.8), seed)
    if model == "barabasi-albert":
        return gen_barabasi_albert(P, seed)
    if model == "geometric":
        return gen_geometric(P, params.get("d", 0.2), seed)
    if model == "lattice":
        return gen_lattice(P)
    raise ValueError(f"Unknown network model '{model}', expected one of {MODELS}")


# The seven (label, model, parameters) rows of the network table. Labels give
# Watts-Strogatz neighbors per side; `n` is the ring degree, twice that.
NETWORK_TABLE: tuple[tuple[str, str, dict], ...] = (
    ("1-erdos-renyi-0.25", "erdos-renyi", {"p": 0.25}),
    ("2-erdos-renyi-0.75", "erdos-renyi", {"p": 0.75}),
    ("3-watts-strogatz-2-0.8", "watts-strogatz", {"n": 4, "p": 0.8}),
    ("4-watts-strogatz-4-0.6", "watts-strogatz", {"n": 8, "p": 0.6}),
    ("5-barabasi-albert", "barabasi-albert", {}),
    ("6-geometric-0.2", "geometric", {"d": 0.2}),
    ("7-lattice", "lattice", {}),
)


def network_suite(P: int, seed: int = 0) -> list[tuple[str, Graph]]:
    seeds = np.random.SeedSequence(seed).generate_state(len(NETWORK_TABLE))
    return [
        (label, build_network(model, P, int(s), **params))
        for (label, model, params), s in zip(NETWORK_TABLE, seeds)
    ]


def write_edge_list(g: Graph, path: Union[str, Path]) -> None:
    lines = [f"{g.node_count} {g.edge_count}"]
    lines += [f"{i + 1} {j + 1}" for i, j in g.edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote {g.edge_count} edges to {path}")


def read_edge_list(path: Union[str, Path]) -> Graph:
    rows = Path(path).read_text(encoding="utf-8").split("\n")
    rows = [row for row in rows if row.strip()]
    if not rows:
        raise ValueError(f"Empty edge-list file {path}")
    node_count, edge_count = (int(token) for token in rows[0].split())
    edges = [tuple(int(token) - 1 for token in row.split()) for row in rows[1:]]
    if len(edges) != edge_count:
        raise ValueError(
            f"Header announces {edge_count} edges but {len(edges)} were listed"
        )
    return Graph.from_edges(node_count, edges)
