"""
Plain-text instance files:

    kind <family>
    param <key> <value>
    matrix <name> <rows> <cols>
    <rows of space-separated values, 17 significant digits>
"""

from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigurationError
from .ProblemFactory import (
    BpdnInstance,
    ConsensusInstance,
    LassoInstance,
    ProblemInstance,
    SvmInstance,
)
from .utils.logger_utils import get_logger

logger = get_logger(__name__, "INFO")

NUMBER_FORMAT = "%.17g"


def _format_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return NUMBER_FORMAT % value


def dump_instance(instance: ProblemInstance, path: Union[str, Path]) -> None:
    lines = [f"kind {instance.kind}"]
    for key, value in instance.params().items():
        lines.append(f"param {key} {_format_value(value)}")
    for name, matrix in instance.matrices().items():
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        lines.append(f"matrix {name} {matrix.shape[0]} {matrix.shape[1]}")
        lines.extend(" ".join(NUMBER_FORMAT % value for value in row) for row in matrix)

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote {instance.kind} instance to {path}")


def _parse(path: Path) -> tuple[str, dict[str, str], dict[str, np.ndarray]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("kind "):
        raise ConfigurationError(f"{path}: first line must be 'kind <family>'")
    kind = lines[0].split(maxsplit=1)[1].strip()

    params: dict[str, str] = {}
    matrices: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        if parts[0] == "param" and len(parts) == 3:
            params[parts[1]] = parts[2]
            i += 1
        elif parts[0] == "matrix" and len(parts) == 4:
            name, rows, cols = parts[1], int(parts[2]), int(parts[3])
            body = lines[i + 1 : i + 1 + rows]
            if len(body) != rows:
                raise ConfigurationError(
                    f"{path}: matrix '{name}' declares {rows} rows, found {len(body)}"
                )
            try:
                values = np.array([[float(v) for v in row.split()] for row in body])
            except ValueError as e:
                raise ConfigurationError(f"{path}: bad number in '{name}': {e}") from e
            if values.shape != (rows, cols):
                raise ConfigurationError(
                    f"{path}: matrix '{name}' is not {rows}x{cols}"
                )
            matrices[name] = values
            i += 1 + rows
        else:
            raise ConfigurationError(f"{path}:{i + 1}: unexpected line '{lines[i]}'")
    return kind, params, matrices


def load_instance(path: Union[str, Path]) -> ProblemInstance:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Instance file not found: {path}")
    kind, params, matrices = _parse(path)

    try:
        P = int(params["P"])
        if kind == "consensus":
            return ConsensusInstance(theta=matrices["theta"].reshape(-1))
        if kind == "bpdn":
            return BpdnInstance(
                A=matrices["A"],
                b=matrices["b"].reshape(-1),
                beta=float(params["beta"]),
                node_count=P,
            )
        if kind == "lasso":
            return LassoInstance(
                A=matrices["A"],
                b=matrices["b"].reshape(-1),
                sigma=float(params["sigma"]),
                delta=float(params["delta"]),
                node_count=P,
            )
        if kind == "svm":
            return SvmInstance(
                A=matrices["A"], labels=matrices["labels"].reshape(-1), node_count=P
            )
    except KeyError as e:
        raise ConfigurationError(f"{path}: missing entry {e} for '{kind}'") from e
    except ValueError as e:
        raise ConfigurationError(f"{path}: {e}") from e
    raise ConfigurationError(f"{path}: unknown instance kind '{kind}'")
