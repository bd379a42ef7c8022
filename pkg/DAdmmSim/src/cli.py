"""
Command line entry point.

    dadmm run <config.toml>
    dadmm suite figure2 --nodes P
    dadmm gen-network <model> --nodes P [--p --n --d] [--out file]
    dadmm gen-instance <family> --nodes P [--matrix kind] [--out file]
    dadmm solve-reference <instance-file> [--out file]

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DAdmmError
from .ExperimentRunner import run_all, suite_figure2
from .InstanceCodec import dump_instance, load_instance
from .NetworkGraph import MODELS, build_network, write_edge_list
from .ProblemFactory import FAMILIES, MATRIX_KINDS, LassoInstance, build_instance
from .utils.config_utils import Settings, load_config, load_settings, with_overrides
from .utils.logger_utils import LoggingConfig, get_logger

logger = get_logger(__name__, "INFO")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> CliParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="base seed for networks and data")
    common.add_argument("--seeds", type=int, help="number of repetitions")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--max-steps", type=int, help="communication step budget")
    common.add_argument("--tol", type=float, help="relative error tolerance")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--log-file", help="also write logs to this file")
    common.add_argument("--workers", type=int, help="cells run concurrently")

    parser = CliParser(
        prog="dadmm", description="Distributed ADMM experiment simulator"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser(
        "run", parents=[common], help="run an experiment from a TOML config"
    )
    run_parser.add_argument("config", help="experiment config file")
    run_parser.set_defaults(handler=_run)

    suite_parser = subparsers.add_parser(
        "suite", parents=[common], help="run a predefined experiment suite"
    )
    suite_parser.add_argument("name", choices=["figure2"])
    suite_parser.add_argument("--nodes", type=int, required=True)
    suite_parser.set_defaults(handler=_suite)

    network_parser = subparsers.add_parser(
        "gen-network", parents=[common], help="write a network edge list"
    )
    network_parser.add_argument("model", choices=MODELS)
    network_parser.add_argument("--nodes", type=int, required=True)
    network_parser.add_argument("--p", type=float, help="edge/rewiring probability")
    network_parser.add_argument("--n", type=int, help="Watts-Strogatz neighbors")
    network_parser.add_argument("--d", type=float, help="geometric radius")
    network_parser.add_argument("--out", help="edge-list file")
    network_parser.set_defaults(handler=_gen_network)

    instance_parser = subparsers.add_parser(
        "gen-instance", parents=[common], help="write a problem instance file"
    )
    instance_parser.add_argument("family", choices=FAMILIES)
    instance_parser.add_argument("--nodes", type=int, required=True)
    instance_parser.add_argument("--matrix", choices=MATRIX_KINDS)
    instance_parser.add_argument("--out", help="instance file")
    instance_parser.set_defaults(handler=_gen_instance)

    reference_parser = subparsers.add_parser(
        "solve-reference", parents=[common], help="solve an instance centrally"
    )
    reference_parser.add_argument("instance", help="instance file")
    reference_parser.add_argument("--out", help="write the solution here")
    reference_parser.set_defaults(handler=_solve_reference)
    return parser


def _out_path(args, settings: Settings, default_name: str) -> Path:
    if args.out:
        path = Path(args.out)
    else:
        path = Path(args.out_dir or settings.out_dir) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _run(args, settings: Settings) -> int:
    config = with_overrides(
        load_config(args.config),
        settings,
        seed=args.seed,
        seeds=args.seeds,
        out_dir=args.out_dir,
        max_steps=args.max_steps,
        tol=args.tol,
        workers=args.workers,
    )
    results = run_all(config)
    if all(not result.cells for result in results):
        logger.error("Every experiment cell failed")
        return EXIT_RUNTIME
    return EXIT_OK


def _suite(args, settings: Settings) -> int:
    if args.tol is not None and not 0 < args.tol < 1:
        raise ConfigurationError("--tol must lie in (0, 1)")
    table = suite_figure2(
        args.nodes,
        seed=args.seed or 0,
        out_dir=args.out_dir or settings.out_dir,
        tol=args.tol or 1e-4,
        max_steps=args.max_steps or 1000,
        max_workers=args.workers or settings.max_workers,
    )
    logger.info(f"Suite finished with {len(table)} best-rho rows")
    return EXIT_OK


def _gen_network(args, settings: Settings) -> int:
    params = {
        key: value
        for key, value in (("p", args.p), ("n", args.n), ("d", args.d))
        if value is not None
    }
    try:
        g = build_network(args.model, args.nodes, args.seed or 0, **params)
    except ValueError as e:
        raise ConfigurationError(str(e)) from e
    write_edge_list(g, _out_path(args, settings, f"{args.model}-P{args.nodes}.txt"))
    return EXIT_OK


def _gen_instance(args, settings: Settings) -> int:
    params = {"matrix": args.matrix} if args.matrix else {}
    try:
        instance = build_instance(args.family, args.nodes, args.seed or 0, **params)
    except ValueError as e:
        raise ConfigurationError(str(e)) from e
    out = _out_path(args, settings, f"{args.family}-P{args.nodes}.txt")
    dump_instance(instance, out)
    return EXIT_OK


def _solve_reference(args, settings: Settings) -> int:
    instance = load_instance(args.instance)
    if isinstance(instance, LassoInstance):
        solution = instance.primal_reference
    else:
        solution = instance.reference
    lines = "\n".join("%.17g" % value for value in np.atleast_1d(solution)) + "\n"
    if args.out:
        Path(args.out).write_text(lines, encoding="utf-8")
        logger.info(f"Wrote {instance.kind} reference to {args.out}")
    else:
        sys.stdout.write(lines)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = load_settings()
        LoggingConfig(
            args.log_level or settings.log_level, args.log_file or settings.log_file
        ).setup_logging()
        return args.handler(args, settings)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (DAdmmError, OSError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
