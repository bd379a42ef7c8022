import logging

import numpy as np
import pytest

from DAdmmSim.src.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from DAdmmSim.src.InstanceCodec import load_instance
from DAdmmSim.src.NetworkGraph import read_edge_list
from DAdmmSim.src.utils import logger_utils

CONFIG = """
[network]
model = "lattice"
nodes = 4

[problem]
family = "consensus"

[run]
algorithms = {algorithms}
rho = {rho}
max_steps = 400
"""


@pytest.fixture(autouse=True)
def restore_logging(monkeypatch):
    registered = set(logger_utils._registered_loggers)
    saved = {
        name: (logging.getLogger(name).level, list(logging.getLogger(name).handlers))
        for name in registered
    }
    monkeypatch.setattr(logger_utils, "_registered_loggers", set(registered))
    monkeypatch.setattr(logger_utils, "_active_config", None)
    for key in ("DADMM_LOG_LEVEL", "DADMM_LOG_FILE", "DADMM_OUT_DIR"):
        monkeypatch.setenv(key, "unset")
        monkeypatch.delenv(key)
    yield
    for name in logger_utils._registered_loggers:
        logger = logging.getLogger(name)
        level, handlers = saved.get(name, (logging.NOTSET, []))
        for handler in list(logger.handlers):
            if handler not in handlers:
                handler.close()
                logger.removeHandler(handler)
        if name in saved:
            logger.setLevel(level)


def write_config(tmp_path, algorithms='["d-admm"]', rho="[1.0]"):
    path = tmp_path / "experiment.toml"
    path.write_text(CONFIG.format(algorithms=algorithms, rho=rho))
    return path


def test_gen_network_writes_edge_list(tmp_path):
    out = tmp_path / "lattice.txt"
    argv = ["gen-network", "lattice", "--nodes", "10", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert out.read_text().splitlines()[0] == "10 13"
    assert read_edge_list(out).edge_count == 13


def test_gen_network_default_path_uses_out_dir(tmp_path):
    code = main(
        ["gen-network", "erdos-renyi", "--nodes", "8", "--p", "0.4", "--seed", "2"]
        + ["--out-dir", str(tmp_path)]
    )
    assert code == EXIT_OK
    assert (tmp_path / "erdos-renyi-P8.txt").is_file()


def test_gen_network_default_path_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DADMM_OUT_DIR", str(tmp_path / "env-out"))
    assert main(["gen-network", "barabasi-albert", "--nodes", "6"]) == EXIT_OK
    assert (tmp_path / "env-out" / "barabasi-albert-P6.txt").is_file()


def test_invalid_network_parameters(tmp_path):
    argv = ["gen-network", "watts-strogatz", "--nodes", "4", "--n", "4"]
    assert main(argv + ["--out-dir", str(tmp_path)]) == EXIT_CONFIG


def test_usage_errors_exit_with_configuration_code():
    assert main([]) == EXIT_CONFIG
    assert main(["gen-network", "lattice"]) == EXIT_CONFIG
    assert main(["gen-network", "torus", "--nodes", "4"]) == EXIT_CONFIG
    assert main(["--help"]) == EXIT_OK


def test_instance_then_reference(tmp_path, capsys):
    instance_file = tmp_path / "consensus.txt"
    argv = ["gen-instance", "consensus", "--nodes", "5", "--seed", "3"]
    assert main(argv + ["--out", str(instance_file)]) == EXIT_OK
    theta = load_instance(instance_file).theta
    capsys.readouterr()

    assert main(["solve-reference", str(instance_file)]) == EXIT_OK
    printed = capsys.readouterr().out.split()
    assert len(printed) == 1
    assert float(printed[0]) == pytest.approx(np.mean(theta), rel=1e-15)


def test_reference_to_file(tmp_path):
    instance_file = tmp_path / "consensus.txt"
    solution_file = tmp_path / "solution.txt"
    main(["gen-instance", "consensus", "--nodes", "3", "--out", str(instance_file)])
    argv = ["solve-reference", str(instance_file), "--out", str(solution_file)]
    assert main(argv) == EXIT_OK
    assert len(solution_file.read_text().splitlines()) == 1


def test_missing_instance_file(tmp_path):
    assert main(["solve-reference", str(tmp_path / "none.txt")]) == EXIT_CONFIG


def test_run_writes_results(tmp_path):
    out = tmp_path / "results"
    code = main(["run", str(write_config(tmp_path)), "--out-dir", str(out)])
    assert code == EXIT_OK
    assert (out / "summary.csv").is_file()
    assert (out / "best.csv").is_file()


def test_run_with_every_cell_failing(tmp_path):
    config = write_config(tmp_path, algorithms='["subgradient"]', rho="[100.0]")
    code = main(
        ["run", str(config), "--out-dir", str(tmp_path / "out"), "--max-steps", "1000"]
    )
    assert code == EXIT_RUNTIME
    assert (tmp_path / "out" / "failures.csv").is_file()


def test_run_configuration_errors(tmp_path):
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_CONFIG
    config = write_config(tmp_path)
    assert main(["run", str(config), "--tol", "3"]) == EXIT_CONFIG


def test_suite_rejects_bad_tolerance(tmp_path):
    argv = ["suite", "figure2", "--nodes", "10", "--tol", "0"]
    assert main(argv + ["--out-dir", str(tmp_path)]) == EXIT_CONFIG


def test_log_file_option(tmp_path):
    log_file = tmp_path / "cli.log"
    argv = ["gen-network", "lattice", "--nodes", "4", "--out-dir", str(tmp_path)]
    assert main(argv + ["--log-file", str(log_file)]) == EXIT_OK
    assert "Wrote 4 edges" in log_file.read_text()
