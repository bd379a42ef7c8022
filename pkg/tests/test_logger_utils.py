import logging

import pytest

from DAdmmSim.src.utils import logger_utils
from DAdmmSim.src.utils.logger_utils import LoggingConfig, get_logger


@pytest.fixture(autouse=True)
def isolated_registry(monkeypatch):
    monkeypatch.setattr(logger_utils, "_registered_loggers", set())
    monkeypatch.setattr(logger_utils, "_active_config", None)
    created = []
    yield created
    for name in created:
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            handler.close()
            logger.removeHandler(handler)


def test_one_stream_handler_per_logger(isolated_registry):
    isolated_registry.append("dadmm.tests.stream")
    get_logger("dadmm.tests.stream")
    logger = get_logger("dadmm.tests.stream")
    streams = [h for h in logger.handlers if type(h) is logging.StreamHandler]
    assert len(streams) == 1
    assert logger.propagate is False


def test_level_is_set_on_first_use_only(isolated_registry):
    isolated_registry.append("dadmm.tests.level")
    assert get_logger("dadmm.tests.level", "DEBUG").level == logging.DEBUG
    assert get_logger("dadmm.tests.level", "ERROR").level == logging.DEBUG


def test_unknown_level_falls_back_to_info(isolated_registry):
    isolated_registry.append("dadmm.tests.unknown")
    assert get_logger("dadmm.tests.unknown", "LOUD").level == logging.INFO
    assert LoggingConfig("chatty").log_level == logging.INFO


def test_config_retunes_existing_and_future_loggers(isolated_registry):
    isolated_registry.extend(["dadmm.tests.before", "dadmm.tests.after"])
    before = get_logger("dadmm.tests.before", "INFO")
    LoggingConfig("WARNING").setup_logging()
    assert before.level == logging.WARNING
    assert get_logger("dadmm.tests.after", "DEBUG").level == logging.WARNING


def test_log_file_receives_records(isolated_registry, tmp_path):
    isolated_registry.extend(["dadmm.tests.file", "dadmm.tests.file.late"])
    log_file = tmp_path / "run.log"
    early = get_logger("dadmm.tests.file")
    LoggingConfig("INFO", log_file).setup_logging()
    late = get_logger("dadmm.tests.file.late")

    early.info("first message")
    late.warning("second message")
    early.debug("hidden message")

    text = log_file.read_text()
    assert "[INFO] - " in text and "first message" in text
    assert "[WARNING] - " in text and "second message" in text
    assert "hidden message" not in text

    LoggingConfig("INFO", log_file).setup_logging()
    files = [h for h in early.handlers if isinstance(h, logging.FileHandler)]
    assert len(files) == 1
