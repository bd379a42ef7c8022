import logging
import os
from pathlib import Path
from typing import Optional, Union

LOG_FORMAT = "[%(levelname)s] - %(asctime)s - %(funcName)s - %(message)s"

# Every logger handed out by get_logger, so LoggingConfig can retune them later.
_registered_loggers: set[str] = set()
_active_config: Optional["LoggingConfig"] = None


class LoggingConfig:
    def __init__(
        self, log_level: str = "INFO", log_file: Optional[Union[str, Path]] = None
    ):
        self.log_level = getattr(logging, log_level.upper(), logging.INFO)
        self.log_file = Path(log_file) if log_file else None

    def setup_logging(self):
        """
        Applies the configured level (and file handler, if any) to every
        logger created through get_logger so far, and to the ones created later.
        """
        global _active_config
        _active_config = self
        for name in sorted(_registered_loggers):
            logger = logging.getLogger(name)
            logger.setLevel(self.log_level)
            if self.log_file and not _has_file_handler(logger, self.log_file):
                logger.addHandler(_file_handler(self.log_file))


def _file_handler(log_file: Union[str, Path]) -> logging.FileHandler:
    file_handler = logging.FileHandler(log_file)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    return file_handler


def _has_file_handler(logger: logging.Logger, log_file: Path) -> bool:
    target = os.path.abspath(log_file)
    return any(
        isinstance(handler, logging.FileHandler) and handler.baseFilename == target
        for handler in logger.handlers
    )


def get_logger(
    name: str, level: str = "INFO", log_file: Optional[str] = None
) -> logging.Logger:
    """
    Creates and configures a logger with the specified name and logging level.
    Optionally, logs can be exported to a specified file.

    The level is only set the first time a name is seen; once LoggingConfig
    has been applied its level wins over the `level` argument.

    Parameters:
        name (str): The name of the logger. Convention is to use __name__.
        level (str): The logging level as a string. Default is 'INFO'.
        log_file (Optional[str]): The file path to export logs. Default is None.

    Returns:
        logging.Logger: The configured logger object.
    """
    logger = logging.getLogger(name)
    if name not in _registered_loggers:
        if _active_config is not None:
            logger.setLevel(_active_config.log_level)
            if _active_config.log_file:
                log_file = log_file or str(_active_config.log_file)
        else:
            logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.propagate = False
    _registered_loggers.add(name)

    # Stream handler for console output, attached once per logger
    if not any(type(handler) is logging.StreamHandler for handler in logger.handlers):
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(stream_handler)

    # File handler for file output
    if log_file and not _has_file_handler(logger, Path(log_file)):
        logger.addHandler(_file_handler(log_file))

    return logger
