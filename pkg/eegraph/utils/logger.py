"""Component-specific logging utilities."""
import logging
from pathlib import Path
from typing import Optional, Union

from .settings import get_settings


def get_logger(component: str, log_dir: Optional[Union[str, Path]] = None) -> logging.Logger:
    """
    Get a logger instance for a specific component.

    Logs are written to:
    - Console (INFO level and above, or EEGRAPH_LOG_LEVEL)
    - File (all levels, append mode) when a log directory is known

    Args:
        component: Name of the component (e.g., 'trainer', 'cli')
        log_dir: Directory for log files (default: EEGRAPH_LOG_DIR, no file if unset)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(f"eegraph.{component}")
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    # Avoid duplicate handlers if logger already exists
    if logger.handlers:
        return logger

    settings = get_settings()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(settings.log_level)
    console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
    logger.addHandler(console_handler)

    if log_dir is None and settings.log_dir:
        log_dir = settings.log_dir
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        _add_file_handler(logger, log_dir / f"{component}_log.txt")

    return logger


def attach_run_log(logger: logging.Logger, run_dir: Union[str, Path]) -> logging.Handler:
    """
    Attach a file handler writing train_log.txt inside a run directory.

    Returns the handler so the caller can detach it when the run ends.
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    return _add_file_handler(logger, run_dir / "train_log.txt")


def detach_run_log(logger: logging.Logger, handler: logging.Handler) -> None:
    logger.removeHandler(handler)
    handler.close()


def _add_file_handler(logger: logging.Logger, log_file: Path) -> logging.Handler:
    file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))
    logger.addHandler(file_handler)
    return file_handler
