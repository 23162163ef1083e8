"""Environment-level settings loaded from .env and the process environment."""
import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Settings:
    """Process-wide knobs that do not belong in an experiment config."""
    log_dir: Optional[str]
    log_level: int
    default_seed: int
    default_runs: int


def get_settings() -> Settings:
    """Read settings from the environment; nothing is cached."""
    level_name = os.getenv("EEGRAPH_LOG_LEVEL", "INFO").upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        level = logging.INFO
    return Settings(
        log_dir=os.getenv("EEGRAPH_LOG_DIR") or None,
        log_level=level,
        default_seed=int(os.getenv("EEGRAPH_DEFAULT_SEED", "0")),
        default_runs=int(os.getenv("EEGRAPH_RUNS", "3")),
    )
