"""Shared utilities: logging, errors, validation, run-directory state and settings."""
from .error_handler import EEGraphError, UsageError, DataError, handle_command_errors
from .validation import validate_json_schema, validate_manifest, validate_run_report
from .logger import get_logger, attach_run_log, detach_run_log
from .settings import Settings, get_settings
from .state_manager import save_state, load_state, get_state_path

__all__ = [
    "EEGraphError",
    "UsageError",
    "DataError",
    "handle_command_errors",
    "validate_json_schema",
    "validate_manifest",
    "validate_run_report",
    "get_logger",
    "attach_run_log",
    "detach_run_log",
    "Settings",
    "get_settings",
    "save_state",
    "load_state",
    "get_state_path",
]
