"""Run-directory state: resolved config, report, metrics and checkpoint paths."""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

# Artifact names and the files they live in
RUN_FILES = {
    "config": "config.json",
    "report": "report.json",
    "epochs": "epochs.csv",
    "checkpoint": "best.ckpt",
}


def ensure_run_dir(run_dir: Union[str, Path]) -> Path:
    """Ensure run directory exists."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir


def get_state_path(run_dir: Union[str, Path], name: str) -> Path:
    """
    Get the path to a run artifact without loading it.

    Args:
        run_dir: Run directory
        name: Artifact name ('config', 'report', 'epochs', 'checkpoint')

    Returns:
        Path of the artifact file
    """
    if name not in RUN_FILES:
        raise KeyError(f"unknown run artifact: {name}")
    return Path(run_dir) / RUN_FILES[name]


def save_state(run_dir: Union[str, Path], name: str, data: Dict[str, Any]) -> str:
    """
    Save a JSON artifact into a run directory.

    Args:
        run_dir: Run directory
        name: Artifact name ('config' or 'report')
        data: JSON-serializable payload

    Returns:
        Path to saved file
    """
    ensure_run_dir(run_dir)
    state_file = get_state_path(run_dir, name)
    with open(state_file, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
    return str(state_file)


def load_state(run_dir: Union[str, Path], name: str) -> Optional[Dict[str, Any]]:
    """
    Load a JSON artifact from a run directory.

    Returns:
        Artifact data or None if the file doesn't exist
    """
    state_file = get_state_path(run_dir, name)
    if not state_file.exists():
        return None
    with open(state_file, "r", encoding="utf-8") as f:
        return json.load(f)
