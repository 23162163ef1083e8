"""Data validation utilities for manifests and run artifacts."""
import math
from typing import Any, Dict, Optional, Tuple

MANIFEST_VERSION = 1

MANIFEST_SCHEMA: Dict[str, Any] = {
    "required": [
        "name", "n_trials", "n_channels", "n_samples", "n_classes",
        "sample_rate_hz", "montage", "payload", "labels",
    ],
    "types": {
        "name": str,
        "n_trials": int,
        "n_channels": int,
        "n_samples": int,
        "n_classes": int,
        "sample_rate_hz": (int, float),
        "montage": str,
        "payload": str,
        "labels": str,
        "version": int,
    },
}

REPORT_SCHEMA: Dict[str, Any] = {
    "required": ["best_val_acc", "n_params", "config_hash", "val_acc"],
    "types": {
        "best_val_acc": (int, float),
        "n_params": int,
        "config_hash": str,
        "val_acc": list,
    },
}


def validate_json_schema(data: Dict[str, Any], schema: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
    """
    Basic JSON schema validation.

    Args:
        data: Data to validate
        schema: Schema definition with 'required' and 'types' keys

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(data, dict):
        return False, "Data must be a dictionary"

    for field in schema.get("required", []):
        if field not in data:
            return False, f"Missing required field: {field}"

    for field, expected_type in schema.get("types", {}).items():
        if field not in data:
            continue
        value = data[field]
        # bool is an int subclass; counts must not accept it
        if isinstance(value, bool) or not isinstance(value, expected_type):
            names = expected_type if isinstance(expected_type, tuple) else (expected_type,)
            return False, f"Field '{field}' must be of type {'/'.join(t.__name__ for t in names)}"

    return True, None


def validate_manifest(data: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
    """
    Validate a dataset manifest beyond field presence and types.

    Returns:
        Tuple of (is_valid, error_message)
    """
    ok, message = validate_json_schema(data, MANIFEST_SCHEMA)
    if not ok:
        return ok, message

    for field in ("n_trials", "n_channels", "n_samples"):
        if data[field] < 1:
            return False, f"Field '{field}' must be positive"
    if data["n_classes"] < 2:
        return False, "Field 'n_classes' must be at least 2"
    rate = float(data["sample_rate_hz"])
    if not math.isfinite(rate) or rate <= 0:
        return False, "Field 'sample_rate_hz' must be a positive real"
    return True, None


def validate_run_report(data: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
    """Validate a report.json payload read back from a run directory."""
    return validate_json_schema(data, REPORT_SCHEMA)
