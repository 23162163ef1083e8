"""Standalone helpers: results tables and dataset conversion."""
from .table import build_table, collect_reports, summarize, render_table, format_accuracy
from .convert import convert, read_npz, read_long_csv

__all__ = [
    "build_table",
    "collect_reports",
    "summarize",
    "render_table",
    "format_accuracy",
    "convert",
    "read_npz",
    "read_long_csv",
]
