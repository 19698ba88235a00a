"""
Report writers: JSON documents and CSV tables.

JSON is written with two-space indentation, UTF-8 and without NaN or
infinity tokens (those become null). CSV tables use 17 significant
digits so values survive a round trip; header lines start with '#'.
"""

import io
import json
import math
import sys
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from errors import ConfigError

CSV_FORMAT = "%.17g"


def load_json(file_path: str) -> Dict:
    """Load JSON file; syntax errors become ConfigError with the line number."""
    with open(file_path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {file_path}: {exc.msg} (column {exc.colno})",
                              line=exc.lineno) from exc


def to_plain(obj: Any) -> Any:
    """Recursively convert numpy values and non-finite floats to JSON-safe Python values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps_json(data: Any) -> str:
    return json.dumps(to_plain(data), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_text(text: str, file_path: Optional[str] = None) -> None:
    """Write to file_path, or to stdout when no path is given."""
    if file_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def save_json(data: Any, file_path: Optional[str] = None) -> None:
    """Save JSON file (stdout when file_path is None)."""
    write_text(dumps_json(data), file_path)


def csv_text(columns: Sequence[str], rows: np.ndarray, comments: Iterable[str] = ()) -> str:
    """
    Render a numeric table as CSV.

    Args:
        columns: Column names, written as the last header line
        rows: 2-D array of values
        comments: Extra header lines (without the leading '#')
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size and rows.shape[1] != len(columns):
        raise ValueError(f"{len(columns)} columns declared but rows have {rows.shape[1]}")
    header = "\n".join(list(comments) + [",".join(columns)])
    buffer = io.StringIO()
    np.savetxt(buffer, rows.reshape(-1, len(columns)), fmt=CSV_FORMAT, delimiter=",",
               header=header, comments="# ")
    return buffer.getvalue()


def read_csv(file_path: str) -> np.ndarray:
    """Inverse of csv_text: numeric rows with header lines skipped."""
    return np.loadtxt(file_path, delimiter=",", comments="#", ndmin=2)
