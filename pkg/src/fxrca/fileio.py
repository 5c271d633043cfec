"""Atomic file output and deterministic CSV/JSON formatting.

Floats are rendered with repr (shortest round-trip form) so that a rerun
with identical inputs produces byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Iterable

__all__ = ["atomic_write_text", "format_cell", "csv_text", "write_csv", "write_json"]


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(format_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    atomic_write_text(path, csv_text(header, rows))


def write_json(path, payload) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
