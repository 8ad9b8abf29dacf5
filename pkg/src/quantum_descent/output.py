"""Columnar result files: CSV/JSON tables and run metadata.

All floating-point values are written with 17 significant digits (``%.17e``)
so that re-parsing a file reproduces the in-memory float64 exactly and two
runs of the same config produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.17e"


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT_FMT % float(v)


def write_csv_table(path: Path, header: list, rows) -> None:
    """Write a single-header-row CSV with '.' decimals and %.17e floats."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json_table(path: Path, header: list, rows) -> None:
    """JSON mirror of a CSV table: {"header": [...], "rows": [[...], ...]}.

    float64 values survive a json round-trip exactly (repr-based encoding).
    """
    payload = {"header": list(header),
               "rows": [[_jsonable(v) for v in row] for row in rows]}
    path.write_text(json.dumps(payload, indent=1) + "\n")


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def write_table(directory: Path, stem: str, header: list, rows, fmt: str) -> Path:
    """Write one table in the requested format; returns the created path."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown table format {fmt!r}")
    path = directory / f"{stem}.{fmt}"
    if fmt == "csv":
        write_csv_table(path, header, rows)
    else:
        write_json_table(path, header, rows)
    return path


def read_table(path: Path) -> tuple:
    """Parse a table written by :func:`write_table` back to (header, float array)."""
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text())
        return list(payload["header"]), np.asarray(payload["rows"], dtype=float)
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return header, np.asarray(rows, dtype=float)


def write_meta(path: Path, meta: dict) -> None:
    path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def read_meta(path: Path) -> dict:
    return json.loads(Path(path).read_text())
