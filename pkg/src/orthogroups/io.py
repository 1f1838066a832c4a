"""CSV matrices and JSON reports.

Matrices are written UTF-8 with a header row and 17 significant digits,
which round-trips every double exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import InputError

SCHEMA_VERSION = 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_matrix(path: str | Path, A: Any, header: Sequence[str] | None = None, prefix: str = "x") -> None:
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[:, None]
    if header is None:
        header = [f"{prefix}{j}" for j in range(A.shape[1])]
    integral = A.dtype.kind in "biu"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in A:
            w.writerow([str(int(v)) if integral else _fmt(v) for v in row])


def read_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    if any(len(r) != len(header) for r in body):
        raise InputError(f"{path}: ragged rows")
    return header, body


def read_matrix(path: str | Path) -> np.ndarray:
    """Numeric matrix from a headed CSV."""
    _, body = read_table(path)
    try:
        A = np.array(body, dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric entry ({exc})") from None
    if A.ndim != 2 or A.shape[0] == 0:
        raise InputError(f"{path}: no data rows")
    return A


def read_vector(path: str | Path) -> np.ndarray:
    A = read_matrix(path)
    if A.shape[1] != 1:
        raise InputError(f"{path}: expected a single column, found {A.shape[1]}")
    return A[:, 0]


def read_groups(path: str | Path) -> np.ndarray:
    """Group columns as strings; encoding decides numeric vs categorical."""
    _, body = read_table(path)
    raw = np.array(body, dtype=str)
    return raw[:, 0] if raw.shape[1] == 1 else raw


def write_json(path: str | Path, payload: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_rows(path: str | Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """Tidy CSV; floats at 17 significant digits, everything else via str()."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row])
