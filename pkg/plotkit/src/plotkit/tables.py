"""Reading and validating the noisyqd CSV table contracts."""

from __future__ import annotations

import csv
import io
import os

import numpy as np

# column signature per table kind
COLUMNS = {
    "psi2_heatmap": ("t", "x", "psi2"),
    "current": ("t", "probe_x", "J_R"),
    "norm": ("t", "norm2"),
    "trace_purity": ("t", "trace_re", "trace_im", "purity"),
}


class ContractError(ValueError):
    """Input file does not satisfy the expected table contract."""


def read_table(path: str, columns: tuple[str, ...]) -> np.ndarray:
    """Read a CSV with exactly the given header; rows as float array.

    Raises ContractError naming any missing or unexpected columns, and
    on a header-only file ("no data").
    """
    if not os.path.exists(path):
        raise ContractError(f"{path}: file not found")
    with open(path, newline="") as fh:
        text = fh.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ContractError(f"{path}: empty file, expected columns {list(columns)}")
    header = [h.strip() for h in header]
    if tuple(header) != tuple(columns):
        missing = [c for c in columns if c not in header]
        extra = [c for c in header if c not in columns]
        parts = []
        if missing:
            parts.append(f"missing columns {missing}")
        if extra:
            parts.append(f"unexpected columns {extra}")
        if not parts:  # same names, wrong order
            parts.append(f"column order {header}, expected {list(columns)}")
        raise ContractError(f"{path}: " + "; ".join(parts))

    rows = [r for r in reader if r]
    if not rows:
        raise ContractError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ContractError(f"{path}: non-numeric cell ({exc})")
    if data.shape[1] != len(columns):
        raise ContractError(f"{path}: ragged rows, expected {len(columns)} cells per row")
    return data
