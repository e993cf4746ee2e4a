"""Small helpers shared by the CSV/JSON artifact writers and loaders.

Floats are serialized with repr(), which round-trips exactly in both CSV
and JSON.  Every artifact starts with a '# abscatter <version>' comment
line; loaders skip comment lines, so files from different versions differ
only there.  Data blocks are parsed in bulk (np.loadtxt's C reader), which
keeps multi-megabyte kernel grids loadable in about a second.
"""

from __future__ import annotations

import contextlib

import numpy as np

from . import __version__
from .errors import SchemaError


@contextlib.contextmanager
def open_artifact(path):
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(f"# abscatter {__version__}\n")
        yield f


def read_table(path, expect_header: str, meta_rows: int = 0):
    """Split an artifact into meta rows and raw data lines.

    Checks the first non-comment line against expect_header, returns the next
    meta_rows lines comma-split, and the remaining lines untouched (feed them
    to np.loadtxt).
    """
    with open(path, "r", encoding="ascii") as f:
        lines = [ln for ln in f if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0].rstrip("\n") != expect_header:
        raise SchemaError(f"{path}: expected header {expect_header!r}")
    if len(lines) < 1 + meta_rows:
        raise SchemaError(f"{path}: truncated header block")
    meta = [lines[1 + i].rstrip("\n").split(",") for i in range(meta_rows)]
    return meta, lines[1 + meta_rows:]


def parse_block(lines, columns: int) -> np.ndarray:
    """Float array of shape (n, columns) from raw CSV lines."""
    if not lines:
        return np.zeros((0, columns))
    data = np.loadtxt(lines, delimiter=",", ndmin=2)
    if data.shape[1] != columns:
        raise SchemaError(f"expected {columns} columns, found {data.shape[1]}")
    return data
