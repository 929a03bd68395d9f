"""File formats: CSV matrices and edge lists, JSON run manifests.

All floating-point output uses 17 significant digits so that re-running a
command from its manifest reproduces files byte-for-byte. Edge lists are
written 1-based with an ``i,j`` header; data and coefficient matrices are
headerless numeric CSV (a header row on input is auto-detected).
"""

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import DimensionError

FLOAT_FMT = "%.17g"


def format_float(x):
    return FLOAT_FMT % float(x)


def write_matrix_csv(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    with open(path, "w") as fh:
        for row in M:
            fh.write(",".join(FLOAT_FMT % v for v in row))
            fh.write("\n")


def read_matrix_csv(path):
    """Numeric CSV to array; a non-numeric first row is treated as a header."""
    path = Path(path)
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DimensionError(f"{path}: empty file")
    start = 0
    try:
        [float(tok) for tok in lines[0].split(",")]
    except ValueError:
        start = 1
    if start == len(lines):
        raise DimensionError(f"{path}: header but no data rows")
    rows = []
    width = None
    for ln_no, ln in enumerate(lines[start:], start=start + 1):
        toks = ln.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise DimensionError(
                f"{path}: ragged CSV, line {ln_no} has {len(toks)} fields, expected {width}"
            )
        try:
            rows.append([float(t) for t in toks])
        except ValueError as exc:
            raise DimensionError(f"{path}: non-numeric value on line {ln_no}: {exc}") from exc
    return np.asarray(rows, dtype=np.float64)


def write_edges_csv(path, edges):
    """Sorted unordered pairs, written 1-based as ``i,j`` with i < j."""
    with open(path, "w") as fh:
        fh.write("i,j\n")
        for i, j in sorted(edges):
            fh.write(f"{i + 1},{j + 1}\n")


def read_edges_csv(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    edges = set()
    for ln in lines[1:]:
        i, j = (int(t) for t in ln.split(","))
        edges.add((i - 1, j - 1))
    return edges


def write_rows_csv(path, header, rows):
    """Generic table writer; floats get the 17-digit format, the rest str()."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    FLOAT_FMT % v if isinstance(v, float) else str(v) for v in row
                )
            )
            fh.write("\n")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, manifest):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path):
    with open(path) as fh:
        return json.load(fh)
