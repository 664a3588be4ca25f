"""File formats: sample CSV ingest, field CSV export, metrics JSON.

All writes go through an atomic temp-file-then-rename so readers never
observe partial files.  Floats are serialized with repr, whose shortest
round-trip guarantee makes every CSV re-import bit-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from typing import NamedTuple

import numpy as np

from .domain import Domain, GridSpec
from .gvf import LevelField


def _atomic_write(path, data: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_bytes(path, data: bytes) -> None:
    _atomic_write(path, data)


def atomic_write_text(path, text: str) -> None:
    _atomic_write(path, text.encode("utf-8"))


class ParsedSamples(NamedTuple):
    """Raw rows from a sample CSV before any snapping.

    kind is "xy" for an `x,y,value` file (rows are (x, y, value)) or
    "vertex" for a `vertex,value` file (rows are (vertex, value)).
    """

    kind: str
    rows: np.ndarray


def read_samples_csv(path) -> ParsedSamples:
    """Parse a sample CSV; the header line selects the flavor."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty sample file")
    header = [h.strip().lower() for h in lines[0].split(",")]
    if header == ["x", "y", "value"]:
        kind, ncol = "xy", 3
    elif header == ["vertex", "value"]:
        kind, ncol = "vertex", 2
    else:
        raise ValueError(
            f"{path}: header must be 'x,y,value' or 'vertex,value', "
            f"got {lines[0]!r}")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != ncol:
            raise ValueError(f"{path}: line {lineno}: expected {ncol} columns")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric entry") from None
    if not rows:
        raise ValueError(f"{path}: no sample rows")
    arr = np.asarray(rows, dtype=np.float64)
    if kind == "vertex":
        if not (arr[:, 0] == np.rint(arr[:, 0])).all():
            raise ValueError(f"{path}: vertex ids must be integers")
    if not np.isfinite(arr).all():
        raise ValueError(f"{path}: samples must be finite")
    return ParsedSamples(kind=kind, rows=arr)


def snap_to_vertices(parsed: ParsedSamples, grid: GridSpec | None,
                     domain: Domain) -> dict[int, float]:
    """Resolve parsed samples to a vertex -> value map.

    `x,y,value` rows snap to the nearest grid vertex (ties toward the
    larger row/column); rows landing on the same vertex merge by mean
    with a warning.  `vertex,value` rows resolve directly on any domain.
    """
    if parsed.kind == "xy":
        if grid is None:
            raise ValueError("x,y,value samples need a grid domain to snap to")
        cols = np.clip(np.floor(parsed.rows[:, 0] / grid.spacing + 0.5),
                       0, grid.width - 1).astype(np.int64)
        rows_ = np.clip(np.floor(parsed.rows[:, 1] / grid.spacing + 0.5),
                        0, grid.height - 1).astype(np.int64)
        verts = rows_ * grid.width + cols
        values = parsed.rows[:, 2]
    else:
        verts = parsed.rows[:, 0].astype(np.int64)
        if (verts < 0).any() or (verts >= domain.vertex_count).any():
            bad = int(verts[(verts < 0) | (verts >= domain.vertex_count)][0])
            raise ValueError(f"sample vertex id {bad} out of range")
        values = parsed.rows[:, 1]
    out: dict[int, float] = {}
    counts: dict[int, int] = {}
    merged = []
    for v, val in zip(verts.tolist(), values.tolist()):
        if v in out:
            counts[v] += 1
            out[v] += (val - out[v]) / counts[v]
            merged.append(v)
        else:
            out[v] = val
            counts[v] = 1
    if merged:
        warnings.warn(
            f"{len(merged)} sample row(s) landed on already-occupied "
            f"vertices; merged by mean", stacklevel=2)
    return out


def sample_coords(parsed: ParsedSamples, domain: Domain) -> np.ndarray:
    """(x, y, value) rows for pointwise methods, from either CSV flavor."""
    if parsed.kind == "xy":
        return np.array(parsed.rows)
    if domain.coords is None:
        raise ValueError("vertex,value samples on a domain without coordinates "
                         "cannot feed coordinate-based methods")
    verts = parsed.rows[:, 0].astype(np.int64)
    return np.column_stack([domain.coords[verts], parsed.rows[:, 1]])


def write_level_csv(path, field: LevelField) -> None:
    """Export a level field as `vertex,index,value` rows."""
    table = field.table
    lines = ["vertex,index,value"]
    for v, i in enumerate(field.idx.tolist()):
        lines.append(f"{v},{i},{table.base + (i - 1) * table.delta!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_scalar_csv(path, values: np.ndarray) -> None:
    """Export per-vertex values as `vertex,value` rows."""
    lines = ["vertex,value"]
    for v, val in enumerate(np.asarray(values, dtype=np.float64).tolist()):
        lines.append(f"{v},{val!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


class FieldCsv(NamedTuple):
    vertices: np.ndarray
    values: np.ndarray
    indices: np.ndarray | None


def read_field_csv(path) -> FieldCsv:
    """Re-import a field CSV written by this package, losslessly."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty field file")
    header = [h.strip().lower() for h in lines[0].split(",")]
    if header == ["vertex", "index", "value"]:
        with_index = True
    elif header == ["vertex", "value"]:
        with_index = False
    else:
        raise ValueError(f"{path}: unrecognized field CSV header {lines[0]!r}")
    verts, idxs, vals = [], [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != (3 if with_index else 2):
            raise ValueError(f"{path}: line {lineno}: wrong column count")
        verts.append(int(parts[0]))
        if with_index:
            idxs.append(int(parts[1]))
        vals.append(float(parts[-1]))
    return FieldCsv(vertices=np.array(verts, dtype=np.int64),
                    values=np.array(vals, dtype=np.float64),
                    indices=np.array(idxs, dtype=np.int64) if with_index else None)


def write_metrics_json(path, payload: dict) -> None:
    """Write a metrics dict as versioned JSON (schema: 1), atomically."""
    body = dict(payload)
    body["schema"] = 1
    atomic_write_text(path, json.dumps(body, indent=2, sort_keys=True) + "\n")


def read_edge_list(path) -> tuple[int, np.ndarray]:
    """Parse a plain-text graph: `vertices N` then one `a b` edge per line."""
    count = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if count is None:
                if len(tokens) == 2 and tokens[0].lower() == "vertices":
                    try:
                        count = int(tokens[1])
                    except ValueError:
                        raise ValueError(
                            f"{path}: line {lineno}: bad vertex count") from None
                    continue
                raise ValueError(
                    f"{path}: line {lineno}: expected 'vertices N' first")
            if len(tokens) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'a b'")
            try:
                edges.append((int(tokens[0]), int(tokens[1])))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: non-integer vertex id") from None
    if count is None:
        raise ValueError(f"{path}: missing 'vertices N' line")
    arr = np.asarray(edges, dtype=np.int64) if edges \
        else np.empty((0, 2), dtype=np.int64)
    return count, arr
