"""Field snapshots and plot-ready text output.

Snapshot layout (little endian): b"FCHQ1", dim (u8), n (u32), L (f64), then
n^dim float64 values in row-major order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import InvalidGrid, SnapshotError
from .grid import Field, GridSpec

__all__ = ["MAGIC", "save_snapshot", "load_snapshot", "snapshot_bytes", "write_json", "write_csv"]

MAGIC = b"FCHQ1"
_HEADER = struct.Struct("<5sBId")


def snapshot_bytes(u: Field) -> bytes:
    g = u.grid
    head = _HEADER.pack(MAGIC, g.dim, g.n, float(g.L))
    return head + np.ascontiguousarray(u.values, dtype="<f8").tobytes(order="C")


def save_snapshot(u: Field, path) -> Path:
    path = Path(path)
    path.write_bytes(snapshot_bytes(u))
    return path


def load_snapshot(path) -> Field:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from None
    if len(raw) < _HEADER.size:
        raise SnapshotError("snapshot shorter than its header")
    magic, dim, n, L = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    try:
        grid = GridSpec(dim, L, n)
    except InvalidGrid as exc:
        raise SnapshotError(f"invalid grid in header: {exc}") from None
    expected = _HEADER.size + 8 * n**dim
    if len(raw) != expected:
        raise SnapshotError(f"snapshot has {len(raw)} bytes, expected {expected}")
    vals = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(grid.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise SnapshotError("snapshot contains non-finite values")
    return Field(grid, vals)


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=False, default=_default) + "\n")
    return path


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_csv(rows, header, path) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)
