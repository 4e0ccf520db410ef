"""On-disk formats: curve snapshots and diagnostics CSV.

Snapshot files are plain text::

    # sqgfront snapshot
    # version 1
    # n 256
    # time 0.125
    # s 0.25
    -3.1415926535897931 1 0
    ...

one ``gamma x1 x2`` line per node with 17 significant digits, which is
lossless for 64-bit floats. CSV values use Python's shortest round-trip repr.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .curve import ClosedCurve
from .diagnostics import CSV_COLUMNS, DiagnosticsRecord

SNAPSHOT_VERSION = 1
_MAGIC = "# sqgfront snapshot"


class SnapshotError(ValueError):
    pass


def format_snapshot(curve: ClosedCurve, s: float = 0.25) -> str:
    lines = [_MAGIC, f"# version {SNAPSHOT_VERSION}", f"# n {curve.n}",
             f"# time {curve.time!r}", f"# s {float(s)!r}"]
    gamma = curve.grid.nodes
    for g, (x1, x2) in zip(gamma, curve.points):
        lines.append(f"{g:.17g} {x1:.17g} {x2:.17g}")
    return "\n".join(lines) + "\n"


def write_snapshot(path, curve: ClosedCurve, s: float = 0.25) -> Path:
    path = Path(path)
    path.write_text(format_snapshot(curve, s))
    return path


def parse_snapshot(text: str) -> tuple[ClosedCurve, dict]:
    meta, rows = {}, []
    lines = text.splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise SnapshotError("not a snapshot file (missing header line)")
    for raw in lines[1:]:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(None, 1)
            if len(parts) == 2:
                meta[parts[0]] = parts[1].strip()
            continue
        rows.append([float(v) for v in line.split()])
    try:
        version = int(meta["version"])
        n = int(meta["n"])
        time = float(meta["time"])
        s = float(meta.get("s", 0.25))
    except (KeyError, ValueError) as exc:
        raise SnapshotError(f"bad snapshot header: {exc}") from None
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    data = np.array(rows, dtype=float).reshape(-1, 3) if rows else np.zeros((0, 3))
    if data.shape[0] != n:
        raise SnapshotError(f"header says n = {n} but found {data.shape[0]} nodes")
    return ClosedCurve(data[:, 1:], time), {"version": version, "n": n, "time": time, "s": s}


def read_snapshot(path) -> tuple[ClosedCurve, dict]:
    return parse_snapshot(Path(path).read_text())


def _fmt(v: float) -> str:
    return repr(float(v))


def write_diagnostics_csv(path, records) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow([_fmt(v) for v in rec.as_row()])
    return path


def read_diagnostics_csv(path) -> list[DiagnosticsRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        return [DiagnosticsRecord.from_row(row) for row in reader]


TWIN_COLUMNS = ("time", "d_h1", "d_speed", "d_total")


def write_twin_csv(path, report) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TWIN_COLUMNS)
        for row in report.rows():
            w.writerow([_fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n")
    return path
