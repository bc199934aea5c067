"""CSV, key=value and manifest files.

Floats are written with ``repr`` (shortest round-trip form) so identical runs
produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping

from .design import SWEEP_COLUMNS, RateCurvePoint
from .simulator import SimTrace

EVENT_COLUMNS = ("k", "t_s", "t_c", "delta_k", "interval_k", "sign", "cell_index", "g_bits",
                 "z_pre", "z_post")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    return "" if math.isnan(value) else repr(value)


def _write_rows(path: Path, header: Iterable[str], rows: Iterable[Iterable]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def trace_columns(trace: SimTrace) -> list[str]:
    if trace.system.n == 1:
        return ["t", "x", "xhat", "z", "u", "w", "trigger", "reception"]
    n = trace.system.n
    return (["t"] + [f"st{i + 1}" for i in range(n)] + [f"sh{i + 1}" for i in range(n)]
            + [f"s{i + 1}" for i in range(n)] + ["xhat", "z", "u", "w", "trigger", "reception"])


def write_trace_csv(trace: SimTrace, path) -> Path:
    m = trace.m
    trig, recv = trace.trigger_rows(), trace.reception_rows()
    z = trace.z[:, m]
    phys = trace.physical
    n_steps = len(trace.u)

    def rows():
        for k, t in enumerate(trace.t):
            # the held input and disturbance of the step starting at row k
            u = trace.u[k] if k < n_steps else None
            w = trace.w[k, m] if k < n_steps else None
            if trace.system.n == 1:
                yield [t, trace.s[k, 0], trace.shat[k, 0], z[k], u, w, bool(trig[k]), bool(recv[k])]
            else:
                yield ([t, *trace.s[k], *trace.shat[k], *phys[k]]
                       + [trace.shat[k, m], z[k], u, w, bool(trig[k]), bool(recv[k])])

    return _write_rows(path, trace_columns(trace), rows())


def write_events_csv(trace: SimTrace, path) -> Path:
    intervals = trace.intervals()
    rows = (
        [e.k, e.t_s, e.t_c if e.delivered else None, e.delay if e.delivered else None,
         intervals[i], "+" if e.sign > 0 else "-", e.cell_index, e.g,
         e.z_pre if e.delivered else None, e.z_post if e.delivered else None]
        for i, e in enumerate(trace.events)
    )
    return _write_rows(path, EVENT_COLUMNS, rows)


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_sweep_csv(points: Iterable[RateCurvePoint | Mapping], path, extra_columns=()) -> Path:
    header = list(SWEEP_COLUMNS) + list(extra_columns)

    def rows():
        for p in points:
            d = p.as_row() if isinstance(p, RateCurvePoint) else p
            yield [d.get(c) for c in header]

    return _write_rows(path, header, rows())


def write_kv(items: Mapping, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{k}={fmt(v)}" for k, v in items.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_kv(path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_manifest(manifest: Mapping, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
