"""Reading and writing evolution traces and operator tables.

Complex numbers are stored as ``[re, im]`` pairs in JSON and as adjacent
``name.re`` / ``name.im`` columns in CSV. Floats are written with ``repr`` so a
round trip is exact.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .dynamics import EvolutionTrace, phase_space

SCHEMA = "qphase.trace/1"


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m) -> list:
    """Matrix as a list of rows, each a list of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=np.complex128)
    return [[complex_pair(z) for z in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise ValueError("matrix must be rows of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _pairs(values) -> list[list[float]]:
    return [complex_pair(z) for z in values]


def _unpairs(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return a[:, 0] + 1j * a[:, 1]


def csv_header(trace: EvolutionTrace) -> list[str]:
    cols = ["t"]
    for name in list(trace.labels) + list(trace.line_labels):
        cols += [f"{name}.re", f"{name}.im"]
    cols.append("negative")
    return cols


def trace_rows(trace: EvolutionTrace, tol: float = 1e-9):
    flat = trace.flat()
    neg = trace.negative_mask(tol)
    for k, t in enumerate(trace.times):
        row = [repr(float(t))]
        for z in np.concatenate([flat[k], trace.conserved[k]]):
            row += [repr(float(z.real)), repr(float(z.imag))]
        row.append(str(int(neg[k])))
        yield row


def write_csv(trace: EvolutionTrace, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(csv_header(trace))
    w.writerows(trace_rows(trace))


def trace_to_dict(trace: EvolutionTrace) -> dict:
    neg = trace.negative_mask()
    return {
        "schema": SCHEMA,
        "dim": trace.dim,
        "points": list(trace.labels),
        "lines": list(trace.line_labels),
        "negativity_onset": trace.negativity_onset,
        "samples": [
            {
                "t": float(t),
                "values": _pairs(trace.flat()[k]),
                "line_sums": _pairs(trace.conserved[k]),
                "negative": bool(neg[k]),
            }
            for k, t in enumerate(trace.times)
        ],
    }


def write_json(trace: EvolutionTrace, stream) -> None:
    json.dump(trace_to_dict(trace), stream, indent=1)
    stream.write("\n")


def write_trace(trace: EvolutionTrace, path, fmt: str = "json") -> None:
    writer = {"json": write_json, "csv": write_csv}.get(fmt)
    if writer is None:
        raise ValueError(f"unknown trace format {fmt!r}")
    with open(path, "w", newline="") as fh:
        writer(trace, fh)


def dumps_trace(trace: EvolutionTrace, fmt: str = "json") -> str:
    buf = io.StringIO()
    {"json": write_json, "csv": write_csv}[fmt](trace, buf)
    return buf.getvalue()


def _shape_for(dim: int, n_times: int):
    return (n_times,) + phase_space(dim).shape


def trace_from_dict(data: dict) -> EvolutionTrace:
    if data.get("schema") != SCHEMA:
        raise ValueError(f"not a trace document (schema {data.get('schema')!r})")
    samples = data["samples"]
    dim = int(data["dim"])
    return EvolutionTrace(
        dim=dim,
        times=[s["t"] for s in samples],
        snapshots=np.array([_unpairs(s["values"]) for s in samples]).reshape(_shape_for(dim, len(samples))),
        conserved=np.array([_unpairs(s["line_sums"]) for s in samples]),
        negativity_onset=data.get("negativity_onset"),
        labels=tuple(data["points"]),
        line_labels=tuple(data["lines"]),
    )


def read_csv(stream, dim: int) -> EvolutionTrace:
    """Read a CSV trace; ``dim`` fixes how many columns are lattice points."""
    space = phase_space(dim)
    n_pts = int(np.prod(space.shape))
    reader = csv.reader(stream)
    header = next(reader)
    n_lines = (len(header) - 2) // 2 - n_pts
    if n_lines != len(space.line_labels):
        raise ValueError(f"CSV has {len(header)} columns, which does not fit dim={dim}")
    rows = [[float(x) for x in row] for row in reader if row]
    a = np.array(rows)
    vals = a[:, 1:-1:2] + 1j * a[:, 2:-1:2]
    trace = EvolutionTrace(
        dim=dim,
        times=a[:, 0],
        snapshots=vals[:, :n_pts].reshape(_shape_for(dim, len(a))),
        conserved=vals[:, n_pts:],
        labels=tuple(h[:-3] for h in header[1 : 1 + 2 * n_pts : 2]),
        line_labels=tuple(h[:-3] for h in header[1 + 2 * n_pts : -1 : 2]),
    )
    neg = np.flatnonzero(a[:, -1] > 0)
    trace.negativity_onset = float(a[neg[0], 0]) if neg.size else None
    return trace


def read_trace(path, fmt: str | None = None, dim: int | None = None) -> EvolutionTrace:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    with open(path, newline="") as fh:
        if fmt == "json":
            return trace_from_dict(json.load(fh))
        if fmt == "csv":
            if dim is None:
                raise ValueError("reading a CSV trace needs dim")
            return read_csv(fh, dim)
    raise ValueError(f"unknown trace format {fmt!r}")


def load_matrix(path) -> np.ndarray:
    """Load a matrix stored as JSON ``[re, im]`` rows."""
    with open(path) as fh:
        return matrix_from_json(json.load(fh))
