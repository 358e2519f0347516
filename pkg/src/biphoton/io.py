"""CSV and sidecar output with reproducible byte-identical bodies.

Every file starts with `# key: value` metadata lines (tool version,
config echo, seeds) followed by a column-name row and `%.10g`-formatted
data rows.  Timestamps are written only when explicitly enabled, so a
rerun with the same inputs produces identical bytes.  Histograms get a
plain-JSON sidecar `<name>.meta.json` carrying the full detection
config echo and singles totals.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import OutputError, ValidationError
from .photostatistics import CoincidenceHistogram


def _flatten(meta: dict, prefix: str = "") -> list[tuple[str, str]]:
    items: list[tuple[str, str]] = []
    for key in sorted(meta):
        value = meta[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            items.extend(_flatten(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            items.append((name, json.dumps(list(value))))
        else:
            items.append((name, str(value)))
    return items


def write_csv(
    path,
    columns: dict,
    metadata: dict | None = None,
    timestamps: bool = False,
) -> None:
    """Write named columns with a commented metadata header."""
    names = list(columns)
    if not names:
        raise ValidationError("need at least one column")
    arrays = [np.asarray(columns[n]) for n in names]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValidationError("columns must share a length")
    lines = [f"# tool: biphoton {__version__}"]
    if timestamps:
        lines.append(f"# written: {datetime.now(timezone.utc).isoformat()}")
    for key, value in _flatten(metadata or {}):
        lines.append(f"# {key}: {value}")
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(_format_cell(v) for v in row))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _format_cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def read_csv(path) -> tuple[dict, dict]:
    """Read a toolkit CSV; returns (columns, metadata)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    meta: dict = {}
    names: list[str] | None = None
    rows: list[list[float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("# ")
            if ": " in body:
                key, value = body.split(": ", 1)
                meta[key] = value
            continue
        if names is None:
            names = line.split(",")
            continue
        rows.append([float(x) for x in line.split(",")])
    if names is None:
        raise OutputError(f"{path} has no column header")
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(names))
    return {n: data[:, i] for i, n in enumerate(names)}, meta


def write_histogram(
    path,
    h: CoincidenceHistogram,
    metadata: dict,
    timestamps: bool = False,
) -> None:
    """Histogram CSV (tau_ns, counts) plus its JSON sidecar."""
    write_csv(
        path,
        {"tau_ns": h.bin_centers, "counts": h.counts},
        metadata={"bin_width_ns": h.bin_width},
        timestamps=timestamps,
    )
    sidecar = Path(str(path) + ".meta.json")
    try:
        sidecar.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {sidecar}: {exc}") from exc


def read_histogram(path) -> tuple[CoincidenceHistogram, dict]:
    """Load a histogram CSV and its sidecar back into objects."""
    columns, _ = read_csv(path)
    if "tau_ns" not in columns or "counts" not in columns:
        raise OutputError(f"{path} lacks the tau_ns/counts schema")
    sidecar = Path(str(path) + ".meta.json")
    try:
        meta = json.loads(sidecar.read_text())
    except OSError as exc:
        raise OutputError(f"cannot read sidecar {sidecar}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise OutputError(f"sidecar {sidecar} is not valid JSON: {exc}") from exc
    h = CoincidenceHistogram(
        bin_width=float(meta["bin_width_ns"]),
        counts=np.asarray(np.rint(columns["counts"]), dtype=np.int64),
        n_singles_s=int(meta["n_singles_s"]),
        n_singles_as=int(meta["n_singles_as"]),
        measurement_time=float(meta["measurement_time_s"]),
    )
    return h, meta
