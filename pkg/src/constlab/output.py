"""Table serialization, SNR grids, run manifests and plot scripts."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

MAX_GRID_POINTS = 1_000_000


@dataclass(frozen=True)
class SnrPoint:
    db: float
    linear: float


def parse_snr_grid(spec: str) -> list[SnrPoint]:
    """Parse 'start:stop:step' in dB into an inclusive grid.

    The grid is generated by integer stepping (start + i*step) so repeated
    runs serialize to identical bytes.
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"SNR grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"SNR grid must be numeric, got {spec!r}") from exc
    if step <= 0.0:
        raise ValueError(f"SNR grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"SNR grid needs start <= stop, got {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > MAX_GRID_POINTS:
        raise ValueError(f"SNR grid has {count} points, above {MAX_GRID_POINTS}")
    return [
        SnrPoint(db=start + i * step, linear=10.0 ** ((start + i * step) / 10.0))
        for i in range(count)
    ]


def format_value(value) -> str:
    """CSV cell: empty for None, 12 significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


class CurveTable:
    """Fixed-column table with CSV and JSON emission."""

    def __init__(self, columns: list[str]):
        self.columns = list(columns)
        self.rows: list[list] = []

    def add_row(self, values: dict) -> None:
        self.rows.append([values.get(c) for c in self.columns])

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        records = [dict(zip(self.columns, row)) for row in self.rows]
        return json.dumps({"columns": self.columns, "rows": records}, indent=1)

    def write(self, path: str, fmt: str = "csv") -> None:
        if fmt == "csv":
            payload = self.to_csv()
        elif fmt == "json":
            payload = self.to_json()
        else:
            raise ValueError(f"format must be csv or json, got {fmt!r}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(
    path: str,
    command: str,
    config: dict,
    files: list[str],
    started: str,
    finished: str,
) -> dict:
    """Emit a run manifest with per-file sha256 digests; stable key order."""
    from . import __version__

    manifest = {
        "tool": "constlab",
        "version": __version__,
        "command": command,
        "config": config,
        "started": started,
        "finished": finished,
        "files": {f: sha256_file(f) for f in files},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest


def gnuplot_script(
    out_png: str, curves: list[tuple[str, str, int, str]], title: str
) -> str:
    """Plot script for the comparison figure.

    curves: (csv_path, title, column, style) per line; log-y error
    probability against SNR in dB.
    """
    lines = [
        "set datafile separator ','",
        f"set output '{out_png}'",
        "set terminal pngcairo size 900,650",
        f"set title '{title}'",
        "set xlabel 'SNR (dB)'",
        "set ylabel 'message error probability'",
        "set logscale y",
        "set yrange [1e-12:1]",
        "set key outside right",
        "set grid",
    ]
    plot_parts = [
        f"'{path}' using 1:{col} skip 1 with lines {style} title '{label}'"
        for path, label, col, style in curves
    ]
    lines.append("plot \\\n  " + ", \\\n  ".join(plot_parts))
    return "\n".join(lines) + "\n"
