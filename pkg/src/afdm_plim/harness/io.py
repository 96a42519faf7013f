"""Self-describing CSV / JSON result files."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

from .experiments import ResultRow

__all__ = ["COLUMNS", "format_rows", "write_rows", "read_rows"]

COLUMNS = ("label", "sweep_value", "metric", "value", "trials", "stderr")

SWEEP_UNITS = {
    "rate": "block size U (0 = ungrouped)",
    "ber": "SNR dB = per-subcarrier symbol energy / noise variance",
    "af": "unused (0)",
    "range": "transmit amplitude scale in dB relative to unit noise variance",
}


def _num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def format_rows(rows: Sequence[ResultRow], experiment: str, config: dict, fmt: str = "csv") -> str:
    config = _json_safe(config)
    if fmt == "json":
        payload = {
            "experiment": experiment,
            "sweep_unit": SWEEP_UNITS.get(experiment, ""),
            "config": config,
            "rows": [_json_safe({c: getattr(r, c) for c in COLUMNS}) for r in rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown output format {fmt!r}")
    buf = io.StringIO()
    buf.write(f"# experiment: {experiment}\n")
    buf.write(f"# seed: {config.get('seed')}\n")
    buf.write(f"# sweep_value: {SWEEP_UNITS.get(experiment, '')}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r.label, _num(r.sweep_value), r.metric, _num(r.value), r.trials, _num(r.stderr)])
    return buf.getvalue()


def write_rows(rows: Sequence[ResultRow], path, experiment: str, config: dict, fmt: str = "csv") -> None:
    Path(path).write_text(format_rows(rows, experiment, config, fmt))


def read_rows(path) -> list[ResultRow]:
    """Parse a CSV written by :func:`write_rows` (header comments are skipped)."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [
        ResultRow(d["label"], float(d["sweep_value"]), d["metric"], float(d["value"]),
                  int(d["trials"]), float(d["stderr"]))
        for d in reader
    ]
