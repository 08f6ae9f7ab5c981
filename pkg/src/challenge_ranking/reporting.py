"""Report documents and plot-data tables.

Every float is written with 9 significant digits, both in JSON reports and in
CSV plot data, so the two always carry identical numbers.  Reports contain no
timestamps or host details: identical inputs and configuration give
byte-identical output.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from . import __version__

TOOL = "challenge-ranking"
SIG_DIGITS = 9


def fmt_float(x: float) -> str:
    return format(float(x), f".{SIG_DIGITS}g")


def normalize(obj):
    """JSON-ready copy: rounded floats, NaN/inf as null, tuples as lists."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        x = float(fmt_float(x))
        return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x
    return obj


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_report(command: str, inputs: dict, config: dict, result) -> dict:
    """``inputs`` maps a role name to a path (or a list of paths)."""
    echoed = {}
    for role, paths in inputs.items():
        if isinstance(paths, (list, tuple)):
            echoed[role] = [{"path": str(p), "sha256": file_digest(p)} for p in paths]
        else:
            echoed[role] = {"path": str(paths), "sha256": file_digest(paths)}
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "inputs": echoed,
        "config": config,
        "result": result,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(normalize(report), indent=2, ensure_ascii=False) + "\n"


def csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = normalize(float(v))
        return "" if v is None else (str(v) if isinstance(v, int) else fmt_float(v))
    return str(v)


def write_plot_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([csv_cell(v) for v in row])
