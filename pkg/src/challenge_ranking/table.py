"""Per-case challenge results: algorithm x case x metric, with missing values.

CSV format (UTF-8): header ``algorithm,case,metric,value``, one row per
(algorithm, case, metric); an empty ``value`` field means missing, as does an
absent row.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError

HIGHER = "higher-better"
LOWER = "lower-better"
CSV_HEADER = ["algorithm", "case", "metric", "value"]


@dataclass(frozen=True)
class MetricSpec:
    metric_id: str
    orientation: str = HIGHER
    domain: tuple[float, float] | None = None
    worst_value: float | None = None

    def __post_init__(self):
        if self.orientation not in (HIGHER, LOWER):
            raise InputError(f"orientation must be {HIGHER!r} or {LOWER!r}, got {self.orientation!r}")
        if self.domain is not None:
            lo, hi = self.domain
            if not lo <= hi:
                raise InputError(f"empty domain {self.domain} for {self.metric_id}")
            object.__setattr__(self, "domain", (float(lo), float(hi)))
        if self.worst_value is not None and not self.in_domain(self.worst_value):
            raise InputError(f"worst value {self.worst_value} outside domain of {self.metric_id}")

    @property
    def higher_better(self) -> bool:
        return self.orientation == HIGHER

    def in_domain(self, value: float) -> bool:
        if not math.isfinite(value):
            return False
        if self.domain is None:
            return True
        return self.domain[0] <= value <= self.domain[1]

    def as_dict(self) -> dict:
        return {
            "metric_id": self.metric_id,
            "orientation": self.orientation,
            "domain": list(self.domain) if self.domain else None,
            "worst_value": self.worst_value,
        }


KNOWN_METRICS = {
    "DSC": MetricSpec("DSC", HIGHER, (0.0, 1.0), worst_value=0.0),
    "HD": MetricSpec("HD", LOWER, (0.0, math.inf)),
    "HD95": MetricSpec("HD95", LOWER, (0.0, math.inf)),
}


def metric_spec(metric_id: str, orientation: str | None = None, worst_value: float | None = None) -> MetricSpec:
    """Registered spec for ``metric_id``, optionally overriding fields."""
    base = KNOWN_METRICS.get(metric_id)
    if base is None:
        if orientation is None:
            raise InputError(f"unknown metric {metric_id!r}: orientation must be given")
        return MetricSpec(metric_id, orientation, None, worst_value)
    return MetricSpec(
        metric_id,
        orientation or base.orientation,
        base.domain,
        base.worst_value if worst_value is None else worst_value,
    )


def _unique(ids, what):
    ids = tuple(str(i) for i in ids)
    if len(set(ids)) != len(ids):
        raise InputError(f"{what} identifiers must be unique")
    if not ids:
        raise InputError(f"at least one {what} is required")
    return ids


@dataclass(frozen=True, eq=False)
class ResultTable:
    """Immutable results table.

    ``values[metric_id]`` is an ``(n_algorithms, n_cases)`` float array with
    NaN marking missing entries.
    """

    algorithms: tuple[str, ...]
    cases: tuple[str, ...]
    metrics: dict[str, MetricSpec]
    values: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        algs = _unique(self.algorithms, "algorithm")
        cases = _unique(self.cases, "case")
        if not self.metrics:
            raise InputError("at least one metric must be registered")
        if set(self.metrics) != set(self.values):
            raise InputError("metric specs and value arrays do not match")
        frozen = {}
        for mid, arr in self.values.items():
            arr = np.array(arr, dtype=float)
            if arr.shape != (len(algs), len(cases)):
                raise InputError(f"values for {mid} have shape {arr.shape}, expected {(len(algs), len(cases))}")
            spec = self.metrics[mid]
            present = arr[~np.isnan(arr)]
            bad = [v for v in present if not spec.in_domain(v)]
            if bad:
                raise InputError(f"{mid} value {bad[0]} outside domain {spec.domain}")
            arr.setflags(write=False)
            frozen[mid] = arr
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "cases", cases)
        object.__setattr__(self, "metrics", dict(self.metrics))
        object.__setattr__(self, "values", frozen)

    @classmethod
    def from_rows(cls, algorithms, cases, rows: dict, metric: MetricSpec | str = "DSC") -> "ResultTable":
        """Single-metric table from ``{algorithm: [value per case]}``; ``None`` = missing."""
        spec = metric if isinstance(metric, MetricSpec) else metric_spec(metric)
        arr = np.array(
            [[math.nan if v is None else float(v) for v in rows[a]] for a in algorithms], dtype=float
        )
        return cls(tuple(algorithms), tuple(cases), {spec.metric_id: spec}, {spec.metric_id: arr})

    @classmethod
    def from_records(cls, records, specs: dict[str, MetricSpec] | None = None) -> "ResultTable":
        """Build from ``(algorithm, case, metric, value)`` tuples; first-seen order."""
        algs, cases, mids = {}, {}, {}
        cells = {}
        for alg, case, mid, value in records:
            algs.setdefault(alg, len(algs))
            cases.setdefault(case, len(cases))
            mids.setdefault(mid, len(mids))
            key = (alg, case, mid)
            if key in cells:
                raise InputError(f"duplicate entry for algorithm={alg} case={case} metric={mid}")
            cells[key] = value
        specs = dict(specs or {})
        for mid in mids:
            if mid not in specs:
                specs[mid] = metric_spec(mid)
        values = {mid: np.full((len(algs), len(cases)), math.nan) for mid in mids}
        for (alg, case, mid), value in cells.items():
            if value is not None:
                values[mid][algs[alg], cases[case]] = value
        return cls(tuple(algs), tuple(cases), {m: specs[m] for m in mids}, values)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithms)

    @property
    def n_cases(self) -> int:
        return len(self.cases)

    def matrix(self, metric_id: str) -> np.ndarray:
        try:
            return self.values[metric_id]
        except KeyError:
            raise InputError(f"metric {metric_id!r} not in table (have {sorted(self.values)})") from None

    def value(self, algorithm: str, case: str, metric_id: str) -> float | None:
        v = self.matrix(metric_id)[self.algorithms.index(algorithm), self.cases.index(case)]
        return None if math.isnan(v) else float(v)

    def has_missing(self, metric_ids=None) -> bool:
        mids = metric_ids or list(self.values)
        return any(np.isnan(self.matrix(m)).any() for m in mids)

    def with_values(self, values: dict[str, np.ndarray], cases=None) -> "ResultTable":
        return ResultTable(self.algorithms, cases or self.cases, self.metrics, values)

    def select_cases(self, indices) -> "ResultTable":
        """Table restricted to (possibly repeated) case positions."""
        idx = np.asarray(indices, dtype=int)
        names = [self.cases[i] for i in idx]
        if len(set(names)) != len(names):
            names = [f"{n}#{k}" for k, n in enumerate(names)]
        return ResultTable(
            self.algorithms, tuple(names), self.metrics, {m: v[:, idx] for m, v in self.values.items()}
        )

    def records(self):
        for mid, arr in self.values.items():
            for i, alg in enumerate(self.algorithms):
                for j, case in enumerate(self.cases):
                    v = arr[i, j]
                    yield alg, case, mid, (None if math.isnan(v) else float(v))


def _parse_value(text: str, where: str):
    text = text.strip()
    if text == "":
        return None
    try:
        v = float(text)
    except ValueError:
        raise InputError(f"{where}: value {text!r} is not a number") from None
    if not math.isfinite(v):
        raise InputError(f"{where}: value {text!r} is not finite")
    return v


def read_results_csv(source, specs: dict[str, MetricSpec] | None = None) -> ResultTable:
    """Parse a results CSV from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_results_csv(fh, specs)
    name = getattr(source, "name", "<results>")
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != CSV_HEADER:
        raise InputError(f"{name}: header must be {','.join(CSV_HEADER)}, got {header}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise InputError(f"{name}:{lineno}: expected 4 fields, got {len(row)}")
        alg, case, mid = (c.strip() for c in row[:3])
        records.append((alg, case, mid, _parse_value(row[3], f"{name}:{lineno}")))
    if not records:
        raise InputError(f"{name}: no result rows")
    return ResultTable.from_records(records, specs)


def format_value(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def write_results_csv(table: ResultTable, target) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            write_results_csv(table, fh)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for alg, case, mid, v in table.records():
        writer.writerow([alg, case, mid, format_value(v)])


def results_csv_text(table: ResultTable) -> str:
    buf = io.StringIO()
    write_results_csv(table, buf)
    return buf.getvalue()
