"""Ranking schemes over a :class:`ResultTable`.

Two aggregation families are supported:

* metric-based: aggregate each algorithm's values over cases, then rank;
* case-based: rank the algorithms on every case, then aggregate the ranks.

With several metrics the metric-based family sums the per-metric aggregates
(lower-better metrics negated first) and the case-based family averages the
per-metric ranks on each case before re-ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AggregationUndefined, InputError
from .table import MetricSpec, ResultTable

METRIC_BASED = "metric-based"
CASE_BASED = "case-based"
FAMILIES = (METRIC_BASED, CASE_BASED)
OPERATORS = ("mean", "median")
MIN_COMPETITION = "min-competition"
FRACTIONAL = "fractional"
TIE_METHODS = (MIN_COMPETITION, FRACTIONAL)
IGNORE = "ignore"
WORST_VALUE = "worst-value"
LAST_RANK = "last-rank"
REJECT = "reject"
MISSING_POLICIES = (IGNORE, WORST_VALUE, LAST_RANK, REJECT)


def _choice(value, allowed, what):
    if value not in allowed:
        raise InputError(f"{what} must be one of {allowed}, got {value!r}")
    return value


@dataclass(frozen=True)
class RankingScheme:
    """Full description of how a ranking is produced.

    The default is the most common practice in the field: a single metric,
    mean, metric-based aggregation, min-competition ties, missing values
    ignored.
    """

    metrics: tuple[str, ...] = ("DSC",)
    family: str = METRIC_BASED
    operator: str = "mean"
    tie_method: str = MIN_COMPETITION
    case_tie_method: str = FRACTIONAL
    missing_policy: str = IGNORE

    def __post_init__(self):
        metrics = (self.metrics,) if isinstance(self.metrics, str) else tuple(self.metrics)
        if not metrics or len(set(metrics)) != len(metrics):
            raise InputError(f"scheme needs distinct metric ids, got {metrics}")
        object.__setattr__(self, "metrics", metrics)
        _choice(self.family, FAMILIES, "family")
        _choice(self.operator, OPERATORS, "operator")
        _choice(self.tie_method, TIE_METHODS, "tie method")
        _choice(self.case_tie_method, TIE_METHODS, "case tie method")
        _choice(self.missing_policy, MISSING_POLICIES, "missing policy")
        if self.missing_policy == LAST_RANK and self.family != CASE_BASED:
            raise InputError("last-rank missing policy is only valid for case-based aggregation")

    @property
    def metric(self) -> str:
        if len(self.metrics) != 1:
            raise InputError(f"scheme combines {len(self.metrics)} metrics")
        return self.metrics[0]

    @property
    def composite(self) -> str | None:
        """``"metric-sum"`` or ``"rank-average"`` for multi-metric schemes."""
        if len(self.metrics) == 1:
            return None
        return "metric-sum" if self.family == METRIC_BASED else "rank-average"

    def replace(self, **changes) -> "RankingScheme":
        fields = self.as_dict()
        fields.pop("composite")
        fields.update(changes)
        return RankingScheme(**fields)

    def validate_for(self, table: ResultTable) -> None:
        for mid in self.metrics:
            table.matrix(mid)
            if self.missing_policy == WORST_VALUE and table.metrics[mid].worst_value is None:
                raise InputError(f"worst-value policy needs a worst value for metric {mid!r}")

    def as_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "family": self.family,
            "operator": self.operator,
            "tie_method": self.tie_method,
            "case_tie_method": self.case_tie_method,
            "missing_policy": self.missing_policy,
            "composite": self.composite,
        }


def aggregate(values, operator: str = "mean") -> float:
    """Mean or median of a non-empty list of reals.

    The mean uses :func:`math.fsum` so the result does not depend on the order
    of the values.
    """
    vals = sorted(float(v) for v in values)
    n = len(vals)
    if n == 0:
        raise AggregationUndefined("cannot aggregate an empty list of values")
    if operator == "mean":
        return math.fsum(vals) / n
    if operator == "median":
        mid = n // 2
        if n % 2:
            return vals[mid]
        return (vals[mid - 1] + vals[mid]) / 2
    raise InputError(f"operator must be one of {OPERATORS}, got {operator!r}")


def _aggregate_rows(matrix: np.ndarray, operator: str) -> np.ndarray:
    """Row-wise aggregate ignoring NaN; rows without values give NaN."""
    out = np.full(matrix.shape[0], math.nan)
    for i, row in enumerate(matrix):
        vals = row[~np.isnan(row)]
        if vals.size:
            out[i] = aggregate(vals, operator)
    return out


def _ranks_along_axis0(keys: np.ndarray, tie_method: str) -> np.ndarray:
    """Ranks of ``keys`` (smaller is better) along axis 0; NaN keys stay NaN
    and are not counted against anyone."""
    better = np.sum(keys[np.newaxis, ...] < keys[:, np.newaxis, ...], axis=1)
    ranks = 1.0 + better
    if tie_method == FRACTIONAL:
        equal = np.sum(keys[np.newaxis, ...] == keys[:, np.newaxis, ...], axis=1)
        ranks = ranks + (equal - 1) / 2
    return np.where(np.isnan(keys), math.nan, ranks)


def assign_ranks(scores, higher_better: bool = True, tie_method: str = MIN_COMPETITION) -> np.ndarray:
    """Rank 1 is best.  Ties share a rank: ``1, 2, 2, 4`` (min-competition)
    or ``1, 2.5, 2.5, 4`` (fractional)."""
    s = np.asarray(scores, dtype=float)
    _choice(tie_method, TIE_METHODS, "tie method")
    if not np.all(np.isfinite(s)):
        raise InputError("scores must be finite to be ranked")
    return _ranks_along_axis0(-s if higher_better else s, tie_method)


def case_ranks(matrix: np.ndarray, higher_better: bool, tie_method: str = FRACTIONAL,
               last_rank: bool = False) -> np.ndarray:
    """Per-case (column-wise) ranks of algorithms.

    Missing values (NaN) stay NaN, or with ``last_rank`` are placed below every
    algorithm that has a value on that case, tied among themselves.
    """
    m = np.asarray(matrix, dtype=float)
    out = _ranks_along_axis0(-m if higher_better else m, tie_method)
    if last_rank:
        missing = np.isnan(m)
        n = m.shape[0]
        k = n - missing.sum(axis=0)
        worst = k + 1.0 if tie_method == MIN_COMPETITION else (k + 1.0 + n) / 2
        out = np.where(missing, worst[np.newaxis, :], out)
    return out


def rank_arrays(arrays: dict[str, np.ndarray], specs: dict[str, MetricSpec], scheme: RankingScheme):
    """Core ranking on raw ``(n_algorithms, n_cases)`` arrays.

    Returns ``(scores, ranks, higher_better, excluded)`` where ``scores`` and
    ``ranks`` hold NaN for excluded rows and ``excluded`` maps row index to
    the reason.
    """
    n = next(iter(arrays.values())).shape[0]
    excluded: dict[int, str] = {}
    mats = {}
    for mid in scheme.metrics:
        m = arrays[mid]
        if scheme.missing_policy == WORST_VALUE:
            m = np.where(np.isnan(m), specs[mid].worst_value, m)
        mats[mid] = m
    if scheme.missing_policy == REJECT:
        for i in range(n):
            if any(np.isnan(mats[mid][i]).any() for mid in scheme.metrics):
                excluded[i] = "rejected: missing values"
    active = np.array([i for i in range(n) if i not in excluded], dtype=int)
    sub = {mid: m[active] for mid, m in mats.items()}

    if scheme.family == METRIC_BASED:
        if len(scheme.metrics) == 1:
            mid = scheme.metric
            agg = _aggregate_rows(sub[mid], scheme.operator)
            higher = specs[mid].higher_better
        else:
            agg = np.zeros(len(active))
            for mid in scheme.metrics:
                part = _aggregate_rows(sub[mid], scheme.operator)
                agg = agg + (part if specs[mid].higher_better else -part)
            higher = True
    else:
        last = scheme.missing_policy == LAST_RANK
        per_metric = [
            case_ranks(sub[mid], specs[mid].higher_better, scheme.case_tie_method, last)
            for mid in scheme.metrics
        ]
        if len(per_metric) == 1:
            per_case = per_metric[0]
        else:
            stacked = np.stack(per_metric)
            counts = np.sum(~np.isnan(stacked), axis=0)
            sums = np.nansum(stacked, axis=0)
            score = np.where(counts > 0, sums / np.maximum(counts, 1), math.nan)
            per_case = case_ranks(score, higher_better=False, tie_method=scheme.case_tie_method)
        agg = _aggregate_rows(per_case, scheme.operator)
        higher = False

    scores = np.full(n, math.nan)
    ranks = np.full(n, math.nan)
    usable = ~np.isnan(agg)
    for pos in np.flatnonzero(~usable):
        excluded[int(active[pos])] = "aggregation undefined: no usable values"
    scores[active] = agg
    if usable.any():
        ranks[active[usable]] = assign_ranks(agg[usable], higher, scheme.tie_method)
    return scores, ranks, higher, excluded


@dataclass(frozen=True)
class Ranking:
    """Rank assignment for one table under one scheme.

    ``entries`` maps each ranked algorithm to ``(score, rank)`` in table
    order; algorithms dropped by a missing-data policy are listed in
    ``excluded`` with a reason.
    """

    entries: dict[str, tuple[float, float]]
    scheme: RankingScheme
    higher_better: bool
    excluded: dict[str, str] = field(default_factory=dict)

    @property
    def algorithms(self) -> tuple[str, ...]:
        return tuple(self.entries)

    @property
    def winners(self) -> tuple[str, ...]:
        return tuple(a for a, (_, r) in self.entries.items() if r == 1)

    def rank(self, algorithm: str) -> float:
        return self.entries[algorithm][1]

    def score(self, algorithm: str) -> float:
        return self.entries[algorithm][0]

    def ranks(self, algorithms=None) -> np.ndarray:
        algorithms = self.algorithms if algorithms is None else algorithms
        return np.array([self.entries[a][1] for a in algorithms], dtype=float)

    def ordered(self) -> list[str]:
        """Algorithms sorted by rank (stable in table order)."""
        return sorted(self.entries, key=lambda a: self.entries[a][1])

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme.as_dict(),
            "score_orientation": "higher-better" if self.higher_better else "lower-better",
            "entries": [
                {"algorithm": a, "score": s, "rank": int(r) if float(r).is_integer() else r}
                for a, (s, r) in self.entries.items()
            ],
            "winners": list(self.winners),
            "excluded": dict(self.excluded),
        }


def _build(table: ResultTable, scheme: RankingScheme, arrays=None) -> Ranking:
    scheme.validate_for(table)
    arrays = table.values if arrays is None else arrays
    scores, ranks, higher, excluded = rank_arrays(arrays, table.metrics, scheme)
    entries = {
        a: (float(scores[i]), float(ranks[i]))
        for i, a in enumerate(table.algorithms)
        if i not in excluded
    }
    reasons = {table.algorithms[i]: excluded[i] for i in sorted(excluded)}
    return Ranking(entries, scheme, higher, reasons)


def rank_metric_based(table: ResultTable, scheme: RankingScheme = RankingScheme()) -> Ranking:
    if scheme.family != METRIC_BASED or len(scheme.metrics) != 1:
        raise InputError("rank_metric_based needs a single-metric, metric-based scheme")
    return _build(table, scheme)


def rank_case_based(table: ResultTable, scheme: RankingScheme) -> Ranking:
    if scheme.family != CASE_BASED or len(scheme.metrics) != 1:
        raise InputError("rank_case_based needs a single-metric, case-based scheme")
    return _build(table, scheme)


def rank_multi_metric(table: ResultTable, scheme: RankingScheme) -> Ranking:
    """Composite ranking over two or more metrics.

    metric-based: aggregate every metric per algorithm, sum the aggregates
    (lower-better metrics negated), rank the sums.
    case-based: on every case average each algorithm's per-metric ranks, rank
    those averages, aggregate the case ranks, rank the aggregates.
    """
    if len(scheme.metrics) < 2:
        raise InputError("a composite ranking needs at least two metrics")
    return _build(table, scheme)


def rank(table: ResultTable, scheme: RankingScheme = RankingScheme()) -> Ranking:
    """Dispatch to the ranking function matching ``scheme``."""
    if len(scheme.metrics) > 1:
        return rank_multi_metric(table, scheme)
    if scheme.family == METRIC_BASED:
        return rank_metric_based(table, scheme)
    return rank_case_based(table, scheme)
