"""How fragile is a ranking?

Resampling (bootstrap, leave-one-out) stability of the winner, paired
comparison of two schemes' stability over many tasks, sensitivity to the
observer who produced the reference, and the missing-data audit that asks
whether an algorithm could have won by withholding its worst cases.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, PreconditionError, TauUndefined
from .nonparametric import WilcoxonResult, kendall_tau, kendall_tau_b, wilcoxon_signed_rank
from .ranking import IGNORE, METRIC_BASED, Ranking, RankingScheme, rank, rank_arrays
from .table import ResultTable

ALGORITHM_CRITERION = "Number of algorithms >= 3"
CASE_CRITERION = "Number of test cases > 1"
SIGNIFICANCE_LEVEL = 0.05
AUDIT_THRESHOLD = 0.5


@dataclass(frozen=True)
class Eligibility:
    eligible: bool
    violations: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"eligible": self.eligible, "violations": list(self.violations)}


def inclusion_check(table: ResultTable) -> Eligibility:
    """Task-level inclusion criteria for resampling analyses."""
    violations = []
    if table.n_algorithms < 3:
        violations.append(ALGORITHM_CRITERION)
    if table.n_cases <= 1:
        violations.append(CASE_CRITERION)
    return Eligibility(not violations, tuple(violations))


@dataclass(frozen=True)
class BootstrapConfig:
    samples: int = 1000
    seed: int = 0
    # fraction of resamples a non-winner must top to count as an usurper
    usurper_threshold: float = 0.01
    # execution only; never changes results
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) < 1:
            raise InputError(f"bootstrap needs at least one sample, got {self.samples}")
        if not 0.0 <= self.usurper_threshold <= 1.0:
            raise InputError("usurper threshold must be a fraction in [0, 1]")
        if int(self.workers) < 1:
            raise InputError("workers must be >= 1")

    def as_dict(self) -> dict:
        return {
            "samples": int(self.samples),
            "seed": int(self.seed),
            "usurper_threshold": self.usurper_threshold,
            "rng": "numpy PCG64 seeded per resample from (seed, resample index)",
        }


@dataclass(frozen=True)
class StabilityReport:
    method: str
    original: Ranking
    resamples: int
    winner_stability: float | None
    usurper_fraction: float | None
    usurper_min_count: int
    rank1_frequency: dict[str, float]
    taus: tuple[float, ...]
    mean_distinct_case_fraction: float | None
    excluded: bool = False
    reason: str | None = None
    config: dict = field(default_factory=dict)

    @property
    def original_winners(self) -> tuple[str, ...]:
        return self.original.winners

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "config": dict(self.config),
            "original_ranking": self.original.as_dict(),
            "original_winners": list(self.original_winners),
            "excluded": self.excluded,
            "excluded_reason": self.reason,
            "resamples": self.resamples,
            "winner_stability": self.winner_stability,
            "usurper_fraction": self.usurper_fraction,
            "usurper_min_count": self.usurper_min_count,
            "rank1_frequency": dict(self.rank1_frequency),
            "mean_distinct_case_fraction": self.mean_distinct_case_fraction,
            "taus": [None if math.isnan(t) else t for t in self.taus],
        }


def resample_indices(seed: int, index: int, n_cases: int) -> np.ndarray:
    """Case positions drawn with replacement for bootstrap sample ``index``."""
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return rng.integers(0, n_cases, size=n_cases)


def _ranks_for(table: ResultTable, scheme: RankingScheme, columns) -> np.ndarray:
    arrays = {mid: table.values[mid][:, columns] for mid in scheme.metrics}
    return rank_arrays(arrays, table.metrics, scheme)[1]


def _bootstrap_chunk(args):
    table, scheme, seed, indices = args
    out = []
    for b in indices:
        cols = resample_indices(seed, b, table.n_cases)
        out.append((_ranks_for(table, scheme, cols), len(np.unique(cols)) / table.n_cases))
    return out


def _tau_vs(original: np.ndarray, other: np.ndarray) -> float:
    common = ~np.isnan(original) & ~np.isnan(other)
    try:
        return kendall_tau_b(original[common], other[common])
    except TauUndefined:
        return math.nan


def _summarize(method, table, scheme, original, resampled, min_count, distinct, config):
    winners = original.winners
    win = table.algorithms.index(winners[0])
    orig_ranks = np.array(
        [original.entries[a][1] if a in original.entries else math.nan for a in table.algorithms]
    )
    top = np.array([r == 1 for r in resampled])  # (resamples, algorithms); NaN never equals 1
    counts = top.sum(axis=0)
    n = len(resampled)
    others = [i for i, a in enumerate(table.algorithms) if a in original.entries and a not in winners]
    usurpers = sum(1 for i in others if counts[i] >= min_count)
    return StabilityReport(
        method=method,
        original=original,
        resamples=n,
        winner_stability=float(counts[win]) / n,
        usurper_fraction=usurpers / len(others) if others else 0.0,
        usurper_min_count=min_count,
        rank1_frequency={a: float(counts[i]) / n for i, a in enumerate(table.algorithms)},
        taus=tuple(_tau_vs(orig_ranks, r) for r in resampled),
        mean_distinct_case_fraction=distinct,
        config=config,
    )


def _excluded_report(method, original, reason, config, min_count=0):
    return StabilityReport(
        method=method,
        original=original,
        resamples=0,
        winner_stability=None,
        usurper_fraction=None,
        usurper_min_count=min_count,
        rank1_frequency={},
        taus=(),
        mean_distinct_case_fraction=None,
        excluded=True,
        reason=reason,
        config=config,
    )


def _original_or_excluded(method, table, scheme, config):
    original = rank(table, scheme)
    if len(original.winners) != 1:
        reason = f"original ranking has {len(original.winners)} winners"
        return original, _excluded_report(method, original, reason, config)
    return original, None


def bootstrap_stability(table: ResultTable, scheme: RankingScheme = RankingScheme(),
                        cfg: BootstrapConfig = BootstrapConfig(),
                        enforce_inclusion: bool = True) -> StabilityReport:
    """Winner stability over ``cfg.samples`` bootstrap resamples of the cases.

    Tasks whose original ranking has several winners get an excluded report.
    Resample ``b`` depends only on ``(cfg.seed, b)``, so ``cfg.workers`` never
    changes the result.
    """
    config = {"scheme": scheme.as_dict(), "bootstrap": cfg.as_dict()}
    original, excluded = _original_or_excluded("bootstrap", table, scheme, config)
    if excluded:
        return excluded
    if enforce_inclusion:
        elig = inclusion_check(table)
        if not elig.eligible:
            raise PreconditionError(f"task not eligible: {', '.join(elig.violations)}", elig.violations)
    B = int(cfg.samples)
    workers = min(int(cfg.workers), B)
    if workers == 1:
        results = _bootstrap_chunk((table, scheme, cfg.seed, range(B)))
    else:
        chunks = [range(k, B, workers) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_bootstrap_chunk, [(table, scheme, cfg.seed, c) for c in chunks]))
        results = [None] * B
        for chunk, part in zip(chunks, parts):
            for b, res in zip(chunk, part):
                results[b] = res
    resampled = [r for r, _ in results]
    distinct = math.fsum(d for _, d in results) / B
    min_count = max(1, math.ceil(round(cfg.usurper_threshold * B, 9)))
    return _summarize("bootstrap", table, scheme, original, resampled, min_count, distinct, config)


def leave_one_out_stability(table: ResultTable, scheme: RankingScheme = RankingScheme(),
                            enforce_inclusion: bool = False) -> StabilityReport:
    """Winner stability over the rankings obtained by omitting each case once.

    A non-winner counts as an usurper if it wins any single fold.
    """
    config = {"scheme": scheme.as_dict()}
    if table.n_cases < 2:
        raise PreconditionError("leave-one-out needs at least two cases", (CASE_CRITERION,))
    original, excluded = _original_or_excluded("leave-one-out", table, scheme, config)
    if excluded:
        return excluded
    if enforce_inclusion:
        elig = inclusion_check(table)
        if not elig.eligible:
            raise PreconditionError(f"task not eligible: {', '.join(elig.violations)}", elig.violations)
    n = table.n_cases
    resampled = [_ranks_for(table, scheme, np.delete(np.arange(n), k)) for k in range(n)]
    return _summarize("leave-one-out", table, scheme, original, resampled, 1, (n - 1) / n, config)


@dataclass(frozen=True)
class SchemeComparison:
    scheme_a: RankingScheme
    scheme_b: RankingScheme
    stability_a: tuple[float, ...]
    stability_b: tuple[float, ...]
    test: WilcoxonResult
    excluded_tasks: dict[int, str] = field(default_factory=dict)

    @property
    def p_value(self) -> float:
        return self.test.p_value

    @property
    def statistic(self) -> float:
        return self.test.statistic

    @property
    def degenerate(self) -> bool:
        return self.test.degenerate

    @property
    def significant(self) -> bool:
        return self.test.p_value < SIGNIFICANCE_LEVEL

    @property
    def median_difference(self) -> float:
        return float(np.median(np.subtract(self.stability_a, self.stability_b)))

    def as_dict(self) -> dict:
        return {
            "scheme_a": self.scheme_a.as_dict(),
            "scheme_b": self.scheme_b.as_dict(),
            "winner_stability_a": list(self.stability_a),
            "winner_stability_b": list(self.stability_b),
            "median_difference_a_minus_b": self.median_difference,
            "wilcoxon": self.test.as_dict(),
            "significance_level": SIGNIFICANCE_LEVEL,
            "significant": self.significant,
            "excluded_tasks": {str(k): v for k, v in self.excluded_tasks.items()},
        }


def compare_scheme_stability(tasks, scheme_a: RankingScheme, scheme_b: RankingScheme,
                             cfg: BootstrapConfig = BootstrapConfig()) -> SchemeComparison:
    """Paired Wilcoxon comparison of two schemes' bootstrap winner stability.

    Both schemes see identical resamples of each task.  Tasks excluded under
    either scheme are left out of the test and listed.
    """
    a_vals, b_vals, excluded = [], [], {}
    for k, task in enumerate(tasks):
        rep_a = bootstrap_stability(task, scheme_a, cfg)
        rep_b = bootstrap_stability(task, scheme_b, cfg)
        if rep_a.excluded or rep_b.excluded:
            excluded[k] = rep_a.reason or rep_b.reason
            continue
        a_vals.append(rep_a.winner_stability)
        b_vals.append(rep_b.winner_stability)
    if len(a_vals) < 2:
        raise PreconditionError(f"need at least two eligible tasks, have {len(a_vals)}")
    test = wilcoxon_signed_rank(a_vals, b_vals)
    return SchemeComparison(scheme_a, scheme_b, tuple(a_vals), tuple(b_vals), test, excluded)


@dataclass(frozen=True)
class AuditFinding:
    algorithm: str
    original_rank: float
    audited_rank: float | None
    dropped_cases: int
    reached_rank_1: bool
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "original_rank": self.original_rank,
            "audited_rank": self.audited_rank,
            "dropped_cases": self.dropped_cases,
            "reached_rank_1": self.reached_rank_1,
            "degenerate": self.degenerate,
        }


def missing_data_audit(table: ResultTable, scheme: RankingScheme = RankingScheme(),
                       threshold: float = AUDIT_THRESHOLD) -> list[AuditFinding]:
    """For each algorithm alone, drop its results below ``threshold`` and re-rank.

    Only meaningful for the exploitable configuration: a single higher-better
    metric, metric-based aggregation, missing values ignored.
    """
    if scheme.family != METRIC_BASED or scheme.missing_policy != IGNORE or len(scheme.metrics) != 1:
        raise PreconditionError("audit needs a single-metric, metric-based scheme that ignores missing values")
    spec = table.metrics.get(scheme.metric)
    if spec is None:
        raise InputError(f"metric {scheme.metric!r} not in table")
    if not spec.higher_better:
        raise PreconditionError(f"audit needs a higher-better metric, {spec.metric_id} is {spec.orientation}")
    original = rank(table, scheme)
    base = table.matrix(scheme.metric)
    findings = []
    for i, alg in enumerate(table.algorithms):
        if alg not in original.entries:
            continue
        row = base[i]
        drop = ~np.isnan(row) & (row < threshold)
        dropped = int(drop.sum())
        if dropped == int((~np.isnan(row)).sum()):
            findings.append(AuditFinding(alg, original.rank(alg), None, dropped, False, degenerate=True))
            continue
        audited = base.copy()
        audited[i, drop] = math.nan
        r = rank(table.with_values({**table.values, scheme.metric: audited}), scheme).rank(alg)
        findings.append(AuditFinding(alg, original.rank(alg), r, dropped, r == 1))
    return findings


@dataclass(frozen=True)
class ObserverComparison:
    observers: tuple[str, ...]
    rankings: dict[str, Ranking]
    tau: np.ndarray  # NaN where undefined
    differs: dict[tuple[str, str], bool]

    def as_dict(self) -> dict:
        return {
            "observers": list(self.observers),
            "rankings": {o: r.as_dict() for o, r in self.rankings.items()},
            "tau_matrix": [[None if math.isnan(t) else float(t) for t in row] for row in self.tau],
            "pairs": [
                {"a": a, "b": b, "tau": _nan_none(self.tau[i, j]), "rankings_differ": self.differs[(a, b)]}
                for i, a in enumerate(self.observers)
                for j, b in enumerate(self.observers)
                if i < j
            ],
        }


def _nan_none(x):
    return None if math.isnan(x) else float(x)


def observer_ranking_comparison(tables: dict[str, ResultTable],
                                scheme: RankingScheme = RankingScheme()) -> ObserverComparison:
    """Rank each observer's table and compare every pair with tau-b."""
    observers = tuple(tables)
    if len(observers) < 2:
        raise InputError("need at least two observers")
    first = tables[observers[0]]
    for o in observers[1:]:
        t = tables[o]
        if set(t.algorithms) != set(first.algorithms) or set(t.cases) != set(first.cases):
            raise InputError(f"observer {o!r} does not share the algorithm and case sets of {observers[0]!r}")
    rankings = {o: rank(tables[o], scheme) for o in observers}
    k = len(observers)
    tau = np.eye(k)
    differs = {}
    for i in range(k):
        for j in range(i + 1, k):
            ri, rj = rankings[observers[i]], rankings[observers[j]]
            try:
                t = kendall_tau(ri, rj)
            except (TauUndefined, InputError):
                t = math.nan
            tau[i, j] = tau[j, i] = t
            differs[(observers[i], observers[j])] = ri.entries.keys() != rj.entries.keys() or any(
                ri.rank(a) != rj.rank(a) for a in ri.entries
            )
    return ObserverComparison(observers, rankings, tau, differs)
