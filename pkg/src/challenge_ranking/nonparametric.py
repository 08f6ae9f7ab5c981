"""Kendall's tau-b and the Wilcoxon signed rank test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import rankdata

from .errors import InputError, TauUndefined

EXACT_MAX_N = 25
ZERO_METHOD = "wilcoxon"  # zero differences are dropped before ranking


@lru_cache(maxsize=64)
def _pairs(n: int):
    return np.triu_indices(n, 1)


def kendall_tau_b(x, y) -> float:
    """Tie-corrected Kendall rank correlation of two equally long vectors.

    ``(C - D) / sqrt((n0 - n1) * (n0 - n2))`` with ``n0`` the number of pairs
    and ``n1``/``n2`` the pairs tied in ``x``/``y``.  Equals tau-a without ties.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError(f"tau needs two vectors of equal length, got {x.shape} and {y.shape}")
    i, j = _pairs(x.size)
    sx = np.sign(x[i] - x[j])
    sy = np.sign(y[i] - y[j])
    n0 = i.size
    denom = (n0 - np.count_nonzero(sx == 0)) * (n0 - np.count_nonzero(sy == 0))
    if denom == 0:
        raise TauUndefined("tau is undefined when either ranking is constant")
    tau = float(np.sum(sx * sy)) / math.sqrt(denom)
    return min(1.0, max(-1.0, tau))


def kendall_tau(r1, r2) -> float:
    """Tau-b between two :class:`~challenge_ranking.ranking.Ranking` objects.

    Both rankings must cover the same algorithms.
    """
    a1, a2 = set(r1.algorithms), set(r2.algorithms)
    if a1 != a2:
        raise InputError(
            f"rankings cover different algorithms: {sorted(a1 ^ a2)}"
        )
    algs = r1.algorithms
    return kendall_tau_b(r1.ranks(algs), r2.ranks(algs))


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # sum of ranks of positive differences
    w_minus: float
    p_value: float
    n: int
    zeros_dropped: int
    method: str  # "exact", "normal" or "degenerate"

    @property
    def degenerate(self) -> bool:
        return self.method == "degenerate"

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "w_minus": self.w_minus,
            "p_value": self.p_value,
            "n": self.n,
            "zeros_dropped": self.zeros_dropped,
            "method": self.method,
            "degenerate": self.degenerate,
            "alternative": "two-sided",
            "zero_method": ZERO_METHOD,
            "exact_max_n": EXACT_MAX_N,
        }


def _exact_two_sided(doubled_ranks: np.ndarray, observed2: int) -> float:
    """Exact p over all ``2**n`` sign assignments via a counting recursion.

    Works in doubled ranks so that midranks (x.5) stay integral.
    """
    total2 = int(doubled_ranks.sum())
    counts = np.zeros(total2 + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:-r] if r else counts
        counts = counts + shifted
    t = np.arange(total2 + 1)
    extreme = np.abs(2 * t - total2) >= abs(2 * observed2 - total2)
    return float(counts[extreme].sum()) / float(2 ** len(doubled_ranks))


def wilcoxon_signed_rank(x, y=None, exact_max_n: int = EXACT_MAX_N) -> WilcoxonResult:
    """Two-sided Wilcoxon signed rank test on paired samples.

    ``x`` may be a sequence of ``(a, b)`` pairs, or two sequences ``x, y``.
    Zero differences are dropped; tied absolute differences get midranks.
    The p-value is exact for ``n <= exact_max_n`` and otherwise uses the
    normal approximation with tie and continuity corrections.
    """
    if y is None:
        pairs = np.asarray(x, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise InputError("expected a sequence of (a, b) pairs")
        a, b = pairs[:, 0], pairs[:, 1]
    else:
        a = np.asarray(x, dtype=float)
        b = np.asarray(y, dtype=float)
        if a.shape != b.shape:
            raise InputError("paired samples must have equal length")
    if a.size == 0:
        raise InputError("Wilcoxon test needs at least one pair")
    d = a - b
    if not np.all(np.isfinite(d)):
        raise InputError("paired differences must be finite")
    nonzero = d[d != 0]
    zeros = int(d.size - nonzero.size)
    n = int(nonzero.size)
    if n == 0:
        return WilcoxonResult(0.0, 0.0, 1.0, 0, zeros, "degenerate")
    ranks = rankdata(np.abs(nonzero), method="average")
    w_plus = float(ranks[nonzero > 0].sum())
    w_minus = float(ranks[nonzero < 0].sum())
    if n <= exact_max_n:
        doubled = np.rint(2 * ranks).astype(np.int64)
        p = _exact_two_sided(doubled, int(round(2 * w_plus)))
        method = "exact"
    else:
        mean = n * (n + 1) / 4
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24 - float(np.sum(tie_counts ** 3 - tie_counts)) / 48
        z = max(abs(w_plus - mean) - 0.5, 0.0) / math.sqrt(var) if var > 0 else 0.0
        p = math.erfc(z / math.sqrt(2))
        method = "normal"
    return WilcoxonResult(w_plus, w_minus, min(1.0, p), n, zeros, method)
