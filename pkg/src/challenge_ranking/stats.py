"""Small numerical helpers shared by metrics, robustness and reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError


def percentile(values, q: float) -> float:
    """Percentile by sorted linear interpolation at index ``(n - 1) * q``.

    ``q`` is a fraction in [0, 1].  This is the single interpolation rule used
    everywhere in the package (HD95, quartiles, boxplots).
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise InputError("percentile of an empty sequence")
    if not 0.0 <= q <= 1.0:
        raise InputError(f"quantile must lie in [0, 1], got {q}")
    h = (v.size - 1) * q
    lo = math.floor(h)
    hi = math.ceil(h)
    if lo == hi:
        return float(v[lo])
    return float(v[lo] + (h - lo) * (v[hi] - v[lo]))


@dataclass(frozen=True)
class BoxplotSummary:
    median: float
    q1: float
    q3: float
    iqr: float
    lower_whisker: float
    upper_whisker: float
    mean: float
    outliers: tuple[float, ...]
    whiskers: str = "median"

    def as_dict(self) -> dict:
        return {
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "iqr": self.iqr,
            "lower_whisker": self.lower_whisker,
            "upper_whisker": self.upper_whisker,
            "mean": self.mean,
            "outliers": list(self.outliers),
            "whiskers": self.whiskers,
        }


def boxplot_summary(values, whiskers: str = "median") -> BoxplotSummary:
    """Boxplot statistics.

    With ``whiskers="median"`` (default) the whiskers reach the most extreme
    observations within ``median +/- 1.5 * IQR``; ``"quartile"`` anchors them
    at ``q1 - 1.5 * IQR`` and ``q3 + 1.5 * IQR`` instead.  The median-anchored
    rule can put a whisker inside the box on skewed data.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise InputError("boxplot summary needs at least one value")
    if not np.all(np.isfinite(v)):
        raise InputError("boxplot summary needs finite values")
    med = percentile(v, 0.5)
    q1 = percentile(v, 0.25)
    q3 = percentile(v, 0.75)
    iqr = q3 - q1
    if whiskers == "median":
        lo_fence, hi_fence = med - 1.5 * iqr, med + 1.5 * iqr
    elif whiskers == "quartile":
        lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    else:
        raise InputError(f"unknown whisker rule {whiskers!r}")
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    if inside.size == 0:
        lower = upper = med
    else:
        lower = float(inside.min())
        upper = float(inside.max())
    outliers = tuple(float(x) for x in np.sort(v[(v < lower) | (v > upper)]))
    return BoxplotSummary(
        median=med,
        q1=q1,
        q3=q3,
        iqr=iqr,
        lower_whisker=lower,
        upper_whisker=upper,
        mean=math.fsum(v) / v.size,
        outliers=outliers,
        whiskers=whiskers,
    )
