"""Segmentation metrics between binary masks: DSC, HD and HD95.

Distances are Euclidean between voxel centres in physical units
(index times spacing).  Hausdorff-type metrics use the 6-connected surface
of each mask by default; pass ``point_set="foreground"`` to use every
foreground voxel instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InputError, MetricUndefined
from .masks import LabelMask
from .stats import percentile

POINT_SETS = ("boundary", "foreground")
HD95_QUANTILE = 0.95


@dataclass(frozen=True)
class MetricValue:
    metric_id: str
    value: float
    defined: bool = True
    # both masks empty: DSC reports 1.0 by convention
    degenerate: bool = False

    def __post_init__(self):
        if self.defined and not math.isfinite(self.value):
            raise InputError(f"defined {self.metric_id} value must be finite, got {self.value}")

    @classmethod
    def undefined(cls, metric_id: str) -> "MetricValue":
        return cls(metric_id, math.nan, defined=False)


def _check_pair(a: LabelMask, b: LabelMask, *, spacing: bool) -> None:
    if a.dims != b.dims:
        raise InputError(f"mask dimensions differ: {a.dims} vs {b.dims}")
    if spacing and a.spacing != b.spacing:
        raise InputError(f"mask spacings differ: {a.spacing} vs {b.spacing}")


def dsc(a: LabelMask, b: LabelMask) -> MetricValue:
    """Dice similarity coefficient ``2|A & B| / (|A| + |B|)``."""
    _check_pair(a, b, spacing=False)
    na = int(np.count_nonzero(a.voxels))
    nb = int(np.count_nonzero(b.voxels))
    if na + nb == 0:
        return MetricValue("DSC", 1.0, degenerate=True)
    inter = int(np.count_nonzero(a.voxels & b.voxels))
    return MetricValue("DSC", 2 * inter / (na + nb))


def extract_boundary(m: LabelMask) -> LabelMask:
    """Foreground voxels with a face neighbour that is background or off-grid.

    Singleton axes (``nz = 1`` for 2D data) have no neighbours along them.
    """
    vox = m.voxels
    interior = vox.copy()
    for axis, n in enumerate(vox.shape):
        if n == 1:
            continue
        pad = [(0, 0)] * 3
        pad[axis] = (1, 1)
        padded = np.pad(vox, pad, constant_values=False)
        lower = [slice(None)] * 3
        upper = [slice(None)] * 3
        lower[axis] = slice(0, n)
        upper[axis] = slice(2, n + 2)
        interior &= padded[tuple(lower)] & padded[tuple(upper)]
    return LabelMask(vox & ~interior, m.spacing)


def physical_points(points, spacing) -> np.ndarray:
    return np.asarray(points, dtype=float).reshape(-1, 3) * np.asarray(spacing, dtype=float)


def point_distances(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean distance between two ``(n, 3)`` physical arrays."""
    d = p - q
    return np.sqrt(np.sum(d * d, axis=1))


def directed_distances(src, dst, spacing=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Distance from every ``src`` voxel to its nearest ``dst`` voxel.

    A k-d tree finds the nearest neighbour; the distance itself is recomputed
    from the coordinates so that the result does not depend on the tree's
    internal arithmetic.
    """
    src_p = physical_points(src, spacing)
    dst_p = physical_points(dst, spacing)
    if len(src_p) == 0 or len(dst_p) == 0:
        raise MetricUndefined("directed distance needs non-empty point sets")
    _, idx = cKDTree(dst_p).query(src_p, k=1)
    return point_distances(src_p, dst_p[idx])


def _point_set(m: LabelMask, point_set: str) -> np.ndarray:
    if point_set == "boundary":
        return extract_boundary(m).points()
    if point_set == "foreground":
        return m.points()
    raise InputError(f"unknown point set {point_set!r}; expected one of {POINT_SETS}")


def _both_directions(a: LabelMask, b: LabelMask, point_set: str):
    _check_pair(a, b, spacing=True)
    pa = _point_set(a, point_set)
    pb = _point_set(b, point_set)
    if len(pa) == 0 or len(pb) == 0:
        return None
    return directed_distances(pa, pb, a.spacing), directed_distances(pb, pa, a.spacing)


def hausdorff(a: LabelMask, b: LabelMask, point_set: str = "boundary") -> MetricValue:
    dists = _both_directions(a, b, point_set)
    if dists is None:
        return MetricValue.undefined("HD")
    ab, ba = dists
    return MetricValue("HD", float(max(ab.max(), ba.max())))


def hd95(a: LabelMask, b: LabelMask, point_set: str = "boundary") -> MetricValue:
    dists = _both_directions(a, b, point_set)
    if dists is None:
        return MetricValue.undefined("HD95")
    ab, ba = dists
    return MetricValue("HD95", max(percentile(ab, HD95_QUANTILE), percentile(ba, HD95_QUANTILE)))


def compute_all(ref: LabelMask, pred: LabelMask, point_set: str = "boundary") -> dict[str, MetricValue]:
    """DSC, HD and HD95 for one pair, sharing the distance computation."""
    out = {"DSC": dsc(ref, pred)}
    dists = _both_directions(ref, pred, point_set)
    if dists is None:
        out["HD"] = MetricValue.undefined("HD")
        out["HD95"] = MetricValue.undefined("HD95")
    else:
        ab, ba = dists
        out["HD"] = MetricValue("HD", float(max(ab.max(), ba.max())))
        out["HD95"] = MetricValue(
            "HD95", max(percentile(ab, HD95_QUANTILE), percentile(ba, HD95_QUANTILE))
        )
    return out
