"""Synthetic challenge tasks for demonstrations and tests."""

from __future__ import annotations

import numpy as np

from .table import ResultTable


def outlier_prone_task(seed: int, n_cases: int = 20) -> ResultTable:
    """Three algorithms on ``n_cases`` DSC cases.

    * ``steady``: about 0.80 on every case;
    * ``bimodal``: about 0.92 on half the cases and about 0.60 on the other
      half, so its mean (~0.76) sits clearly below ``steady`` while its median
      falls in the gap between the two modes;
    * ``weak``: about 0.70 throughout.

    ``steady`` wins the original ranking under both mean and median.  In a
    bootstrap resample ``bimodal`` overtakes it under the median whenever the
    high mode is drawn more than half the time, but under the mean only when
    the high mode dominates strongly.
    """
    rng = np.random.default_rng(seed)
    half = n_cases // 2
    steady = 0.80 + rng.normal(0.0, 0.02, n_cases)
    bimodal = np.concatenate([
        0.92 + rng.normal(0.0, 0.02, n_cases - half),
        0.60 + rng.normal(0.0, 0.02, half),
    ])
    rng.shuffle(bimodal)
    weak = 0.70 + rng.normal(0.0, 0.03, n_cases)
    rows = {
        "steady": np.clip(steady, 0.0, 1.0),
        "bimodal": np.clip(bimodal, 0.0, 1.0),
        "weak": np.clip(weak, 0.0, 1.0),
    }
    cases = [f"case{j:02d}" for j in range(n_cases)]
    return ResultTable.from_rows(list(rows), cases, {k: v.tolist() for k, v in rows.items()})


def outlier_prone_family(n_tasks: int = 20, n_cases: int = 20, seed: int = 2018) -> list[ResultTable]:
    return [outlier_prone_task(seed * 1000 + k, n_cases) for k in range(n_tasks)]
