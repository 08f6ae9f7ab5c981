"""Mask fixture for end-to-end checks: 3 algorithms, 5 cases.

The oracle table is computed from plain point sets with the brute-force
oracles, without going through the package's metric code or CSV writer.
"""

import csv
import itertools

import numpy as np

from challenge_ranking import LabelMask, write_mask

from oracles import boundary_oracle, dsc_oracle, hausdorff_oracle, hd95_oracle

DIMS = (10, 9, 4)
SPACING = (0.8, 0.8, 2.5)
CASES = [f"case{j}" for j in range(5)]
ALGORITHMS = ["alpha", "beta", "gamma"]


def box(lo, hi):
    return {p for p in itertools.product(*(range(a, b) for a, b in zip(lo, hi)))}


def reference(j):
    return box((1 + j % 2, 1, 0), (6 + j % 3, 7, 3))


def prediction(alg, j):
    ref = reference(j)
    if alg == "alpha":  # shifted by one voxel along x
        return {(x + 1, y, z) for x, y, z in ref if x + 1 < DIMS[0]}
    if alg == "beta":  # eroded on the y faces, plus a stray voxel on odd cases
        ys = sorted({y for _, y, _ in ref})
        core = {p for p in ref if p[1] not in (ys[0], ys[-1])}
        return core | ({(9, 8, 3)} if j % 2 else set())
    if j == 4:  # gamma submits nothing for the last case
        return set()
    return ref if j in (0, 1) else {p for p in ref if p[2] < 2}


def oracle_rows():
    rows = []
    for alg in ALGORITHMS:
        for j, case in enumerate(CASES):
            ref, pred = reference(j), prediction(alg, j)
            rb, pb = boundary_oracle(ref, DIMS), boundary_oracle(pred, DIMS)
            h = hausdorff_oracle(rb, pb, SPACING)
            h95 = hd95_oracle(rb, pb, SPACING)
            rows.append((alg, case, "DSC", dsc_oracle(ref, pred)))
            rows.append((alg, case, "HD", h))
            rows.append((alg, case, "HD95", h95))
    return rows


def write_masks(root):
    ref_dir, pred_dir = root / "ref", root / "pred"
    ref_dir.mkdir()
    for j, case in enumerate(CASES):
        write_mask(ref_dir / f"{case}.mask", to_mask(reference(j)))
        for alg in ALGORITHMS:
            (pred_dir / alg).mkdir(parents=True, exist_ok=True)
            write_mask(pred_dir / alg / f"{case}.mask", to_mask(prediction(alg, j)))
    return ref_dir, pred_dir


def to_mask(points):
    vox = np.zeros(DIMS, dtype=bool)
    for p in points:
        vox[p] = True
    return LabelMask(vox, SPACING)


def write_oracle_csv(path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "case", "metric", "value"])
        for alg, case, metric, v in oracle_rows():
            w.writerow([alg, case, metric, "" if v is None else repr(v)])
