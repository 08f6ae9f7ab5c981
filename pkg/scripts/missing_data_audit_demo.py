"""How much could an algorithm gain by withholding its poor cases?

Without arguments the script audits a small built-in table.  With
``--random N`` it audits N random tables and reports how often a
non-winning algorithm could have reached rank 1.
"""

import argparse

import numpy as np

from challenge_ranking import ResultTable
from challenge_ranking.robustness import missing_data_audit


def audit_table(table, threshold):
    for f in missing_data_audit(table, threshold=threshold):
        audited = "all values dropped" if f.degenerate else f"{f.audited_rank:g}"
        flag = "  <- reaches rank 1" if f.reached_rank_1 and f.original_rank != 1 else ""
        print(f"  {f.algorithm}: rank {f.original_rank:g} -> {audited} (dropped {f.dropped_cases}){flag}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threshold", type=float, default=0.5)
    ap.add_argument("--random", type=int, default=0, metavar="N")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not args.random:
        table = ResultTable.from_rows(
            ["A1", "A2", "A3"], ["c1", "c2", "c3", "c4"],
            {"A1": [0.8, 0.8, 0.8, 0.8], "A2": [0.9, 0.9, 0.9, 0.3], "A3": [0.7, 0.75, 0.2, 0.6]},
        )
        audit_table(table, args.threshold)
        return

    rng = np.random.default_rng(args.seed)
    non_winners = promoted = 0
    for _ in range(args.random):
        n_alg, n_case = int(rng.integers(3, 8)), int(rng.integers(5, 30))
        # per-algorithm skill plus occasional failures
        skill = rng.uniform(0.6, 0.9, n_alg)[:, None]
        vals = np.clip(skill + rng.normal(0, 0.05, (n_alg, n_case)), 0, 1)
        failed = rng.random((n_alg, n_case)) < 0.1
        vals[failed] = rng.uniform(0, 0.4, failed.sum())
        table = ResultTable.from_rows(
            [f"a{i}" for i in range(n_alg)], [f"c{j}" for j in range(n_case)],
            {f"a{i}": vals[i].tolist() for i in range(n_alg)},
        )
        for f in missing_data_audit(table, threshold=args.threshold):
            if f.original_rank != 1:
                non_winners += 1
                promoted += f.reached_rank_1
    print(f"{promoted} of {non_winners} non-winning algorithms ({100 * promoted / non_winners:.1f}%) "
          f"would reach rank 1 by withholding results below {args.threshold}")


if __name__ == "__main__":
    main()
