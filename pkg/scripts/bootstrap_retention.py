"""Mean fraction of distinct cases kept by a bootstrap resample, vs 1 - (1 - 1/n)^n."""

import argparse

import numpy as np

from challenge_ranking.robustness import resample_indices


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'n':>5}  {'empirical':>9}  {'expected':>9}")
    for n in (5, 10, 20, 50, 100, 1000):
        frac = np.mean([len(np.unique(resample_indices(args.seed, b, n))) / n for b in range(args.samples)])
        print(f"{n:>5}  {frac:9.4f}  {1 - (1 - 1 / n) ** n:9.4f}")


if __name__ == "__main__":
    main()
