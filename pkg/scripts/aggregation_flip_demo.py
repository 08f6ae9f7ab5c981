"""Same results table, two aggregation families, two different winners."""

from challenge_ranking import ResultTable, rank
from challenge_ranking.ranking import CASE_BASED, RankingScheme


def show(title, ranking):
    print(title)
    for alg in ranking.ordered():
        print(f"  rank {ranking.rank(alg):g}  {alg}  score {ranking.score(alg):.4f}")


def main():
    table = ResultTable.from_rows(
        ["A1", "A2"], ["case1", "case2", "case3"],
        {"A1": [0.7, 0.7, 0.7], "A2": [0.9, 0.9, 0.1]},
    )
    show("aggregate then rank (mean DSC)", rank(table, RankingScheme()))
    show("rank then aggregate (mean case rank)", rank(table, RankingScheme(family=CASE_BASED)))


if __name__ == "__main__":
    main()
