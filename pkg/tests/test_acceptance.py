"""Acceptance criteria, one marked group per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from challenge_ranking import LabelMask, ResultTable, TauUndefined, kendall_tau_b, wilcoxon_signed_rank
from challenge_ranking.cli import main
from challenge_ranking.errors import PreconditionError
from challenge_ranking.metrics import dsc, extract_boundary, hausdorff, hd95
from challenge_ranking.ranking import CASE_BASED, RankingScheme, rank
from challenge_ranking.robustness import (
    ALGORITHM_CRITERION,
    CASE_CRITERION,
    BootstrapConfig,
    bootstrap_stability,
    compare_scheme_stability,
    inclusion_check,
    missing_data_audit,
)
from challenge_ranking.schema import (
    ChallengeDescription,
    completeness,
    dumps_description,
    load_description,
    registry,
)
from challenge_ranking.synthetic import outlier_prone_family
from challenge_ranking.table import write_results_csv

import fixtures
from oracles import (
    boundary_oracle,
    directed_oracle_np,
    percentile_oracle,
    random_dims,
    random_mask_voxels,
    random_spacing,
    tau_b_oracle,
    wilcoxon_oracle,
)


def table(rows):
    n = len(next(iter(rows.values())))
    return ResultTable.from_rows(list(rows), [f"c{j}" for j in range(n)], rows)


# --- 1 ------------------------------------------------------------------------

@pytest.mark.criterion(1, title="metric oracle equivalence on 200+ random mask pairs (< 30 s)")
def test_metric_oracle_equivalence():
    rng = np.random.default_rng(20180101)
    start = time.perf_counter()
    pairs = anisotropic = full_size = 0
    while pairs < 220:
        # every tenth pair uses the full 16^3 grid
        dims = (16, 16, 16) if pairs % 10 == 0 else random_dims(rng)
        full_size += dims == (16, 16, 16)
        spacing = random_spacing(rng)
        a = LabelMask(random_mask_voxels(rng, dims), spacing)
        b = LabelMask(random_mask_voxels(rng, dims), spacing)
        pa = a.points().tolist()
        pb = b.points().tolist()
        pairs += 1
        anisotropic += len(set(spacing)) > 1

        # DSC: counts from the point sets, same ratio expression, bitwise equality
        sa, sb = set(map(tuple, pa)), set(map(tuple, pb))
        if sa or sb:
            assert dsc(a, b).value == 2 * len(sa & sb) / (len(sa) + len(sb))

        ba = boundary_oracle(sa, dims)
        bb = boundary_oracle(sb, dims)
        assert set(map(tuple, extract_boundary(a).points().tolist())) == ba
        assert set(map(tuple, extract_boundary(b).points().tolist())) == bb
        if not ba or not bb:
            assert not hausdorff(a, b).defined and not hd95(a, b).defined
            continue
        ab = directed_oracle_np(sorted(ba), sorted(bb), spacing)
        ba_ = directed_oracle_np(sorted(bb), sorted(ba), spacing)
        want_h = max(max(ab), max(ba_))
        want_95 = max(percentile_oracle(ab, 0.95), percentile_oracle(ba_, 0.95))
        got_h, got_95 = hausdorff(a, b).value, hd95(a, b).value
        assert abs(got_h - want_h) <= 1e-12 * max(want_h, 1e-300)
        assert abs(got_95 - want_95) <= 1e-12 * max(want_95, 1e-300)
    elapsed = time.perf_counter() - start
    assert anisotropic >= 50 and pairs - anisotropic >= 50
    assert full_size >= 22
    assert elapsed < 30, f"took {elapsed:.1f} s"


# --- 2 ------------------------------------------------------------------------

def weak_orders(n):
    """Every rank vector of length n, ties included (dense encoding)."""
    for v in itertools.product(range(n), repeat=n):
        if set(v) == set(range(max(v) + 1)):
            yield v


@pytest.mark.criterion(2, title="Kendall tau exhaustive check for lengths <= 6 (< 10 s)")
def test_tau_exhaustive():
    # Tau is invariant under applying one permutation to the positions of both
    # vectors, so every pair (x, y) is equivalent to one with x sorted.  Pairing
    # each sorted x with every y therefore covers all pairs.
    start = time.perf_counter()
    checked = 0
    for n in range(1, 7):
        ys = list(weak_orders(n))
        xs = [x for x in ys if list(x) == sorted(x)]
        for x in xs:
            for y in ys:
                want = tau_b_oracle(x, y)
                if want is None:
                    with pytest.raises(TauUndefined):
                        kendall_tau_b(x, y)
                else:
                    assert abs(kendall_tau_b(x, y) - want) <= 1e-12
                checked += 1
    for n in range(2, 7):
        for perm in itertools.permutations(range(1, n + 1)):
            r = np.array(perm)
            assert kendall_tau_b(r, r) == 1.0
            assert kendall_tau_b(r, n + 1 - r) == -1.0
    elapsed = time.perf_counter() - start
    assert checked == sum(2 ** (n - 1) * len(list(weak_orders(n))) for n in range(1, 7))
    assert elapsed < 10, f"took {elapsed:.1f} s"


@pytest.mark.criterion(2, title="Kendall tau exhaustive check for lengths <= 6 (< 10 s)")
def test_tau_position_permutation_invariance():
    rng = np.random.default_rng(0)
    for _ in range(500):
        n = int(rng.integers(2, 7))
        x, y = rng.integers(0, 4, n), rng.integers(0, 4, n)
        perm = rng.permutation(n)
        assert tau_b_oracle(list(x), list(y)) == tau_b_oracle(list(x[perm]), list(y[perm]))


# --- 3 ------------------------------------------------------------------------

@pytest.mark.criterion(3, title="bootstrap retains 0.6415 +/- 0.01 distinct cases for n = 20, B = 1000 (< 5 s)")
def test_bootstrap_retention():
    rng = np.random.default_rng(3)
    rows = {f"alg{i}": (0.5 + 0.1 * i + rng.normal(0, 0.01, 20)).tolist() for i in range(3)}
    start = time.perf_counter()
    rep = bootstrap_stability(table(rows), RankingScheme(), BootstrapConfig(samples=1000, seed=123))
    elapsed = time.perf_counter() - start
    expected = 1 - (19 / 20) ** 20
    assert expected == pytest.approx(0.6415, abs=5e-5)
    assert abs(rep.mean_distinct_case_fraction - expected) <= 0.01
    assert elapsed < 5, f"took {elapsed:.1f} s"


# --- 4 ------------------------------------------------------------------------

@pytest.mark.criterion(4, title="robustness reports are byte-identical across runs and worker counts")
def test_robustness_determinism(tmp_path, capsys):
    path = tmp_path / "task.csv"
    write_results_csv(outlier_prone_family(n_tasks=1, n_cases=20, seed=7)[0], path)
    blobs = []
    for k, workers in enumerate((1, 1, 4, 4)):
        out = tmp_path / f"report{k}.json"
        code = main(["robustness", "--results", str(path), "--metric", "DSC", "--samples", "1000",
                     "--seed", "7", "--workers", str(workers), "--out", str(out)])
        assert code == 0
        blobs.append(out.read_bytes())
    capsys.readouterr()
    assert len(set(blobs)) == 1
    assert json.loads(blobs[0])["config"]["bootstrap"]["seed"] == 7


# --- 5 ------------------------------------------------------------------------

@pytest.mark.criterion(5, title="aggregation flip: A1 wins metric-based, A2 wins case-based")
def test_aggregation_flip():
    t = table({"A1": [0.7, 0.7, 0.7], "A2": [0.9, 0.9, 0.1]})
    assert rank(t, RankingScheme(operator="mean")).winners == ("A1",)
    assert rank(t, RankingScheme(family=CASE_BASED, operator="mean")).winners == ("A2",)


# --- 6 ------------------------------------------------------------------------

@pytest.mark.criterion(6, title="missing-data audit promotes A2; audited rank <= original on 1000 tables")
def test_audit_fixture():
    findings = {f.algorithm: f for f in missing_data_audit(table({"A1": [0.8] * 3, "A2": [0.9, 0.9, 0.4]}), threshold=0.5)}
    assert findings["A2"].original_rank == 2
    assert findings["A2"].audited_rank == 1 and findings["A2"].reached_rank_1


@pytest.mark.criterion(6, title="missing-data audit promotes A2; audited rank <= original on 1000 tables")
def test_audit_monotonicity_on_random_tables():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        n_alg, n_case = int(rng.integers(2, 6)), int(rng.integers(2, 8))
        vals = rng.random((n_alg, n_case)).round(3)
        vals[rng.random((n_alg, n_case)) < 0.15] = np.nan
        rows = {f"a{i}": [None if math.isnan(v) else float(v) for v in vals[i]] for i in range(n_alg)}
        for f in missing_data_audit(table(rows), RankingScheme(operator="mean")):
            if not f.degenerate:
                assert f.audited_rank <= f.original_rank


# --- 7 ------------------------------------------------------------------------

@pytest.mark.criterion(7, title="Wilcoxon exact p equals sign-assignment enumeration for n <= 12")
def test_wilcoxon_exactness():
    rng = np.random.default_rng(7)
    for n in range(1, 13):
        for trial in range(6):
            # small integer differences give ties and zeros; trial 0 is tie-free
            d = rng.normal(size=n) if trial == 0 else rng.integers(-4, 5, size=n).astype(float)
            res = wilcoxon_signed_rank(d, np.zeros(n))
            assert res.p_value == wilcoxon_oracle(d.tolist())
            if res.n:
                assert res.method == "exact"
    six = wilcoxon_signed_rank([0.9] * 6, [0.8, 0.7, 0.6, 0.5, 0.4, 0.3])
    assert six.p_value == 0.03125


# --- 8 ------------------------------------------------------------------------

@pytest.mark.criterion(8, title="mean aggregation more stable than median on outlier-prone family, p < 0.05 (< 60 s)")
def test_mean_vs_median_direction():
    tasks = outlier_prone_family(n_tasks=20, n_cases=20)
    start = time.perf_counter()
    mean, median = RankingScheme(operator="mean"), RankingScheme(operator="median")
    cmp = compare_scheme_stability(tasks, mean, median, BootstrapConfig(samples=1000, seed=2018))
    elapsed = time.perf_counter() - start
    assert len(cmp.stability_a) == 20
    assert np.mean(cmp.stability_a) > np.mean(cmp.stability_b)
    assert cmp.median_difference > 0
    assert cmp.significant and cmp.p_value < 0.05
    assert elapsed < 60, f"took {elapsed:.1f} s"


# --- 9 ------------------------------------------------------------------------

@pytest.mark.criterion(9, title="schema registry counts, completeness fixtures, lossless round trip")
def test_schema_gate():
    reg = registry()
    assert (len(reg.parameters), len(reg.category_ids), len(reg.essential_ids)) == (53, 7, 40)

    full = ChallengeDescription.empty()
    for pid in reg.ids:
        full = full.with_value(pid, "reported")
    rep = completeness(full)
    assert (rep.overall_pct, rep.essential_pct, rep.essential_gate_passed) == (100.0, 100.0, True)

    rep = completeness(ChallengeDescription.empty())
    assert (rep.overall_pct, rep.essential_pct, rep.essential_gate_passed) == (0.0, 0.0, False)

    part = ChallengeDescription.empty()
    for pid in reg.essential_ids[:36]:
        part = part.with_value(pid, "reported")
    rep = completeness(part)
    assert rep.essential_pct == 90.0 and rep.essential_gate_passed
    assert f"{rep.overall_pct:.2f}" == "67.92"

    for desc in (full, part, ChallengeDescription.empty(document_id="x")):
        assert load_description(dumps_description(desc)) == desc


# --- 10 -----------------------------------------------------------------------

@pytest.mark.criterion(10, title="inclusion criteria reject tables with the named criterion")
def test_inclusion_criteria():
    assert inclusion_check(table({a: [0.5, 0.6] for a in "abc"})).eligible
    two_algs = table({a: [0.1 * k for k in range(10)] for a in "ab"})
    one_case = table({a: [0.5] for a in "abcde"})
    assert inclusion_check(two_algs).violations == (ALGORITHM_CRITERION,)
    assert inclusion_check(one_case).violations == (CASE_CRITERION,)
    assert ALGORITHM_CRITERION == "Number of algorithms >= 3"
    assert CASE_CRITERION == "Number of test cases > 1"
    skewed = table({"a": [0.9, 0.2], "b": [0.1, 0.3]})
    with pytest.raises(PreconditionError) as err:
        bootstrap_stability(skewed, cfg=BootstrapConfig(samples=10))
    assert err.value.criteria == (ALGORITHM_CRITERION,)
    one_case_winner = table({"a": [0.9], "b": [0.5], "c": [0.1]})
    with pytest.raises(PreconditionError) as err:
        bootstrap_stability(one_case_winner, cfg=BootstrapConfig(samples=10))
    assert err.value.criteria == (CASE_CRITERION,)


# --- 11 -----------------------------------------------------------------------

@pytest.mark.criterion(11, title="masks -> metrics CSV -> ranking equals oracle-table ranking (3 x 5 fixture)")
def test_end_to_end(tmp_path, capsys):
    ref, pred = fixtures.write_masks(tmp_path)
    produced = tmp_path / "metrics.csv"
    assert main(["metrics", "--ref", str(ref), "--pred", str(pred), "--out", str(produced)]) == 0
    oracle = tmp_path / "oracle.csv"
    fixtures.write_oracle_csv(oracle)
    capsys.readouterr()
    compared = 0
    for metric in ("DSC", "HD", "HD95"):
        for family in ("metric-based", "case-based"):
            for op in ("mean", "median"):
                results = []
                for path in (produced, oracle):
                    assert main(["rank", "--results", str(path), "--metric", metric,
                                 "--family", family, "--op", op]) == 0
                    results.append(json.loads(capsys.readouterr().out)["result"])
                assert results[0] == results[1]
                assert len(results[0]["entries"]) + len(results[0]["excluded"]) == 3
                compared += 1
    assert compared == 12
