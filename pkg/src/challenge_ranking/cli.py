"""Command-line interface.

Every command writes a JSON report (``--out`` or stdout) and, where it makes
sense, a flat CSV of plot data (``--csv``).  Failures exit with status 1 and
print ``{"error": <class>, "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metrics as segm
from .errors import ChallengeRankingError, InputError
from .masks import read_mask
from .ranking import FAMILIES, MISSING_POLICIES, OPERATORS, TIE_METHODS, RankingScheme, rank
from .reporting import build_report, dumps_report, write_plot_csv
from .robustness import (
    AUDIT_THRESHOLD,
    BootstrapConfig,
    bootstrap_stability,
    compare_scheme_stability,
    inclusion_check,
    leave_one_out_stability,
    missing_data_audit,
    observer_ranking_comparison,
)
from .schema import completeness, coverage_stats, read_description, registry
from .stats import boxplot_summary
from .table import HIGHER, LOWER, ResultTable, metric_spec, read_results_csv, write_results_csv

MASK_SUFFIX = ".mask"


def _metric_list(values) -> list[str]:
    out = []
    for v in values or ["DSC"]:
        out.extend(m.strip() for m in v.split(",") if m.strip())
    return out


def add_scheme_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("ranking scheme")
    g.add_argument("--metric", action="append", help="metric id; repeat or comma-separate for a composite (default DSC)")
    g.add_argument("--family", choices=FAMILIES, default="metric-based")
    g.add_argument("--op", choices=OPERATORS, default="mean")
    g.add_argument("--ties", choices=TIE_METHODS, default="min-competition", help="tie rule for final ranks")
    g.add_argument("--case-ties", choices=TIE_METHODS, default="fractional", help="tie rule for per-case ranks")
    g.add_argument("--missing", choices=MISSING_POLICIES, default="ignore")
    g.add_argument("--orientation", choices=(HIGHER, LOWER), help="orientation for metrics not built in")
    g.add_argument("--worst-value", type=float, help="worst value for the worst-value missing policy")


def scheme_from_args(args) -> RankingScheme:
    return RankingScheme(
        metrics=tuple(_metric_list(args.metric)),
        family=args.family,
        operator=args.op,
        tie_method=args.ties,
        case_tie_method=args.case_ties,
        missing_policy=args.missing,
    )


def _specs(args, metric_ids):
    return {m: metric_spec(m, args.orientation, args.worst_value) for m in metric_ids}


def load_table(path, args) -> ResultTable:
    table = read_results_csv(path)
    specs = _specs(args, list(table.metrics))
    return ResultTable(table.algorithms, table.cases, specs, table.values)


def _scheme_from_text(text: str) -> RankingScheme:
    """``"family=case-based,op=median,metric=HD"`` -> scheme (other fields default)."""
    names = {"metric": "metrics", "op": "operator", "ties": "tie_method",
             "case-ties": "case_tie_method", "missing": "missing_policy", "family": "family"}
    kw = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        key, _, value = part.partition("=")
        if key not in names or not value:
            raise InputError(f"bad scheme item {part!r}; keys are {sorted(names)}")
        kw[names[key]] = tuple(value.split("+")) if key == "metric" else value
    return RankingScheme(**kw)


def _emit(path, report) -> None:
    text = dumps_report(report)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _stability_payload(report, whiskers):
    out = report.as_dict()
    taus = [t for t in report.taus if t == t]
    out["tau_boxplot"] = boxplot_summary(taus, whiskers).as_dict() if taus else None
    return out


def _stability_csv(path, table, report):
    rows = []
    for a in table.algorithms:
        orig = report.original.entries.get(a)
        rows.append([a, orig[1] if orig else None, report.rank1_frequency.get(a)])
    write_plot_csv(path, ["algorithm", "original_rank", "rank1_frequency"], rows)


def cmd_rank(args):
    scheme = scheme_from_args(args)
    table = load_table(args.results, args)
    ranking = rank(table, scheme)
    if args.csv:
        write_plot_csv(args.csv, ["algorithm", "score", "rank"],
                       [[a, s, r] for a, (s, r) in ranking.entries.items()])
    config = {"scheme": scheme.as_dict(), "metrics": {m: s.as_dict() for m, s in table.metrics.items()}}
    return build_report("rank", {"results": args.results}, config, ranking.as_dict())


def cmd_robustness(args):
    scheme = scheme_from_args(args)
    table = load_table(args.results, args)
    cfg = BootstrapConfig(args.samples, args.seed, args.usurper_threshold, args.workers)
    report = bootstrap_stability(table, scheme, cfg, enforce_inclusion=not args.skip_inclusion)
    if args.csv:
        _stability_csv(args.csv, table, report)
    config = {"scheme": scheme.as_dict(), "bootstrap": cfg.as_dict(), "whiskers": args.whiskers,
              "enforce_inclusion": not args.skip_inclusion}
    payload = _stability_payload(report, args.whiskers)
    payload["eligibility"] = inclusion_check(table).as_dict()
    return build_report("robustness", {"results": args.results}, config, payload)


def cmd_loo(args):
    scheme = scheme_from_args(args)
    table = load_table(args.results, args)
    report = leave_one_out_stability(table, scheme, enforce_inclusion=args.enforce_inclusion)
    if args.csv:
        _stability_csv(args.csv, table, report)
    config = {"scheme": scheme.as_dict(), "whiskers": args.whiskers,
              "enforce_inclusion": args.enforce_inclusion, "usurper_min_count": 1}
    return build_report("loo", {"results": args.results}, config, _stability_payload(report, args.whiskers))


def cmd_audit(args):
    scheme = scheme_from_args(args)
    table = load_table(args.results, args)
    findings = missing_data_audit(table, scheme, args.threshold)
    if args.csv:
        write_plot_csv(args.csv, ["algorithm", "original_rank", "audited_rank", "dropped_cases", "reached_rank_1"],
                       [[f.algorithm, f.original_rank, f.audited_rank, f.dropped_cases, f.reached_rank_1]
                        for f in findings])
    ranked = [f for f in findings if f.original_rank != 1]
    result = {
        "findings": [f.as_dict() for f in findings],
        "non_winners": len(ranked),
        "non_winners_reaching_rank_1": sum(f.reached_rank_1 for f in ranked),
    }
    config = {"scheme": scheme.as_dict(), "threshold": args.threshold, "removal": "values strictly below threshold"}
    return build_report("audit-missing", {"results": args.results}, config, result)


def _named_paths(items):
    out = {}
    for item in items:
        name, sep, path = item.partition("=")
        if not sep:
            name, path = Path(item).stem, item
        if name in out:
            raise InputError(f"duplicate observer name {name!r}")
        out[name] = path
    return out


def cmd_observers(args):
    scheme = scheme_from_args(args)
    paths = _named_paths(args.results)
    tables = {name: load_table(p, args) for name, p in paths.items()}
    comp = observer_ranking_comparison(tables, scheme)
    if args.csv:
        rows = [[a] + [comp.tau[i, j] for j in range(len(comp.observers))] for i, a in enumerate(comp.observers)]
        write_plot_csv(args.csv, ["observer", *comp.observers], rows)
    return build_report("compare-observers", {"results": list(paths.values())},
                        {"scheme": scheme.as_dict(), "observers": list(paths)}, comp.as_dict())


def cmd_schemes(args):
    a = _scheme_from_text(args.scheme_a)
    b = _scheme_from_text(args.scheme_b)
    tasks = [load_table(p, args) for p in args.results]
    cfg = BootstrapConfig(args.samples, args.seed, args.usurper_threshold, args.workers)
    comp = compare_scheme_stability(tasks, a, b, cfg)
    if args.csv:
        rows = []
        kept = [k for k in range(len(tasks)) if k not in comp.excluded_tasks]
        for k, sa, sb in zip(kept, comp.stability_a, comp.stability_b):
            rows.append([args.results[k], sa, sb])
        write_plot_csv(args.csv, ["task", "winner_stability_a", "winner_stability_b"], rows)
    config = {"scheme_a": a.as_dict(), "scheme_b": b.as_dict(), "bootstrap": cfg.as_dict()}
    return build_report("compare-schemes", {"results": list(args.results)}, config, comp.as_dict())


def compute_metric_table(ref_dir, pred_dir, point_set="boundary"):
    """Masks -> results table.

    ``ref_dir/<case>.mask`` are references; ``pred_dir/<algorithm>/<case>.mask``
    are predictions.  Absent predictions and undefined metrics become missing.
    """
    ref_dir, pred_dir = Path(ref_dir), Path(pred_dir)
    refs = sorted(ref_dir.glob(f"*{MASK_SUFFIX}"))
    if not refs:
        raise InputError(f"no reference masks in {ref_dir}")
    algs = sorted(p for p in pred_dir.iterdir() if p.is_dir())
    if not algs:
        raise InputError(f"no algorithm directories in {pred_dir}")
    records, degenerate = [], []
    for alg_dir in algs:
        for ref_path in refs:
            case = ref_path.stem
            pred_path = alg_dir / ref_path.name
            if not pred_path.exists():
                for m in ("DSC", "HD", "HD95"):
                    records.append((alg_dir.name, case, m, None))
                continue
            values = segm.compute_all(read_mask(ref_path), read_mask(pred_path), point_set)
            for m, mv in values.items():
                records.append((alg_dir.name, case, m, mv.value if mv.defined else None))
                if mv.degenerate:
                    degenerate.append({"algorithm": alg_dir.name, "case": case, "metric": m,
                                       "note": "degenerate agreement: both masks empty"})
    return ResultTable.from_records(records), degenerate


def cmd_metrics(args):
    table, degenerate = compute_metric_table(args.ref, args.pred, args.point_set)
    write_results_csv(table, args.out)
    undefined = [
        {"algorithm": a, "case": c, "metric": m} for a, c, m, v in table.records() if v is None
    ]
    result = {"algorithms": list(table.algorithms), "cases": list(table.cases),
              "degenerate": degenerate, "missing_or_undefined": undefined, "table": str(args.out)}
    config = {"point_set": args.point_set, "hd95_quantile": segm.HD95_QUANTILE,
              "percentile_rule": "sorted linear interpolation at (n-1)*q"}
    inputs = {"references": sorted(Path(args.ref).glob(f"*{MASK_SUFFIX}")),
              "predictions": sorted(Path(args.pred).glob(f"*/*{MASK_SUFFIX}"))}
    return build_report("metrics", inputs, config, result)


def cmd_validate(args):
    desc = read_description(args.description)
    rep = completeness(desc)
    result = rep.as_dict()
    result["registry_version"] = registry().version
    if args.require_gate and not rep.essential_gate_passed:
        args._exit_code = 1
    return build_report("validate-spec", {"description": args.description},
                        {"require_gate": args.require_gate}, result)


def cmd_coverage(args):
    descs = [read_description(p) for p in args.descriptions]
    cov = coverage_stats(descs)
    if args.csv:
        write_plot_csv(args.csv, ["parameter", "coverage_pct", "band"], [[c.parameter, c.pct, c.band] for c in cov])
    result = {
        "registry_version": registry().version,
        "documents": len(descs),
        "parameters": [{"parameter": c.parameter, "coverage_pct": c.pct, "band": c.band,
                        "instantiated": c.instantiated} for c in cov],
    }
    return build_report("coverage", {"descriptions": list(args.descriptions)},
                        {"bands": {"red": "<50", "orange": "50-90 inclusive", "green": ">90"}}, result)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="challenge-rank", description="Ranking analysis for biomedical image analysis challenges.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, scheme=True, out=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if out:
            p.add_argument("--out", help="report path (default stdout)")
        if scheme:
            add_scheme_args(p)
        return p

    p = command("rank", cmd_rank, "rank algorithms from a results CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--csv", help="plot-data CSV path")

    for name, func in (("robustness", cmd_robustness), ("loo", cmd_loo)):
        p = command(name, func, f"{'bootstrap' if name == 'robustness' else 'leave-one-out'} winner stability")
        p.add_argument("--results", required=True)
        p.add_argument("--csv")
        p.add_argument("--whiskers", choices=("median", "quartile"), default="median")
        if name == "robustness":
            p.add_argument("--samples", type=int, default=1000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)
            p.add_argument("--usurper-threshold", type=float, default=0.01)
            p.add_argument("--skip-inclusion", action="store_true", help="do not enforce task inclusion criteria")
        else:
            p.add_argument("--enforce-inclusion", action="store_true")

    p = command("audit-missing", cmd_audit, "what-if removal of each algorithm's poor cases")
    p.add_argument("--results", required=True)
    p.add_argument("--threshold", type=float, default=AUDIT_THRESHOLD)
    p.add_argument("--csv")

    p = command("compare-observers", cmd_observers, "rankings per reference observer")
    p.add_argument("--results", required=True, action="append", help="NAME=path (repeat per observer)")
    p.add_argument("--csv")

    p = command("compare-schemes", cmd_schemes, "paired bootstrap stability of two schemes over tasks")
    p.add_argument("--results", required=True, nargs="+", help="one results CSV per task")
    p.add_argument("--scheme-a", required=True, help="e.g. 'family=metric-based,op=mean,metric=DSC'")
    p.add_argument("--scheme-b", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--usurper-threshold", type=float, default=0.01)
    p.add_argument("--csv")

    p = command("metrics", cmd_metrics, "DSC/HD/HD95 from mask containers", scheme=False, out=False)
    p.add_argument("--ref", required=True, help="directory of <case>.mask references")
    p.add_argument("--pred", required=True, help="directory of <algorithm>/<case>.mask predictions")
    p.add_argument("--out", required=True, help="results CSV to write")
    p.add_argument("--point-set", choices=segm.POINT_SETS, default="boundary")
    p.add_argument("--report", help="report path (default stdout)")

    p = command("validate-spec", cmd_validate, "completeness of a challenge description", scheme=False)
    p.add_argument("--description", required=True)
    p.add_argument("--require-gate", action="store_true", help="exit 1 unless the essential gate passes")

    p = command("coverage", cmd_coverage, "per-parameter coverage over descriptions", scheme=False)
    p.add_argument("--descriptions", required=True, nargs="+")
    p.add_argument("--csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (ChallengeRankingError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                     "criteria": list(getattr(exc, "criteria", ()))}) + "\n")
        return 1
    _emit(args.report if args.command == "metrics" else args.out, report)
    return getattr(args, "_exit_code", 0)


if __name__ == "__main__":
    sys.exit(main())
