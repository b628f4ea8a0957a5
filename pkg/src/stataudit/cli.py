"""Command line front end.

Exit codes: 0 success, 1 input problem (missing files, schema violations,
bad flag values), 2 numeric failure during analysis. Failures print a
single JSON line to stderr with keys error, message, stage.

Every command writes into an output directory (--out, else
$STATAUDIT_OUT/stataudit_<command>, else ./stataudit_<command>), finishing
with manifest.json so a finished run can be told apart from an interrupted
one. Reruns on identical inputs produce byte-identical files.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from types import SimpleNamespace

from . import __version__
from . import report as rpt
from .bias import BiasReport, ChasingCurve, FunnelPoint
from .core.huber import huber_iwls
from .corpus import (apply_exclusions, descriptives, exclusion_table,
                     export, ingest)
from .effects import ThresholdTable
from .errors import DomainError, StatAuditError
from .extract import check_consistency, parse_with_diagnostics, test_to_json
from .fieldsim import FieldConfig, simulate_field


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract reserves 2 for
    # numeric failures, so usage errors are remapped to 1.
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _diag(stage: str, exc: BaseException) -> None:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc),
                       "stage": stage}, sort_keys=True)
    print(line, file=sys.stderr)


def _out_dir(args, command: str) -> str:
    if args.out:
        path = args.out
    else:
        root = os.environ.get("STATAUDIT_OUT", ".")
        path = os.path.join(root, f"stataudit_{command}")
    os.makedirs(path, exist_ok=True)
    return path


def _thresholds(args) -> ThresholdTable:
    table = (ThresholdTable.from_file(args.thresholds)
             if args.thresholds else ThresholdTable())
    table.validate()
    if not 0.0 < args.alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {args.alpha}")
    return table


def _find_corpus(root: str):
    if not os.path.isdir(root):
        raise FileNotFoundError(f"corpus directory not found: {root}")
    paths = {}
    for kind in ("papers", "tests"):
        for ext in (".csv", ".json"):
            cand = os.path.join(root, kind + ext)
            if os.path.isfile(cand):
                paths[kind] = cand
                break
        else:
            raise FileNotFoundError(
                f"no {kind}.csv or {kind}.json under {root}")
    return paths["papers"], paths["tests"]


def _snapshot(args, command: str, **extra) -> dict:
    # workers is deliberately absent: it spreads computation without
    # changing any output, so it must not move the run id either.
    snap = {"command": command, "alpha": args.alpha, "mcc": args.mcc,
            "level": args.level, "format": args.fmt,
            "thresholds": args.thresholds, "seed": args.seed}
    snap.update(extra)
    return snap


def _done(out: str, run) -> int:
    print(f"wrote {out} (run {run.run_id})")
    return 0


# ---------------------------------------------------------------- extract

def cmd_extract(args) -> int:
    try:
        out = _out_dir(args, "extract")
        _thresholds(args)
        if args.source == "-":
            text = sys.stdin.read()
        else:
            with open(args.source, "r", encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, ValueError, StatAuditError) as exc:
        _diag("input", exc)
        return 1
    try:
        source_copy = os.path.join(out, "source.txt")
        rpt.atomic_write(source_copy, text)
        tests, diagnostics = parse_with_diagnostics(text)
        rows = []
        records = []
        for t in tests:
            verdict = check_consistency(t, alpha_ref=args.alpha)
            rows.append((t.statistic, t.value, t.df1, t.df2, t.sample_n,
                         t.p_comparator, t.p_reported, verdict.p_recomputed,
                         verdict.status, t.source_span[0], t.source_span[1]))
            records.append({**test_to_json(t),
                            "p_recomputed": verdict.p_recomputed,
                            "status": verdict.status})
        outputs = ["extracted.csv", "extract_diagnostics.csv", "source.txt"]
        rpt.write_csv(os.path.join(out, "extracted.csv"),
                      ("statistic", "value", "df1", "df2", "n",
                       "p_comparator", "p_reported", "p_recomputed",
                       "status", "start", "end"), rows)
        rpt.write_csv(os.path.join(out, "extract_diagnostics.csv"),
                      ("reason", "start", "end", "text"),
                      [(d.reason, d.span[0], d.span[1], d.text)
                       for d in diagnostics])
        if args.fmt == "json":
            rpt.write_json(os.path.join(out, "extracted.json"), records)
            outputs.append("extracted.json")
        run = rpt.write_manifest(out, _snapshot(args, "extract"),
                                 {"source": source_copy}, outputs)
    except (StatAuditError, ArithmeticError) as exc:
        _diag("extract", exc)
        return 2
    return _done(out, run)


# ------------------------------------------------------------------ audit

def _load_corpus(args):
    papers_path, tests_path = _find_corpus(args.corpus)
    corpus = ingest(papers_path, tests_path)
    inputs = {"papers": papers_path, "tests": tests_path}
    if args.thresholds:
        inputs["thresholds"] = args.thresholds
    return corpus, inputs


def _audit_pipeline(corpus, thresholds, args):
    """Everything between ingest and the emitters, shared by audit/bias."""
    retained, outcomes = apply_exclusions(corpus)
    fam = rpt.family_sizes(retained)
    estimates, anova, skipped = rpt.build_estimates(retained, args.alpha, fam)
    p_rows, queries = rpt.power_rows(retained, thresholds, args.level,
                                     args.alpha, fam)
    bias = rpt.run_bias(retained, estimates, queries, args.alpha,
                        mcc=args.mcc)
    return SimpleNamespace(retained=retained, outcomes=outcomes, fam=fam,
                           estimates=estimates, anova=anova, skipped=skipped,
                           power_rows=p_rows, queries=queries, bias=bias)


def _scatter_pairs(pipe):
    pairs = []
    for row in pipe.power_rows:
        test_id, power = row[0], row[6]
        est = pipe.estimates.get(test_id)
        if power is not None and est is not None:
            pairs.append((power, abs(est.log_or)))
    return pairs


def _emit_figures(out, pipe, outputs):
    if pipe.estimates:
        name = "caterpillar.svg"
        rpt.atomic_write(os.path.join(out, name),
                         rpt.svg_caterpillar(list(pipe.estimates.values())))
        outputs.append(name)
    if pipe.bias.funnel:
        name = "funnel.svg"
        rpt.atomic_write(os.path.join(out, name),
                         rpt.svg_funnel(pipe.bias.funnel))
        outputs.append(name)
    pairs = _scatter_pairs(pipe)
    if pairs:
        fit = (pipe.bias.winners_curse.fit
               if pipe.bias.winners_curse is not None else None)
        name = "power_scatter.svg"
        rpt.atomic_write(os.path.join(out, name),
                         rpt.svg_power_scatter([p for p, _ in pairs],
                                               [a for _, a in pairs], fit))
        outputs.append(name)
    curve = pipe.bias.chasing or pipe.bias.chasing_mcc
    if curve is not None:
        extra = pipe.bias.chasing_mcc if pipe.bias.chasing else None
        name = "chasing.svg"
        rpt.atomic_write(os.path.join(out, name),
                         rpt.svg_chasing(curve, extra))
        outputs.append(name)


def cmd_audit(args) -> int:
    try:
        out = _out_dir(args, "audit")
        thresholds = _thresholds(args)
        corpus, inputs = _load_corpus(args)
    except (OSError, ValueError, StatAuditError) as exc:
        _diag("input", exc)
        return 1
    try:
        pipe = _audit_pipeline(corpus, thresholds, args)
        cons = rpt.consistency_rows(pipe.retained, args.alpha)
        outputs = [
            rpt.emit_diagnostics(out, corpus),
            rpt.emit_exclusions(out, pipe.outcomes),
            rpt.emit_estimates(out, pipe.retained, pipe.estimates,
                               thresholds),
            rpt.emit_consistency(out, cons),
            rpt.emit_power(out, pipe.power_rows),
            rpt.emit_upper_bound(out, corpus.papers, thresholds, args.alpha),
            rpt.emit_bias_json(out, pipe.bias),
        ]
        if pipe.bias.funnel:
            outputs.append(rpt.emit_funnel(out, pipe.bias.funnel))
        if pipe.bias.chasing is not None:
            outputs.append(rpt.emit_chasing(out, pipe.bias.chasing,
                                            "chasing.csv"))
        if pipe.bias.chasing_mcc is not None:
            outputs.append(rpt.emit_chasing(out, pipe.bias.chasing_mcc,
                                            "chasing_mcc.csv"))
        tally = {}
        for row in cons:
            tally[row[8]] = tally.get(row[8], 0) + 1
        sizes = [p.total_n for p in corpus.papers if p.total_n is not None]
        summary = {
            "papers": len(corpus.papers),
            "tests": len(corpus.tests),
            "ingest_diagnostics": len(corpus.diagnostics),
            "exclusions": exclusion_table(pipe.outcomes),
            "consistency": tally,
            "estimates": len(pipe.estimates),
            "anova_effects": len(pipe.anova),
            "unconvertible": [list(s) for s in pipe.skipped],
            "total_n": descriptives(sizes) if sizes else None,
        }
        rpt.write_json(os.path.join(out, "summary.json"), summary)
        outputs.append("summary.json")
        if args.fmt == "svg":
            _emit_figures(out, pipe, outputs)
        run = rpt.write_manifest(out, _snapshot(args, "audit"), inputs,
                                 outputs)
    except (StatAuditError, ArithmeticError) as exc:
        _diag("audit", exc)
        return 2
    return _done(out, run)


# ------------------------------------------------------------------ power

def cmd_power(args) -> int:
    try:
        out = _out_dir(args, "power")
        thresholds = _thresholds(args)
        corpus, inputs = _load_corpus(args)
    except (OSError, ValueError, StatAuditError) as exc:
        _diag("input", exc)
        return 1
    try:
        want_upper = args.upper_bound or not args.per_test
        want_per_test = args.per_test or not args.upper_bound
        outputs = []
        if want_per_test:
            retained, _ = apply_exclusions(corpus)
            fam = rpt.family_sizes(retained)
            rows, _ = rpt.power_rows(retained, thresholds, args.level,
                                     args.alpha, fam)
            outputs.append(rpt.emit_power(out, rows))
        if want_upper:
            outputs.append(rpt.emit_upper_bound(out, corpus.papers,
                                                thresholds, args.alpha))
        run = rpt.write_manifest(out, _snapshot(args, "power"), inputs,
                                 outputs)
    except (StatAuditError, ArithmeticError) as exc:
        _diag("power", exc)
        return 2
    return _done(out, run)


# ------------------------------------------------------------------- bias

def cmd_bias(args) -> int:
    try:
        out = _out_dir(args, "bias")
        thresholds = _thresholds(args)
        corpus, inputs = _load_corpus(args)
    except (OSError, ValueError, StatAuditError) as exc:
        _diag("input", exc)
        return 1
    try:
        wanted = {name for name in
                  ("funnel", "winners_curse", "chasing", "mcc_contingency")
                  if getattr(args, name)}
        if not wanted:
            wanted = {"funnel", "winners_curse", "chasing",
                      "mcc_contingency"}
        pipe = _audit_pipeline(corpus, thresholds, args)
        bias = pipe.bias
        report = BiasReport(
            funnel=bias.funnel if "funnel" in wanted else (),
            begg_mazumdar=(bias.begg_mazumdar
                           if "funnel" in wanted else None),
            winners_curse=(bias.winners_curse
                           if "winners_curse" in wanted else None),
            chasing=bias.chasing if "chasing" in wanted else None,
            chasing_mcc=bias.chasing_mcc if "chasing" in wanted else None,
            mcc=bias.mcc if "mcc_contingency" in wanted else None)
        outputs = [rpt.emit_bias_json(out, report)]
        if report.funnel:
            outputs.append(rpt.emit_funnel(out, report.funnel))
        if report.chasing is not None:
            outputs.append(rpt.emit_chasing(out, report.chasing,
                                            "chasing.csv"))
        if report.chasing_mcc is not None:
            outputs.append(rpt.emit_chasing(out, report.chasing_mcc,
                                            "chasing_mcc.csv"))
        if args.fmt == "svg":
            pruned = SimpleNamespace(estimates={}, bias=report,
                                     power_rows=pipe.power_rows)
            if "winners_curse" in wanted:
                pruned.estimates = pipe.estimates
            _emit_figures(out, pruned, outputs)
        run = rpt.write_manifest(out, _snapshot(args, "bias"), inputs,
                                 outputs)
    except (StatAuditError, ArithmeticError) as exc:
        _diag("bias", exc)
        return 2
    return _done(out, run)


# --------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    try:
        out = _out_dir(args, "simulate")
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        config = FieldConfig.from_dict(payload)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        config.validate()
    except (OSError, ValueError, TypeError, StatAuditError) as exc:
        _diag("input", exc)
        return 1
    try:
        corpus = simulate_field(config, workers=args.workers)
        papers_path = os.path.join(out, "papers.csv")
        tests_path = os.path.join(out, "tests.csv")
        export(corpus, papers_path, tests_path)
        rpt.write_json(os.path.join(out, "config.json"), config.to_dict())
        outputs = ["papers.csv", "tests.csv", "config.json"]
        run = rpt.write_manifest(
            out, _snapshot(args, "simulate", field_config=config.to_dict()),
            {"config": args.config}, outputs)
    except (StatAuditError, ArithmeticError) as exc:
        _diag("simulate", exc)
        return 2
    return _done(out, run)


# ----------------------------------------------------------------- report

def _read_rows(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _opt_float(cell):
    return float(cell) if cell not in (None, "") else None


def cmd_report(args) -> int:
    try:
        out = args.out or os.path.join(args.auditdir, "figures")
        os.makedirs(out, exist_ok=True)
        if not os.path.isdir(args.auditdir):
            raise FileNotFoundError(
                f"audit directory not found: {args.auditdir}")
        available = {name: os.path.join(args.auditdir, name)
                     for name in ("estimates.csv", "funnel.csv", "power.csv",
                                  "chasing.csv", "chasing_mcc.csv")
                     if os.path.isfile(os.path.join(args.auditdir, name))}
        if not available:
            raise FileNotFoundError(
                f"no audit tables found under {args.auditdir}")
    except OSError as exc:
        _diag("input", exc)
        return 1
    try:
        outputs = []
        inputs = {}
        estimates = {}
        if "estimates.csv" in available:
            path = available["estimates.csv"]
            inputs["estimates"] = path
            for row in _read_rows(path):
                estimates[row["test_id"]] = SimpleNamespace(
                    test_id=row["test_id"],
                    log_or=float(row["log_or"]),
                    ci95=(float(row["ci95_lo"]), float(row["ci95_hi"])))
            if estimates:
                name = "caterpillar.svg"
                rpt.atomic_write(
                    os.path.join(out, name),
                    rpt.svg_caterpillar(list(estimates.values())))
                outputs.append(name)
        if "funnel.csv" in available:
            path = available["funnel.csv"]
            inputs["funnel"] = path
            points = [FunnelPoint(log_or=float(r["log_or"]),
                                  se=float(r["se"]),
                                  paper_id=r["paper_id"],
                                  aggregated=r["aggregated"] == "1")
                      for r in _read_rows(path)]
            if points:
                name = "funnel.svg"
                rpt.atomic_write(os.path.join(out, name),
                                 rpt.svg_funnel(points))
                outputs.append(name)
        if "power.csv" in available and estimates:
            path = available["power.csv"]
            inputs["power"] = path
            pairs = []
            for row in _read_rows(path):
                power = _opt_float(row["power"])
                est = estimates.get(row["test_id"])
                if power is not None and est is not None:
                    pairs.append((power, abs(est.log_or)))
            if pairs:
                fit = None
                if len(pairs) >= 4:
                    try:
                        fit = huber_iwls([p for p, _ in pairs],
                                         [a for _, a in pairs])
                    except StatAuditError:
                        fit = None
                name = "power_scatter.svg"
                rpt.atomic_write(
                    os.path.join(out, name),
                    rpt.svg_power_scatter([p for p, _ in pairs],
                                          [a for _, a in pairs], fit))
                outputs.append(name)
        curves = []
        for csv_name in ("chasing.csv", "chasing_mcc.csv"):
            if csv_name not in available:
                continue
            path = available[csv_name]
            inputs[csv_name.rsplit(".", 1)[0]] = path
            rows = _read_rows(path)
            if not rows:
                continue
            curves.append(ChasingCurve(
                alpha_grid=tuple(float(r["alpha"]) for r in rows),
                A_values=tuple(float(r["A"]) for r in rows),
                p_values=tuple(float(r["p"]) for r in rows),
                O=0, E=0.0, n=0,
                mcc_applied=csv_name == "chasing_mcc.csv"))
        if curves:
            name = "chasing.svg"
            rpt.atomic_write(
                os.path.join(out, name),
                rpt.svg_chasing(curves[0],
                                curves[1] if len(curves) > 1 else None))
            outputs.append(name)
        run = rpt.write_manifest(out, _snapshot(args, "report"), inputs,
                                 outputs)
    except (OSError, ValueError, KeyError) as exc:
        _diag("input", exc)
        return 1
    except (StatAuditError, ArithmeticError) as exc:
        _diag("report", exc)
        return 2
    return _done(out, run)


# ----------------------------------------------------------------- parser

def _common_flags(p) -> None:
    p.add_argument("--alpha", type=float, default=0.05,
                   help="reference significance level (default 0.05)")
    p.add_argument("--mcc", choices=("on", "off", "both"), default="both",
                   help="multiple-comparison correction handling")
    p.add_argument("--thresholds", metavar="FILE",
                   help="JSON file overriding effect-size thresholds")
    p.add_argument("--level", choices=("small", "medium", "large"),
                   default="medium",
                   help="threshold level for power queries")
    p.add_argument("--seed", type=int, help="override the simulation seed")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes (never changes outputs)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json", "svg"),
                   default="csv",
                   help="csv tables only; json adds JSON records; "
                        "svg adds figures")
    p.add_argument("--out", metavar="DIR", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stataudit",
                     description="Reliability audit for reported "
                                 "statistical tests.")
    parser.add_argument("--version", action="version",
                        version=f"stataudit {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command",
                            parser_class=_Parser)

    p = sub.add_parser("extract",
                       help="parse APA-style statistics out of text")
    p.add_argument("source", help="text file, or - for stdin")
    _common_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("audit",
                       help="run the full audit over a coded corpus")
    p.add_argument("corpus", help="directory with papers.csv/tests.csv")
    _common_flags(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("power",
                       help="a-priori power against threshold effects")
    p.add_argument("corpus", help="directory with papers.csv/tests.csv")
    p.add_argument("--upper-bound", action="store_true", dest="upper_bound",
                   help="per-paper power bound at the full sample size")
    p.add_argument("--per-test", action="store_true", dest="per_test",
                   help="per-test power at the coded group sizes")
    _common_flags(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("bias",
                       help="publication-bias and chasing detectors")
    p.add_argument("corpus", help="directory with papers.csv/tests.csv")
    p.add_argument("--funnel", action="store_true",
                   help="funnel points and rank-correlation asymmetry")
    p.add_argument("--winners-curse", action="store_true",
                   dest="winners_curse",
                   help="power against effect size with extrapolation")
    p.add_argument("--chasing", action="store_true",
                   help="significance-chasing A-test curve")
    p.add_argument("--mcc-contingency", action="store_true",
                   dest="mcc_contingency",
                   help="MCC-by-significance contingency tables")
    _common_flags(p)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("simulate",
                       help="generate a synthetic published field")
    p.add_argument("--config", required=True, metavar="FILE",
                   help="field configuration JSON")
    _common_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report",
                       help="re-render figures from audit tables")
    p.add_argument("auditdir", help="directory written by stataudit audit")
    _common_flags(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
