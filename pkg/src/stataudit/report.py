"""Report layer: audit pipeline glue, file emitters, and figures.

Everything here is deliberately boring. Emitters take computed objects and
write CSV/JSON with documented, stable columns; writes are atomic (temp
file in the target directory, then rename); the manifest digests every
input and output and derives the run id from those digests plus the config
snapshot, so a rerun on identical inputs is byte-identical and verifiable.
No timestamps anywhere.

Stable column contracts
  diagnostics.csv   source,line,message
  exclusions.csv    test_id,rule,retained
  estimates.csv     test_id,paper_id,family_id,statistic,log_or,se_log_or,
                    ci95_lo,ci95_hi,ci_mcc_lo,ci_mcc_hi,family_size,d,g,
                    origin,magnitude
  consistency.csv   test_id,statistic,value,df1,df2,p_reported,p_comparator,
                    p_recomputed,status
  power.csv         test_id,statistic,test,family_size,level,effect,power,
                    power_mcc
  upper_bound.csv   paper_id,n_total,level,d,power
  funnel.csv        paper_id,log_or,se,aggregated   (rows by descending se)
  chasing.csv       alpha,A,p
"""

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .bias import (BeggMazumdarResult, BiasReport, ChasingCurve,
                   ChasingRecord, FunnelPoint, MccContingency,
                   WinnersCurseResult, begg_mazumdar, build_funnel,
                   chasing_curve, greiner_r, mcc_contingency, winners_curse)
from .corpus import CodedTest, Corpus, PaperRecord
from .effects import (AnovaEffect, EffectEstimate, ThresholdTable,
                      classify_magnitude, estimate_effect)
from .errors import (InsufficientDataError, NonFiniteEffectError,
                     StatAuditError, UnconvertibleTestError)
from .extract import ReportedTest, check_consistency, recompute_p
from .power import PowerQuery, power_with_mcc, upper_bound_power

LEVELS = ("small", "medium", "large")


# ------------------------------------------------------------- file basics

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def atomic_write(path, text: str) -> None:
    tmp = str(path) + ".part"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, str(path))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)
    return str(v)


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    atomic_write(path, buf.getvalue())


def write_json(path, payload) -> None:
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class AuditRun:
    run_id: str
    version: str
    config: dict
    inputs: Dict[str, str]
    outputs: Dict[str, str]


def write_manifest(out_dir, config: dict, input_paths: Dict[str, str],
                   output_names: Sequence[str]) -> AuditRun:
    inputs = {name: sha256_file(p) for name, p in sorted(input_paths.items())}
    outputs = {name: sha256_file(os.path.join(out_dir, name))
               for name in sorted(output_names)}
    body = json.dumps({"config": config, "inputs": inputs,
                       "outputs": outputs, "version": __version__},
                      sort_keys=True)
    run_id = hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]
    run = AuditRun(run_id=run_id, version=__version__, config=config,
                   inputs=inputs, outputs=outputs)
    write_json(os.path.join(out_dir, "manifest.json"), {
        "run_id": run.run_id, "tool": {"name": "stataudit",
                                       "version": run.version},
        "config": run.config, "inputs": run.inputs, "outputs": run.outputs,
    })
    return run


# --------------------------------------------------------- pipeline pieces

def family_sizes(tests: Sequence[CodedTest]) -> Dict[str, int]:
    """Family size m per test id, counted within (paper_id, family_id)."""
    counts: Dict[Tuple[str, str], int] = {}
    for t in tests:
        key = (t.paper_id, t.family_id)
        counts[key] = counts.get(key, 0) + 1
    return {t.test_id: counts[(t.paper_id, t.family_id)] for t in tests}


def derived_df1(test: CodedTest) -> Optional[float]:
    if test.df1 is not None:
        return test.df1
    if test.statistic == "t" and test.n1 is not None and test.n2 is not None:
        return float(test.n1 + test.n2 - 2)
    return None


def build_estimates(tests: Sequence[CodedTest], alpha: float,
                    fam: Dict[str, int]):
    """Run effect conversion over retained tests.

    Returns (estimates, anova_effects, skipped) where skipped pairs each
    unconvertible test id with the reason.
    """
    estimates: Dict[str, EffectEstimate] = {}
    anova: Dict[str, AnovaEffect] = {}
    skipped: List[Tuple[str, str]] = []
    for t in tests:
        try:
            est = estimate_effect(
                statistic=t.statistic, value=t.value, df1=t.df1, df2=t.df2,
                sample_n=t.n_value, n_value=t.n_value, n1=t.n1, n2=t.n2,
                m1=t.m1, m2=t.m2, sd1=t.sd1, sd2=t.sd2,
                family_size=fam.get(t.test_id, 1), alpha=alpha,
                test_id=t.test_id, paper_id=t.paper_id)
        except (UnconvertibleTestError, NonFiniteEffectError) as exc:
            skipped.append((t.test_id, str(exc)))
            continue
        if isinstance(est, AnovaEffect):
            anova[t.test_id] = est
        else:
            estimates[t.test_id] = est
    return estimates, anova, skipped


def _decimals_of(x: float) -> int:
    s = repr(float(x))
    if "e" in s or "E" in s:
        return 17
    if "." in s:
        return len(s.split(".", 1)[1])
    return 0


def reported_from_coded(test: CodedTest) -> Optional[ReportedTest]:
    """Rebuild the ReportedTest payload a coded row implies, or None when
    the statistic cannot be re-evaluated (missing df)."""
    df1 = derived_df1(test)
    if test.statistic in ("t", "r", "chi2") and df1 is None:
        return None
    if test.statistic == "F" and (df1 is None or test.df2 is None):
        return None
    p_dec = None if test.p_reported is None else _decimals_of(test.p_reported)
    return ReportedTest(
        statistic=test.statistic, value=test.value,
        df1=None if test.statistic == "Z" else df1,
        df2=test.df2 if test.statistic == "F" else None,
        sample_n=test.n_value if test.statistic == "chi2" else None,
        p_reported=test.p_reported, p_comparator=test.p_comparator,
        value_decimals=_decimals_of(test.value), p_decimals=p_dec)


def consistency_rows(tests: Sequence[CodedTest], alpha: float):
    rows = []
    for t in tests:
        rep = reported_from_coded(t)
        if rep is None:
            rows.append((t.test_id, t.statistic, t.value, t.df1, t.df2,
                         t.p_reported, t.p_comparator, None, "unevaluable"))
            continue
        verdict = check_consistency(rep, alpha_ref=alpha)
        rows.append((t.test_id, t.statistic, t.value, t.df1, t.df2,
                     t.p_reported, t.p_comparator, verdict.p_recomputed,
                     verdict.status))
    return rows


def _even_split(n_total: int) -> Tuple[int, int]:
    return n_total - n_total // 2, n_total // 2


def power_query_for(test: CodedTest, thresholds: ThresholdTable,
                    level: str, m: int,
                    alpha: float = 0.05) -> Optional[PowerQuery]:
    """Map one coded test to its a-priori power query at the given
    threshold level, or None when sizes are missing."""
    stat = test.statistic
    if stat == "t":
        d = thresholds.level("d", level)
        if test.n1 is not None and test.n2 is not None:
            return PowerQuery(test="t_two_sample", effect=d, effect_type="d",
                              alpha=alpha, m=m, n1=test.n1, n2=test.n2)
        n_total = test.n_value
        if n_total is None and test.df1 is not None:
            n_total = int(round(test.df1)) + 2
        if n_total is not None and n_total >= 4:
            return PowerQuery(test="t_two_sample", effect=d, effect_type="d",
                              alpha=alpha, m=m, n_total=n_total)
        return None
    if stat == "Z":
        d = thresholds.level("d", level)
        n1, n2 = test.n1, test.n2
        if n1 is None or n2 is None:
            if test.n_value is None or test.n_value < 4:
                return None
            n1, n2 = _even_split(test.n_value)
        return PowerQuery(test="z_two_sample", effect=d, effect_type="d",
                          alpha=alpha, m=m, n1=n1, n2=n2)
    if stat == "r":
        if test.df1 is None:
            return None
        n_total = int(round(test.df1)) + 2
        if n_total < 4:
            return None
        return PowerQuery(test="r", effect=thresholds.level("r", level),
                          effect_type="r", alpha=alpha, m=m,
                          n_total=n_total)
    if stat == "chi2":
        if test.n_value is None or test.df1 is None:
            return None
        return PowerQuery(test="chi2", effect=thresholds.level("w", level),
                          effect_type="w", alpha=alpha, m=m,
                          n_total=test.n_value, df=int(round(test.df1)))
    if stat == "F":
        if test.df1 is None or test.df2 is None:
            return None
        if test.df1 == 1:
            n_total = int(round(test.df2)) + 2
            if n_total < 4:
                return None
            return PowerQuery(test="t_two_sample",
                              effect=thresholds.level("d", level),
                              effect_type="d", alpha=alpha, m=m,
                              n_total=n_total)
        k = int(round(test.df1)) + 1
        n_per = max(2, int(round(test.df2 / k)) + 1)
        return PowerQuery(test="anova_oneway",
                          effect=thresholds.level("f", level),
                          effect_type="f", alpha=alpha, m=m, k=k,
                          n_per=n_per)
    return None


def power_rows(tests: Sequence[CodedTest], thresholds: ThresholdTable,
               level: str, alpha: float, fam: Dict[str, int]):
    rows = []
    queries: Dict[str, PowerQuery] = {}
    for t in tests:
        m = fam.get(t.test_id, 1)
        q = power_query_for(t, thresholds, level, m, alpha)
        if q is None:
            rows.append((t.test_id, t.statistic, None, m, level, None,
                         None, None))
            continue
        queries[t.test_id] = q
        res = power_with_mcc(q)
        rows.append((t.test_id, t.statistic, q.test, m, level, q.effect,
                     res.power, res.power_mcc))
    return rows, queries


def chasing_records_for(tests: Sequence[CodedTest],
                        queries: Dict[str, PowerQuery]):
    """Chasing needs a p and a power per test; a test contributes only when
    both exist. p is recomputed from the statistic when the dfs allow it,
    otherwise the reported point value is trusted."""
    records = []
    for t in tests:
        q = queries.get(t.test_id)
        if q is None:
            continue
        rep = reported_from_coded(t)
        if rep is not None:
            p = recompute_p(rep)
        elif t.p_comparator == "eq" and t.p_reported is not None:
            p = t.p_reported
        else:
            continue
        records.append(ChasingRecord(p_value=p, query=q, test_id=t.test_id))
    return records


def run_bias(tests: Sequence[CodedTest], estimates: Dict[str, EffectEstimate],
             queries: Dict[str, PowerQuery], alpha: float,
             mcc: str = "both") -> BiasReport:
    """Assemble the full bias battery; detectors that lack enough data are
    left as None rather than raising."""
    est_list = [estimates[t.test_id] for t in tests if t.test_id in estimates]
    if not est_list:
        return BiasReport()
    funnel = build_funnel(est_list, per_paper=True)
    bm = None
    if len(funnel) >= 3:
        bm = begg_mazumdar(funnel)
    powers = []
    for t in tests:
        if t.test_id not in estimates:
            continue
        q = queries.get(t.test_id)
        powers.append(power_with_mcc(q).power if q is not None else None)
    wc = None
    if sum(1 for p in powers if p is not None) >= 4:
        wc = winners_curse(est_list, powers)
    records = chasing_records_for(tests, queries)
    curve = curve_mcc = None
    if records:
        if mcc in ("off", "both"):
            curve = chasing_curve(records, mcc=False)
        if mcc in ("on", "both"):
            curve_mcc = chasing_curve(records, mcc=True)
    cont = mcc_contingency(est_list)
    return BiasReport(funnel=funnel, begg_mazumdar=bm, winners_curse=wc,
                      chasing=curve, chasing_mcc=curve_mcc, mcc=cont)


# ---------------------------------------------------------------- emitters

def emit_diagnostics(out_dir, corpus: Corpus) -> str:
    name = "diagnostics.csv"
    write_csv(os.path.join(out_dir, name), ("source", "line", "message"),
              [(os.path.basename(d.source), d.line, d.message)
               for d in corpus.diagnostics])
    return name


def emit_exclusions(out_dir, outcomes) -> str:
    name = "exclusions.csv"
    write_csv(os.path.join(out_dir, name), ("test_id", "rule", "retained"),
              [(o.test_id, o.rule, o.retained) for o in outcomes])
    return name


def emit_estimates(out_dir, tests, estimates, thresholds) -> str:
    name = "estimates.csv"
    rows = []
    for t in tests:
        e = estimates.get(t.test_id)
        if e is None:
            continue
        rows.append((e.test_id, e.paper_id, t.family_id, t.statistic,
                     e.log_or, e.se_log_or, e.ci95[0], e.ci95[1],
                     e.ci_mcc[0], e.ci_mcc[1], e.family_size, e.d, e.g,
                     e.origin, classify_magnitude(e, thresholds)))
    write_csv(os.path.join(out_dir, name),
              ("test_id", "paper_id", "family_id", "statistic", "log_or",
               "se_log_or", "ci95_lo", "ci95_hi", "ci_mcc_lo", "ci_mcc_hi",
               "family_size", "d", "g", "origin", "magnitude"), rows)
    return name


def emit_consistency(out_dir, rows) -> str:
    name = "consistency.csv"
    write_csv(os.path.join(out_dir, name),
              ("test_id", "statistic", "value", "df1", "df2", "p_reported",
               "p_comparator", "p_recomputed", "status"), rows)
    return name


def emit_power(out_dir, rows) -> str:
    name = "power.csv"
    write_csv(os.path.join(out_dir, name),
              ("test_id", "statistic", "test", "family_size", "level",
               "effect", "power", "power_mcc"), rows)
    return name


def emit_upper_bound(out_dir, papers: Sequence[PaperRecord],
                     thresholds: ThresholdTable, alpha: float) -> str:
    name = "upper_bound.csv"
    rows = []
    for p in papers:
        if p.total_n is None or p.total_n < 4:
            continue
        for level in LEVELS:
            d = thresholds.level("d", level)
            res = upper_bound_power(p.total_n, d, alpha)
            rows.append((p.paper_id, p.total_n, level, d, res.power))
    write_csv(os.path.join(out_dir, name),
              ("paper_id", "n_total", "level", "d", "power"), rows)
    return name


def emit_funnel(out_dir, points: Sequence[FunnelPoint]) -> str:
    name = "funnel.csv"
    ordered = sorted(points, key=lambda p: (-p.se, p.paper_id))
    write_csv(os.path.join(out_dir, name),
              ("paper_id", "log_or", "se", "aggregated"),
              [(p.paper_id, p.log_or, p.se, p.aggregated) for p in ordered])
    return name


def emit_chasing(out_dir, curve: ChasingCurve, name: str) -> str:
    write_csv(os.path.join(out_dir, name), ("alpha", "A", "p"),
              list(zip(curve.alpha_grid, curve.A_values, curve.p_values)))
    return name


def _bm_dict(bm: BeggMazumdarResult) -> dict:
    return {"tau": bm.tau, "p": bm.p, "r_equivalent": greiner_r(bm.tau)}


def _wc_dict(wc: WinnersCurseResult) -> dict:
    ex = wc.es_at_full_power
    return {
        "tau": wc.tau, "p": wc.p, "r_equivalent": greiner_r(wc.tau),
        "fit": {"intercept": wc.fit.intercept, "slope": wc.fit.slope,
                "intercept_se": wc.fit.intercept_se,
                "slope_se": wc.fit.slope_se,
                "residual_scale": wc.fit.residual_scale,
                "iterations": wc.fit.iterations,
                "converged": wc.fit.converged},
        "es_at_full_power": {"log_or": ex.log_or, "se": ex.se,
                             "ci": list(ex.ci), "d": ex.d,
                             "d_ci": list(ex.d_ci)},
    }


def _curve_dict(c: ChasingCurve) -> dict:
    return {"O": c.O, "E": c.E, "n": c.n, "mcc_applied": c.mcc_applied,
            "alpha_grid": list(c.alpha_grid), "A": list(c.A_values),
            "p": list(c.p_values)}


def _mcc_dict(mc: MccContingency) -> dict:
    return {
        "overall": [list(r) for r in mc.overall],
        "matched": [list(r) for r in mc.matched],
        "fisher": {"p": mc.fisher.p, "odds_ratio": mc.fisher.odds_ratio,
                   "sample_or": mc.fisher.sample_or,
                   "sample_or_ci": list(mc.fisher.sample_or_ci)},
    }


def emit_bias_json(out_dir, report: BiasReport) -> str:
    name = "bias.json"
    payload = {
        "begg_mazumdar": None if report.begg_mazumdar is None
        else _bm_dict(report.begg_mazumdar),
        "winners_curse": None if report.winners_curse is None
        else _wc_dict(report.winners_curse),
        "chasing": None if report.chasing is None
        else _curve_dict(report.chasing),
        "chasing_mcc": None if report.chasing_mcc is None
        else _curve_dict(report.chasing_mcc),
        "mcc_contingency": None if report.mcc is None
        else _mcc_dict(report.mcc),
        "n_funnel_points": len(report.funnel),
    }
    write_json(os.path.join(out_dir, name), payload)
    return name


# ------------------------------------------------------------------- SVG

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 64, 20, 20, 48


def _scale(lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        span = 1.0
    return lambda v: out_lo + (v - lo) / span * (out_hi - out_lo)


def _pad(lo, hi, frac=0.06):
    span = hi - lo
    if span == 0:
        span = max(abs(lo), 1.0)
    return lo - frac * span, hi + frac * span


def _fmt_tick(v: float) -> str:
    return f"{v:.3g}"


def _axes(sx, sy, xlo, xhi, ylo, yhi, xlabel, ylabel, n=5):
    parts = []
    parts.append(f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" '
                 f'y2="{_H - _MB}" stroke="#333" stroke-width="1"/>')
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" '
                 f'y2="{_H - _MB}" stroke="#333" stroke-width="1"/>')
    for i in range(n):
        xv = xlo + (xhi - xlo) * i / (n - 1)
        px = sx(xv)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" '
                     f'font-size="11" text-anchor="middle" '
                     f'fill="#333">{_fmt_tick(xv)}</text>')
        yv = ylo + (yhi - ylo) * i / (n - 1)
        py = sy(yv)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" font-size="11" '
                     f'text-anchor="end" fill="#333">{_fmt_tick(yv)}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{_H - 12}" '
                 f'font-size="12" text-anchor="middle" '
                 f'fill="#333">{xlabel}</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2:.2f}" '
                 f'font-size="12" text-anchor="middle" fill="#333" '
                 f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.2f})">'
                 f'{ylabel}</text>')
    return parts


def _svg_doc(parts, height=_H) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{height}" viewBox="0 0 {_W} {height}">'
            f'<rect width="{_W}" height="{height}" fill="white"/>')
    return head + "".join(parts) + "</svg>\n"


def svg_caterpillar(estimates: Sequence[EffectEstimate]) -> str:
    ordered = sorted(estimates, key=lambda e: (e.log_or, e.test_id or ""))
    n = len(ordered)
    height = max(240, 12 * n + _MT + _MB + 20)
    lo = min(min(e.ci95[0] for e in ordered), 0.0)
    hi = max(max(e.ci95[1] for e in ordered), 0.0)
    xlo, xhi = _pad(lo, hi)
    sx = _scale(xlo, xhi, _ML, _W - _MR)
    top, bottom = _MT + 10, height - _MB - 10
    step = (bottom - top) / max(n - 1, 1)
    parts = []
    zero = sx(0.0)
    parts.append(f'<line x1="{zero:.2f}" y1="{_MT}" x2="{zero:.2f}" '
                 f'y2="{height - _MB}" stroke="#999" stroke-width="1" '
                 f'stroke-dasharray="4 3"/>')
    for i, e in enumerate(ordered):
        y = bottom - i * step
        parts.append(f'<line x1="{sx(e.ci95[0]):.2f}" y1="{y:.2f}" '
                     f'x2="{sx(e.ci95[1]):.2f}" y2="{y:.2f}" '
                     f'stroke="#356a9a" stroke-width="1"/>')
        parts.append(f'<circle cx="{sx(e.log_or):.2f}" cy="{y:.2f}" '
                     f'r="2" fill="#123a5e"/>')
    parts.append(f'<line x1="{_ML}" y1="{height - _MB}" x2="{_W - _MR}" '
                 f'y2="{height - _MB}" stroke="#333"/>')
    for i in range(5):
        xv = xlo + (xhi - xlo) * i / 4
        px = sx(xv)
        parts.append(f'<line x1="{px:.2f}" y1="{height - _MB}" '
                     f'x2="{px:.2f}" y2="{height - _MB + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px:.2f}" y="{height - _MB + 18}" '
                     f'font-size="11" text-anchor="middle" fill="#333">'
                     f'{_fmt_tick(xv)}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{height - 12}" '
                 f'font-size="12" text-anchor="middle" fill="#333">'
                 f'log odds ratio (95% CI)</text>')
    return _svg_doc(parts, height=height)


def svg_funnel(points: Sequence[FunnelPoint]) -> str:
    xlo, xhi = _pad(min(p.log_or for p in points),
                    max(p.log_or for p in points))
    ylo, yhi = _pad(min(p.se for p in points), max(p.se for p in points))
    sx = _scale(xlo, xhi, _ML, _W - _MR)
    sy = _scale(ylo, yhi, _MT, _H - _MB)     # small SE at the top
    parts = _axes(sx, sy, xlo, xhi, ylo, yhi, "log odds ratio",
                  "standard error")
    mean = sum(p.log_or for p in points) / len(points)
    parts.append(f'<line x1="{sx(mean):.2f}" y1="{_MT}" '
                 f'x2="{sx(mean):.2f}" y2="{_H - _MB}" stroke="#999" '
                 f'stroke-dasharray="4 3"/>')
    # funnel.csv orders rows by descending SE; drawing in that same order
    # keeps the figure byte-identical whether rendered live or from the CSV
    for p in sorted(points, key=lambda q: (-q.se, q.paper_id)):
        parts.append(f'<circle cx="{sx(p.log_or):.2f}" cy="{sy(p.se):.2f}" '
                     f'r="3" fill="none" stroke="#356a9a"/>')
    return _svg_doc(parts)


def svg_power_scatter(powers: Sequence[float], abs_log_or: Sequence[float],
                      fit) -> str:
    xlo, xhi = 0.0, 1.0
    ylo, yhi = _pad(0.0, max(abs_log_or))
    sx = _scale(xlo, xhi, _ML, _W - _MR)
    sy = _scale(ylo, yhi, _H - _MB, _MT)
    parts = _axes(sx, sy, xlo, xhi, ylo, yhi, "a-priori power",
                  "|log odds ratio|")
    for x, y in zip(powers, abs_log_or):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
                     f'fill="none" stroke="#356a9a"/>')
    if fit is not None:
        y0 = fit.intercept
        y1 = fit.intercept + fit.slope
        parts.append(f'<line x1="{sx(0.0):.2f}" y1="{sy(y0):.2f}" '
                     f'x2="{sx(1.0):.2f}" y2="{sy(y1):.2f}" '
                     f'stroke="#b0413e" stroke-width="1.5"/>')
    return _svg_doc(parts)


def svg_chasing(curve: ChasingCurve,
                curve_mcc: Optional[ChasingCurve] = None) -> str:
    xlo, xhi = _pad(curve.alpha_grid[0], curve.alpha_grid[-1], 0.02)
    sx = _scale(xlo, xhi, _ML, _W - _MR)
    sy = _scale(0.0, 1.0, _H - _MB, _MT)
    parts = _axes(sx, sy, xlo, xhi, 0.0, 1.0, "significance level",
                  "A-test p-value")
    parts.append(f'<line x1="{_ML}" y1="{sy(0.05):.2f}" x2="{_W - _MR}" '
                 f'y2="{sy(0.05):.2f}" stroke="#999" '
                 f'stroke-dasharray="2 3"/>')

    def poly(c, dash):
        pts = " ".join(f"{sx(a):.2f},{sy(p):.2f}"
                       for a, p in zip(c.alpha_grid, c.p_values)
                       if not math.isnan(p))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<polyline points="{pts}" fill="none" stroke="#356a9a" '
                f'stroke-width="1.5"{extra}/>')

    parts.append(poly(curve, ""))
    if curve_mcc is not None:
        parts.append(poly(curve_mcc, "6 4").replace("#356a9a", "#b0413e"))
        parts.append(f'<text x="{_W - _MR - 4}" y="{_MT + 14}" '
                     f'font-size="11" text-anchor="end" fill="#356a9a">'
                     f'uncorrected</text>')
        parts.append(f'<text x="{_W - _MR - 4}" y="{_MT + 28}" '
                     f'font-size="11" text-anchor="end" fill="#b0413e">'
                     f'with MCC</text>')
    return _svg_doc(parts)
