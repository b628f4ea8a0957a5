"""Corpus data model: papers, coded tests, ingestion, and the exclusion engine.

CSV is the primary interchange format (papers.csv / tests.csv, header row
mandatory, missing values empty); a JSON mirror of both is accepted and
emitted. Ingestion validates row by row and collects diagnostics instead of
failing: a bad row is dropped with a line-numbered message, the rest of the
file still loads.
"""

import csv
import json
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .effects import estimate_effect
from .errors import (NonFiniteEffectError, SchemaError, UnconvertibleTestError,
                     DomainError, InsufficientDataError)

PAPERS_COLUMNS = ("paper_id", "total_n", "mturk", "mcc", "venue", "year")
TESTS_COLUMNS = ("test_id", "paper_id", "family_id", "statistic", "df1", "df2",
                 "n_value", "value", "p_reported", "p_comparator", "n1", "n2",
                 "m1", "m2", "sd1", "sd2", "design", "cont_rows", "cont_cols")
# n_factors is an optional extension column: the stock schema cannot express
# factorial structure, and the multi-way F rule needs it.
TESTS_OPTIONAL_COLUMNS = ("n_factors",)

STATISTICS = ("t", "chi2", "F", "r", "Z")
DESIGNS = ("ind", "dep", "unk")
COMPARATORS = ("eq", "lt", "gt", "ns")

EXCLUSION_RULES = (
    "independent_on_dependent",
    "proportion_as_t",
    "dependent_without_correlation",
    "chi2_without_df",
    "chi2_df_gt1_without_contingency",
    "multiway_f",
    "infinite_es",
    "duplicate",
)


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    total_n: Optional[int] = None
    mturk: Optional[bool] = None
    mcc: Optional[bool] = None
    venue: str = ""
    year: Optional[int] = None


@dataclass(frozen=True)
class CodedTest:
    test_id: str
    paper_id: str
    family_id: str
    statistic: str
    value: float
    df1: Optional[float] = None
    df2: Optional[float] = None
    n_value: Optional[int] = None
    p_reported: Optional[float] = None
    p_comparator: str = "eq"
    n1: Optional[int] = None
    n2: Optional[int] = None
    m1: Optional[float] = None
    m2: Optional[float] = None
    sd1: Optional[float] = None
    sd2: Optional[float] = None
    design: str = "unk"
    cont_rows: Optional[int] = None
    cont_cols: Optional[int] = None
    n_factors: Optional[int] = None


@dataclass(frozen=True)
class IngestDiagnostic:
    source: str
    line: int
    message: str


@dataclass(frozen=True)
class ExclusionOutcome:
    test_id: str
    rule: Optional[str]
    retained: bool


@dataclass(frozen=True, repr=False)
class Corpus:
    papers: Tuple[PaperRecord, ...] = ()
    tests: Tuple[CodedTest, ...] = ()
    diagnostics: Tuple[IngestDiagnostic, ...] = ()

    def __repr__(self):
        return (f"Corpus(papers={len(self.papers)}, tests={len(self.tests)}, "
                f"diagnostics={len(self.diagnostics)})")

    def paper_index(self) -> Dict[str, PaperRecord]:
        return {p.paper_id: p for p in self.papers}

    def tests_for_paper(self, paper_id: str) -> Tuple[CodedTest, ...]:
        return tuple(t for t in self.tests if t.paper_id == paper_id)


# ---------------------------------------------------------------- ingestion

def _clean(raw) -> str:
    if raw is None:
        return ""
    return str(raw).strip()


def _opt_int(raw, col, errs, minimum=None):
    s = _clean(raw)
    if not s:
        return None
    try:
        v = int(s)
    except ValueError:
        errs.append(f"{col}: not an integer: {s!r}")
        return None
    if minimum is not None and v < minimum:
        errs.append(f"{col}: {v} below {minimum}")
        return None
    return v


def _opt_float(raw, col, errs):
    s = _clean(raw)
    if not s:
        return None
    try:
        v = float(s)
    except ValueError:
        errs.append(f"{col}: not a number: {s!r}")
        return None
    if not math.isfinite(v):
        errs.append(f"{col}: not finite: {s!r}")
        return None
    return v


def _opt_bool(raw, col, errs):
    s = _clean(raw)
    if not s:
        return None
    if s in ("0", "1"):
        return s == "1"
    if isinstance(raw, bool):
        return raw
    errs.append(f"{col}: expected 0 or 1, got {s!r}")
    return None


def _paper_from_row(row, errs) -> Optional[PaperRecord]:
    paper_id = _clean(row.get("paper_id"))
    if not paper_id:
        errs.append("paper_id: empty")
        return None
    total_n = _opt_int(row.get("total_n"), "total_n", errs, minimum=1)
    mturk = _opt_bool(row.get("mturk"), "mturk", errs)
    mcc = _opt_bool(row.get("mcc"), "mcc", errs)
    year = _opt_int(row.get("year"), "year", errs)
    if errs:
        return None
    return PaperRecord(paper_id=paper_id, total_n=total_n, mturk=mturk,
                       mcc=mcc, venue=_clean(row.get("venue")), year=year)


def _test_from_row(row, errs) -> Optional[CodedTest]:
    test_id = _clean(row.get("test_id"))
    paper_id = _clean(row.get("paper_id"))
    family_id = _clean(row.get("family_id"))
    if not test_id:
        errs.append("test_id: empty")
    if not paper_id:
        errs.append("paper_id: empty")
    if not family_id:
        errs.append("family_id: empty")

    statistic = _clean(row.get("statistic"))
    if statistic not in STATISTICS:
        errs.append(f"statistic: unknown {statistic!r}")

    value = _opt_float(row.get("value"), "value", errs)
    if value is None and not any(e.startswith("value:") for e in errs):
        errs.append("value: empty")

    df1 = _opt_float(row.get("df1"), "df1", errs)
    df2 = _opt_float(row.get("df2"), "df2", errs)
    if df1 is not None and df1 <= 0:
        errs.append(f"df1: must be positive, got {df1}")
    if df2 is not None and df2 <= 0:
        errs.append(f"df2: must be positive, got {df2}")

    comparator = _clean(row.get("p_comparator")) or "eq"
    if comparator not in COMPARATORS:
        errs.append(f"p_comparator: unknown {comparator!r}")
    p_reported = _opt_float(row.get("p_reported"), "p_reported", errs)
    if p_reported is not None and not 0.0 <= p_reported <= 1.0:
        errs.append(f"p_reported: outside [0, 1]: {p_reported}")
    if p_reported is None and comparator in ("eq", "lt", "gt"):
        errs.append(f"p_reported: empty with comparator {comparator!r}")

    design = _clean(row.get("design")) or "unk"
    if design not in DESIGNS:
        errs.append(f"design: unknown {design!r}")

    n_value = _opt_int(row.get("n_value"), "n_value", errs, minimum=1)
    n1 = _opt_int(row.get("n1"), "n1", errs, minimum=1)
    n2 = _opt_int(row.get("n2"), "n2", errs, minimum=1)
    m1 = _opt_float(row.get("m1"), "m1", errs)
    m2 = _opt_float(row.get("m2"), "m2", errs)
    sd1 = _opt_float(row.get("sd1"), "sd1", errs)
    sd2 = _opt_float(row.get("sd2"), "sd2", errs)
    if sd1 is not None and sd1 < 0:
        errs.append(f"sd1: negative: {sd1}")
    if sd2 is not None and sd2 < 0:
        errs.append(f"sd2: negative: {sd2}")
    cont_rows = _opt_int(row.get("cont_rows"), "cont_rows", errs, minimum=2)
    cont_cols = _opt_int(row.get("cont_cols"), "cont_cols", errs, minimum=2)
    n_factors = _opt_int(row.get("n_factors"), "n_factors", errs, minimum=1)

    if errs:
        return None
    return CodedTest(
        test_id=test_id, paper_id=paper_id, family_id=family_id,
        statistic=statistic, value=value, df1=df1, df2=df2, n_value=n_value,
        p_reported=p_reported, p_comparator=comparator, n1=n1, n2=n2,
        m1=m1, m2=m2, sd1=sd1, sd2=sd2, design=design,
        cont_rows=cont_rows, cont_cols=cont_cols, n_factors=n_factors,
    )


def _iter_csv(path, required, optional=()):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return  # zero-byte file: empty corpus, no complaint
        header = [h.strip() for h in reader.fieldnames]
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: header missing columns {missing}")
        unknown = [c for c in header if c not in required + tuple(optional)]
        if unknown:
            raise SchemaError(f"{path}: unknown columns {unknown}")
        for row in reader:
            yield reader.line_num, row


def _iter_json(path, key):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if isinstance(payload, dict):
        payload = payload.get(key, [])
    if not isinstance(payload, list):
        raise SchemaError(f"{path}: expected a list or an object with {key!r}")
    for i, row in enumerate(payload):
        if not isinstance(row, dict):
            raise SchemaError(f"{path}: entry {i + 1} is not an object")
        yield i + 1, row


def _rows(path, required, optional, json_key):
    if str(path).endswith(".json"):
        return _iter_json(path, json_key)
    return _iter_csv(path, required, optional)


def ingest(papers_path=None, tests_path=None) -> Corpus:
    """Load a corpus from papers/tests files (.csv or .json each).

    Either path may be None. Bad rows become line-numbered diagnostics and
    are dropped; a malformed header or unreadable file raises SchemaError.
    """
    papers: List[PaperRecord] = []
    tests: List[CodedTest] = []
    diags: List[IngestDiagnostic] = []
    seen_papers = set()
    seen_tests = set()

    if papers_path is not None:
        for line, row in _rows(papers_path, PAPERS_COLUMNS, (), "papers"):
            errs: List[str] = []
            rec = _paper_from_row(row, errs)
            if rec is not None and rec.paper_id in seen_papers:
                errs.append(f"paper_id: duplicate {rec.paper_id!r}")
                rec = None
            if rec is None:
                for e in errs:
                    diags.append(IngestDiagnostic(str(papers_path), line, e))
            else:
                seen_papers.add(rec.paper_id)
                papers.append(rec)

    if tests_path is not None:
        for line, row in _rows(tests_path, TESTS_COLUMNS,
                               TESTS_OPTIONAL_COLUMNS, "tests"):
            errs = []
            rec = _test_from_row(row, errs)
            if rec is not None and rec.test_id in seen_tests:
                errs.append(f"test_id: duplicate {rec.test_id!r}")
                rec = None
            if rec is None:
                for e in errs:
                    diags.append(IngestDiagnostic(str(tests_path), line, e))
            else:
                if papers_path is not None and rec.paper_id not in seen_papers:
                    diags.append(IngestDiagnostic(
                        str(tests_path), line,
                        f"paper_id: no paper record for {rec.paper_id!r}"))
                seen_tests.add(rec.test_id)
                tests.append(rec)

    return Corpus(papers=tuple(papers), tests=tuple(tests),
                  diagnostics=tuple(diags))


# ------------------------------------------------------------------ export

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)
    return str(v)


def _paper_cells(p: PaperRecord) -> dict:
    return {"paper_id": p.paper_id, "total_n": _cell(p.total_n),
            "mturk": _cell(p.mturk), "mcc": _cell(p.mcc),
            "venue": p.venue, "year": _cell(p.year)}


def _test_cells(t: CodedTest) -> dict:
    cols = TESTS_COLUMNS + TESTS_OPTIONAL_COLUMNS
    return {c: _cell(getattr(t, c)) for c in cols}


def export(corpus: Corpus, papers_path, tests_path) -> None:
    """Write the corpus back out; export then ingest is identity.

    Format follows each extension (.csv or .json). Floats use the shortest
    representation that parses back exactly.
    """
    if str(papers_path).endswith(".json"):
        rows = [_paper_cells(p) for p in corpus.papers]
        with open(papers_path, "w", encoding="utf-8") as fh:
            json.dump({"papers": rows}, fh, indent=2)
            fh.write("\n")
    else:
        with open(papers_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(PAPERS_COLUMNS))
            w.writeheader()
            for p in corpus.papers:
                w.writerow(_paper_cells(p))

    test_cols = list(TESTS_COLUMNS + TESTS_OPTIONAL_COLUMNS)
    if str(tests_path).endswith(".json"):
        rows = [_test_cells(t) for t in corpus.tests]
        with open(tests_path, "w", encoding="utf-8") as fh:
            json.dump({"tests": rows}, fh, indent=2)
            fh.write("\n")
    else:
        with open(tests_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=test_cols)
            w.writeheader()
            for t in corpus.tests:
                w.writerow(_test_cells(t))


# -------------------------------------------------------- exclusion engine

def _is_proportion(m) -> bool:
    return m is not None and 0.0 <= m <= 1.0


def _infinite_es(test: CodedTest) -> bool:
    try:
        estimate_effect(
            statistic=test.statistic, value=test.value, df1=test.df1,
            df2=test.df2, sample_n=test.n_value, n_value=test.n_value,
            n1=test.n1, n2=test.n2, m1=test.m1, m2=test.m2,
            sd1=test.sd1, sd2=test.sd2, test_id=test.test_id,
            paper_id=test.paper_id)
    except NonFiniteEffectError:
        return True
    except (UnconvertibleTestError, DomainError, InsufficientDataError):
        return False
    return False


def _match_rule(test: CodedTest) -> Optional[str]:
    if test.statistic == "t" and test.design == "dep" \
            and test.n1 is not None and test.n2 is not None:
        return "independent_on_dependent"
    if test.statistic == "t" and _is_proportion(test.m1) \
            and _is_proportion(test.m2) and test.sd1 is None and test.sd2 is None:
        return "proportion_as_t"
    if test.statistic == "t" and test.design == "dep":
        return "dependent_without_correlation"
    if test.statistic == "chi2" and test.df1 is None:
        return "chi2_without_df"
    if test.statistic == "chi2" and test.df1 is not None and test.df1 > 1 \
            and (test.cont_rows is None or test.cont_cols is None):
        return "chi2_df_gt1_without_contingency"
    if test.statistic == "F" and test.n_factors is not None and test.n_factors > 1:
        return "multiway_f"
    if _infinite_es(test):
        return "infinite_es"
    return None


def apply_exclusions(corpus: Corpus):
    """Run the eight-rule refinement waterfall over corpus.tests.

    Rules are checked in table order and the first match is the attributed
    rule. The duplicate rule runs last among tests that survived the other
    seven: the first occurrence of a (paper_id, statistic, df1, df2, value,
    p_reported) key is retained, later ones are excluded. Returns (retained
    tests, outcomes), one outcome per input test in input order.
    """
    retained: List[CodedTest] = []
    outcomes: List[ExclusionOutcome] = []
    seen_keys = set()
    for test in corpus.tests:
        rule = _match_rule(test)
        if rule is None:
            key = (test.paper_id, test.statistic, test.df1, test.df2,
                   test.value, test.p_reported)
            if key in seen_keys:
                rule = "duplicate"
            else:
                seen_keys.add(key)
        if rule is None:
            retained.append(test)
            outcomes.append(ExclusionOutcome(test.test_id, None, True))
        else:
            outcomes.append(ExclusionOutcome(test.test_id, rule, False))
    return tuple(retained), tuple(outcomes)


def exclusion_table(outcomes) -> Dict[str, int]:
    """Counts per rule plus 'retained' and 'total', table order preserved."""
    table = {rule: 0 for rule in EXCLUSION_RULES}
    table["retained"] = 0
    for o in outcomes:
        if o.retained:
            table["retained"] += 1
        else:
            table[o.rule] += 1
    table["total"] = len(outcomes)
    return table


def descriptives(values) -> Dict[str, float]:
    """Summary row: min, q25, median, q75, max, iqr, mean, sd.

    Quartiles use linear interpolation (type 7); sd is the sample SD.
    """
    a = np.asarray(list(values), dtype=float)
    if a.size == 0:
        raise InsufficientDataError("descriptives of an empty sequence")
    q0, q25, q50, q75, q100 = (float(q) for q in
                               np.quantile(a, [0.0, 0.25, 0.5, 0.75, 1.0]))
    sd = float(np.std(a, ddof=1)) if a.size > 1 else 0.0
    return {"min": q0, "q25": q25, "median": q50, "q75": q75, "max": q100,
            "iqr": q75 - q25, "mean": float(np.mean(a)), "sd": sd}
