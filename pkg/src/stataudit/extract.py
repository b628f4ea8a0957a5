"""APA statistic extraction, p recomputation, and consistency classification.

The grammar is the APA core: STAT(df[, N = n]) = value, p OP pvalue, with
STAT in {t, chi2 variants, F, r, Z} and an "ns" alternative for the p clause.
Anything recognizable but malformed (bounded statistics, impossible r, df on
a Z, p > 1) goes to the diagnostics channel instead of being guessed at.
Candidates are never allowed to span a sentence boundary (terminal
punctuation followed by an uppercase start).
"""

import re
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from .core import kernels as K
from .errors import DomainError

_CHI_VARIANTS = ("chi2", "χ2", "χ²", "X2")

_NUM = r"\d+(?:\.\d+)?"
_VAL = r"[+-]?(?:\d+\.\d+|\d+|\.\d+)"
_PVAL = r"(?:\d+\.\d+|\d+|\.\d+)"

_PATTERN = re.compile(
    r"(?<![A-Za-z0-9_])"
    r"(?P<stat>t|F|r|Z|z|chi2|χ2|χ²|X2)"
    r"\s*"
    r"(?:\(\s*(?P<df1>" + _NUM + r")"
    r"(?:\s*,\s*(?P<df2>" + _NUM + r"))?"
    r"(?:\s*,\s*N\s*=\s*(?P<n>\d+))?"
    r"\s*\))?"
    r"\s*(?P<vop>[=<>])\s*(?P<val>" + _VAL + r")"
    r"\s*,\s*(?:p\s*(?P<pop>[=<>])\s*(?P<pval>" + _PVAL + r")|(?P<ns>ns\b))"
)

_SENTENCE_BREAK = re.compile(r"[.!?][\s)\"']*\s[A-Z]")
_TRAILING_BOUND = re.compile(r"\s*[<>=]\s*\.?\d")

_OPS = {"=": "eq", "<": "lt", ">": "gt"}


@dataclass(frozen=True)
class ReportedTest:
    statistic: str                         # t, chi2, F, r, Z
    value: float
    df1: Optional[float] = None
    df2: Optional[float] = None
    sample_n: Optional[int] = None
    p_reported: Optional[float] = None
    p_comparator: str = "eq"               # eq | lt | gt | ns
    tails: str = "unstated"                # two | one | unstated
    source_span: Tuple[int, int] = (0, 0)
    value_decimals: int = 2
    p_decimals: Optional[int] = None


@dataclass(frozen=True)
class ConsistencyVerdict:
    p_recomputed: float
    status: str        # consistent | computation_error | decision_error | one_tailed_consistent
    alpha_ref: float


@dataclass(frozen=True)
class Diagnostic:
    reason: str
    span: Tuple[int, int]
    text: str


def _decimals(token: str) -> int:
    if "." in token:
        return len(token.split(".", 1)[1])
    return 0


def _parse_df(token):
    if token is None:
        return None
    v = float(token)
    return v


def _validate(match) -> Tuple[Optional[ReportedTest], Optional[str]]:
    stat_raw = match.group("stat")
    stat = "chi2" if stat_raw in _CHI_VARIANTS else ("Z" if stat_raw == "z" else stat_raw)
    df1 = _parse_df(match.group("df1"))
    df2 = _parse_df(match.group("df2"))
    sample_n = int(match.group("n")) if match.group("n") else None
    value = float(match.group("val"))

    if match.group("vop") != "=":
        return None, "statistic reported as a bound, not a value"
    if stat == "Z":
        if df1 is not None:
            return None, "Z with degrees of freedom"
    elif df1 is None:
        return None, f"{stat} without degrees of freedom"
    if stat == "F":
        if df2 is None:
            return None, "F needs two dfs"
    elif df2 is not None:
        return None, f"{stat} with a second df"
    if sample_n is not None and stat != "chi2":
        return None, "N = clause on a non-chi2 statistic"
    if stat in ("chi2", "F") and value < 0.0:
        return None, f"negative {stat} value"
    if stat == "r" and abs(value) >= 1.0:
        return None, "|r| >= 1"

    if match.group("ns"):
        comparator = "ns"
        p_reported = None
        p_decimals = None
    else:
        comparator = _OPS[match.group("pop")]
        p_token = match.group("pval")
        p_reported = float(p_token)
        p_decimals = _decimals(p_token)
        if p_reported > 1.0:
            return None, f"reported p = {p_token} > 1"

    test = ReportedTest(
        statistic=stat, value=value, df1=df1, df2=df2, sample_n=sample_n,
        p_reported=p_reported, p_comparator=comparator, tails="unstated",
        source_span=match.span(), value_decimals=_decimals(match.group("val")),
        p_decimals=p_decimals,
    )
    return test, None


def parse_with_diagnostics(text: str) -> Tuple[List[ReportedTest], List[Diagnostic]]:
    """Parse all well-formed APA statistics; divert recognizable-but-broken
    candidates to the diagnostics list; silently skip everything else."""
    tests: List[ReportedTest] = []
    diagnostics: List[Diagnostic] = []
    for m in _PATTERN.finditer(text):
        span_text = text[m.start():m.end()]
        if _SENTENCE_BREAK.search(span_text):
            continue  # candidate spans a sentence boundary
        test, reason = _validate(m)
        if test is not None and _TRAILING_BOUND.match(text, m.end()):
            # "p < .05 < .10" style chains: taking the first bound alone
            # would misstate the claim, so the candidate is diverted whole
            test, reason = None, "chained p comparison"
        if test is not None:
            tests.append(test)
        else:
            diagnostics.append(Diagnostic(reason=reason, span=m.span(), text=span_text))
    return tests, diagnostics


def parse_statistics(text: str) -> List[ReportedTest]:
    return parse_with_diagnostics(text)[0]


def _fmt_number(value: float, decimals: int) -> str:
    return f"{value:.{decimals}f}"


def _fmt_p(value: float, decimals: int) -> str:
    s = f"{value:.{decimals}f}"
    if s.startswith("0.") and decimals > 0:
        return s[1:]
    if s.startswith("-0.") and decimals > 0:
        return "-" + s[2:]
    return s


def _fmt_df(df: float) -> str:
    if df == int(df):
        return str(int(df))
    return repr(df)


def render_apa(test: ReportedTest) -> str:
    """Canonical APA text for a ReportedTest; parse(render(t)) round-trips."""
    if test.statistic == "Z":
        head = "Z"
    elif test.statistic == "chi2":
        if test.sample_n is not None:
            head = f"χ2({_fmt_df(test.df1)}, N = {test.sample_n})"
        else:
            head = f"χ2({_fmt_df(test.df1)})"
    elif test.statistic == "F":
        head = f"F({_fmt_df(test.df1)}, {_fmt_df(test.df2)})"
    else:
        head = f"{test.statistic}({_fmt_df(test.df1)})"
    if test.statistic == "r":
        body = f"{head} = {_fmt_p(test.value, test.value_decimals)}"
    else:
        body = f"{head} = {_fmt_number(test.value, test.value_decimals)}"
    if test.p_comparator == "ns":
        return f"{body}, ns"
    op = {"eq": "=", "lt": "<", "gt": ">"}[test.p_comparator]
    return f"{body}, p {op} {_fmt_p(test.p_reported, test.p_decimals)}"


def recompute_p(test: ReportedTest) -> float:
    """Two-tailed recomputed p from the statistic and its dfs."""
    stat = test.statistic
    v = test.value
    if stat == "Z":
        p = 2.0 * K.norm_cdf(-abs(v))
    elif stat == "t":
        p = 2.0 * (1.0 - K.t_cdf(abs(v), test.df1))
    elif stat == "r":
        if abs(v) >= 1.0:
            raise DomainError(f"|r| = {abs(v)} >= 1")
        t = v * (test.df1 / (1.0 - v * v)) ** 0.5
        p = 2.0 * (1.0 - K.t_cdf(abs(t), test.df1))
    elif stat == "chi2":
        p = 1.0 - K.chi2_cdf(v, test.df1)
    elif stat == "F":
        p = 1.0 - K.f_cdf(v, test.df1, test.df2)
    else:
        raise DomainError(f"unknown statistic {stat!r}")
    return min(max(p, 0.0), 1.0)


def _matches_report(test: ReportedTest, p: float) -> bool:
    if test.p_comparator == "eq":
        d = test.p_decimals if test.p_decimals is not None else 2
        half = 0.5 * 10.0 ** (-d)
        if test.p_reported == 0.0:
            # "p = .000" convention: read as p < half a final digit
            return p < half
        return test.p_reported - half <= p < test.p_reported + half
    if test.p_comparator == "lt":
        return p < test.p_reported
    if test.p_comparator == "gt":
        return p > test.p_reported
    return True  # ns handled by the decision check only


def _claimed_significant(test: ReportedTest, alpha: float) -> Optional[bool]:
    if test.p_comparator == "eq":
        return test.p_reported < alpha
    if test.p_comparator == "lt":
        return True if test.p_reported <= alpha else None
    if test.p_comparator == "gt":
        return False if test.p_reported >= alpha else None
    return False  # ns


def check_consistency(test: ReportedTest, alpha_ref: float = 0.05) -> ConsistencyVerdict:
    """Classify a reported p against the recomputed one.

    Order of resolution: consistent, then the one-tailed rescue (t/Z/r only),
    then decision error when significance at alpha_ref flips, else plain
    computation error.
    """
    p = recompute_p(test)
    if test.p_comparator == "ns":
        status = "consistent" if p > alpha_ref else "decision_error"
        return ConsistencyVerdict(p_recomputed=p, status=status, alpha_ref=alpha_ref)

    if _matches_report(test, p):
        return ConsistencyVerdict(p_recomputed=p, status="consistent", alpha_ref=alpha_ref)
    if test.statistic in ("t", "Z", "r") and _matches_report(test, p / 2.0):
        return ConsistencyVerdict(p_recomputed=p, status="one_tailed_consistent",
                                  alpha_ref=alpha_ref)
    claimed = _claimed_significant(test, alpha_ref)
    recomputed_sig = p < alpha_ref
    if claimed is not None and claimed != recomputed_sig:
        status = "decision_error"
    else:
        status = "computation_error"
    return ConsistencyVerdict(p_recomputed=p, status=status, alpha_ref=alpha_ref)


def test_to_json(test: ReportedTest) -> dict:
    """One JSON-serializable record per ReportedTest, spans included."""
    return {
        "statistic": test.statistic,
        "value": test.value,
        "df1": test.df1,
        "df2": test.df2,
        "sample_n": test.sample_n,
        "p_reported": test.p_reported,
        "p_comparator": test.p_comparator,
        "tails": test.tails,
        "source_span": list(test.source_span),
        "value_decimals": test.value_decimals,
        "p_decimals": test.p_decimals,
    }
