"""Effect standardization: every retained test becomes Cohen's d / Hedges' g
and then a log odds ratio with sampling variance, confidence interval, and a
Bonferroni-adjusted interval for its test family.

Conversion chains are recorded in the estimate's provenance so alternates can
be compared downstream. The chi2 chain is chi2 -> w=phi -> d -> log OR; a
one-way F with df1 >= 2 cannot be signed onto the d scale and instead becomes
an AnovaEffect carrying Cohen's f for the power engine only.
"""

import json
from dataclasses import dataclass, field
from math import ceil, floor, isfinite, pi, sqrt
from typing import Optional, Tuple

from .core import kernels as K
from .errors import (
    DegenerateDataError,
    DomainError,
    NonFiniteEffectError,
    UnconvertibleTestError,
)

_D_TO_LOGOR = pi / sqrt(3.0)


@dataclass(frozen=True)
class ThresholdTable:
    """Small/medium/large thresholds per effect-size type."""

    d: Tuple[float, float, float] = (0.20, 0.50, 0.80)
    r: Tuple[float, float, float] = (0.10, 0.30, 0.50)
    w: Tuple[float, float, float] = (0.10, 0.30, 0.50)
    f: Tuple[float, float, float] = (0.10, 0.25, 0.40)
    log_or: Tuple[float, float, float] = (0.36, 0.91, 1.45)

    def validate(self):
        for name in ("d", "r", "w", "f", "log_or"):
            row = getattr(self, name)
            if not (row[0] < row[1] < row[2]):
                raise DomainError(f"thresholds for {name} must be strictly increasing")

    def level(self, es_type: str, which: str) -> float:
        idx = {"small": 0, "medium": 1, "large": 2}[which]
        return getattr(self, es_type)[idx]

    @classmethod
    def from_file(cls, path) -> "ThresholdTable":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        kwargs = {}
        for name in ("d", "r", "w", "f", "log_or"):
            if name in raw:
                row = raw[name]
                kwargs[name] = (float(row[0]), float(row[1]), float(row[2]))
        table = cls(**kwargs)
        table.validate()
        return table

    def to_dict(self):
        return {k: list(getattr(self, k)) for k in ("d", "r", "w", "f", "log_or")}


@dataclass(frozen=True)
class EffectEstimate:
    d: float
    g: float
    log_or: float
    var_log_or: float
    se_log_or: float
    ci95: Tuple[float, float]
    ci_mcc: Tuple[float, float]
    family_size: int
    origin: str                      # t, chi2, F, r, Z, means
    n1: int
    n2: int
    sizes_coded: bool = False        # True when group sizes were actually coded
    provenance: Tuple[str, ...] = ()
    test_id: Optional[str] = None
    paper_id: Optional[str] = None


@dataclass(frozen=True)
class AnovaEffect:
    """Power-only record for one-way F tests with df1 >= 2."""

    f: float
    df1: float
    df2: float
    family_size: int
    test_id: Optional[str] = None
    paper_id: Optional[str] = None


def d_from_t(t: float, n1: int, n2: int) -> float:
    if n1 < 2 or n2 < 2:
        raise DomainError("group sizes must be >= 2")
    return t * sqrt(1.0 / n1 + 1.0 / n2)


def d_from_means(m1, m2, sd1, sd2, n1, n2) -> float:
    if n1 < 2 or n2 < 2:
        raise DomainError("group sizes must be >= 2")
    pooled_var = ((n1 - 1) * sd1 * sd1 + (n2 - 1) * sd2 * sd2) / (n1 + n2 - 2)
    if pooled_var <= 0.0:
        raise DegenerateDataError("pooled SD is zero")
    return (m1 - m2) / sqrt(pooled_var)


def hedges_g(d: float, n1: int, n2: int) -> float:
    if n1 + n2 <= 2:
        raise DomainError("n1 + n2 must exceed 2")
    j = 1.0 - 3.0 / (4.0 * (n1 + n2 - 2) - 1.0)
    return j * d


def d_from_r(r: float) -> float:
    if abs(r) >= 1.0:
        raise DomainError(f"|r| must be < 1, got {r}")
    return 2.0 * r / sqrt(1.0 - r * r)


def d_from_phi(phi: float) -> float:
    if abs(phi) >= 1.0:
        raise DomainError(f"|phi| must be < 1, got {phi}")
    return 2.0 * phi / sqrt(1.0 - phi * phi)


def d_from_f(f_es: float) -> float:
    if f_es < 0.0:
        raise DomainError("f must be >= 0")
    return 2.0 * f_es


def w_from_chi2(chi2: float, n: int) -> float:
    if n < 1:
        raise DomainError("N must be >= 1")
    if chi2 < 0.0:
        raise DomainError("chi2 must be >= 0")
    return sqrt(chi2 / n)


def logor_from_d(d: float, n1: int, n2: int) -> Tuple[float, float]:
    """(log odds ratio, its sampling variance)."""
    log_or = d * _D_TO_LOGOR
    var_d = (n1 + n2) / (n1 * n2) + d * d / (2.0 * (n1 + n2))
    return log_or, var_d * (pi * pi / 3.0)


def ci_log_or(log_or: float, se: float, alpha: float, m: int) -> Tuple[float, float]:
    if not (0.0 < alpha < 1.0) or m < 1:
        raise DomainError("need 0 < alpha < 1 and m >= 1")
    z = K.norm_ppf(1.0 - (alpha / m) / 2.0)
    return (log_or - z * se, log_or + z * se)


def confidence_interval(est: EffectEstimate, alpha: float, m: int) -> Tuple[float, float]:
    return ci_log_or(est.log_or, est.se_log_or, alpha, m)


def classify_magnitude(est, thresholds: ThresholdTable) -> str:
    """Bucket |log OR| against the log(OR) thresholds; boundaries go up."""
    thresholds.validate()
    v = abs(est.log_or if isinstance(est, EffectEstimate) else float(est))
    small, medium, large = thresholds.log_or
    if v >= large:
        return "large"
    if v >= medium:
        return "medium"
    if v >= small:
        return "small"
    return "trivial"


def _even_split(n_total: int) -> Tuple[int, int]:
    return int(ceil(n_total / 2.0)), int(floor(n_total / 2.0))


def estimate_effect(*, statistic, value, df1=None, df2=None, sample_n=None,
                    n_value=None, n1=None, n2=None, m1=None, m2=None,
                    sd1=None, sd2=None, family_size=1, alpha=0.05,
                    test_id=None, paper_id=None):
    """Convert one coded test into an EffectEstimate (or AnovaEffect).

    Raises UnconvertibleTestError when required inputs are missing and
    NonFiniteEffectError when the conversion itself blows up (|r| >= 1,
    phi >= 1, zero pooled SD); the exclusion engine maps the latter to its
    "infinite ES or variance" rule.
    """
    provenance = []
    sizes_coded = n1 is not None and n2 is not None

    def effective_sizes(fallback_n):
        if sizes_coded:
            return int(n1), int(n2)
        if fallback_n is None:
            raise UnconvertibleTestError(
                f"test {test_id}: no group sizes and no usable total N")
        provenance.append("even-split-N")
        return _even_split(int(fallback_n))

    have_means = None not in (m1, m2, sd1, sd2) and sizes_coded

    if statistic == "t" and have_means:
        origin = "means"
        try:
            d = d_from_means(m1, m2, sd1, sd2, int(n1), int(n2))
        except DegenerateDataError as exc:
            raise NonFiniteEffectError(str(exc)) from exc
        e1, e2 = int(n1), int(n2)
        provenance.append("means->d")
    elif statistic == "t":
        origin = "t"
        fallback = n_value if n_value is not None else (df1 + 2 if df1 is not None else None)
        e1, e2 = effective_sizes(fallback)
        d = d_from_t(value, e1, e2)
        provenance.append("t->d")
    elif statistic == "Z":
        origin = "Z"
        e1, e2 = effective_sizes(n_value)
        d = d_from_t(value, e1, e2)  # same ncp geometry as t
        provenance.append("z->d")
    elif statistic == "r":
        origin = "r"
        fallback = n_value if n_value is not None else (df1 + 2 if df1 is not None else None)
        e1, e2 = effective_sizes(fallback)
        try:
            d = d_from_r(value)
        except DomainError as exc:
            raise NonFiniteEffectError(str(exc)) from exc
        provenance.append("r->d")
    elif statistic == "chi2":
        origin = "chi2"
        total = sample_n if sample_n is not None else n_value
        if total is None:
            raise UnconvertibleTestError(f"test {test_id}: chi2 without N")
        total = int(total)
        w = w_from_chi2(value, total)
        provenance.append("chi2->w")
        try:
            d = d_from_phi(w)
        except DomainError as exc:
            raise NonFiniteEffectError(
                f"test {test_id}: phi = {w:.4f} >= 1") from exc
        provenance.append("phi->d")
        if sizes_coded:
            e1, e2 = int(n1), int(n2)
        else:
            e1, e2 = _even_split(total)
            provenance.append("even-split-N")
    elif statistic == "F":
        if df1 is None or df2 is None:
            raise UnconvertibleTestError(f"test {test_id}: F without both dfs")
        if df1 > 1:
            # one-way with 3+ groups: f for power, no signed d
            f_es = sqrt(value * df1 / df2)
            return AnovaEffect(f=f_es, df1=df1, df2=df2,
                               family_size=family_size,
                               test_id=test_id, paper_id=paper_id)
        origin = "F"
        fallback = n_value if n_value is not None else df2 + 2
        e1, e2 = effective_sizes(fallback)
        d = d_from_t(sqrt(value), e1, e2)
        provenance.append("F->t->d")
    else:
        raise UnconvertibleTestError(f"unknown statistic {statistic!r}")

    log_or, var = logor_from_d(d, e1, e2)
    if not (isfinite(d) and isfinite(log_or) and isfinite(var)) or var <= 0.0:
        raise NonFiniteEffectError(f"test {test_id}: non-finite effect or variance")
    se = sqrt(var)
    provenance.append("d->log_or")
    g = hedges_g(d, e1, e2)
    est = EffectEstimate(
        d=d, g=g, log_or=log_or, var_log_or=var, se_log_or=se,
        ci95=ci_log_or(log_or, se, 0.05, 1),
        ci_mcc=ci_log_or(log_or, se, alpha, max(int(family_size), 1)),
        family_size=max(int(family_size), 1), origin=origin,
        n1=e1, n2=e2, sizes_coded=sizes_coded,
        provenance=tuple(provenance), test_id=test_id, paper_id=paper_id,
    )
    return est
