"""Field-level bias detectors.

Four families: funnel construction with the Begg-Mazumdar rank test,
winner's-curse correlation plus robust extrapolation to full power,
Ioannidis-Trikalinos significance chasing (the A statistic and its curve
over significance levels), and the MCC significance contingency tables.

All detectors are pure functions of their inputs; anything stochastic lives
in fieldsim, anything file-shaped lives in report.
"""

import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .core import kernels as K
from .core.fisher import FisherResult, fisher_exact_2x2
from .core.huber import RobustFit, huber_iwls
from .core.kendall import kendall_tau_b
from .effects import EffectEstimate, _D_TO_LOGOR
from .errors import (DegenerateDataError, InsufficientDataError,
                     UndefinedCorrelationError)
from .power import PowerQuery, power_with_mcc

_Z95 = 1.959963984540054
_REFERENCE_ALPHA = 0.05

DEFAULT_ALPHA_GRID = tuple(round(0.005 * k, 3) for k in range(1, 41))


@dataclass(frozen=True)
class FunnelPoint:
    log_or: float
    se: float
    paper_id: str
    aggregated: bool

    def __post_init__(self):
        if not self.se > 0:
            raise DegenerateDataError(f"funnel point needs se > 0, got {self.se}")


class BeggMazumdarResult(NamedTuple):
    tau: float
    p: float


@dataclass(frozen=True)
class Extrapolation:
    """Effect extrapolated to 100% power, on both scales."""
    log_or: float
    se: float
    ci: Tuple[float, float]
    d: float
    d_ci: Tuple[float, float]


class WinnersCurseResult(NamedTuple):
    tau: float
    p: float
    fit: RobustFit
    es_at_full_power: Extrapolation


@dataclass(frozen=True)
class ChasingRecord:
    """One test as the chasing detectors see it: its p-value and the power
    query that yields beta_i at any significance level."""
    p_value: float
    query: PowerQuery
    test_id: Optional[str] = None


@dataclass(frozen=True)
class ChasingCurve:
    alpha_grid: Tuple[float, ...]
    A_values: Tuple[float, ...]
    p_values: Tuple[float, ...]
    O: int            # significant count at the 0.05 reference level
    E: float          # expected count at the 0.05 reference level
    n: int
    mcc_applied: bool


class MccContingency(NamedTuple):
    overall: Tuple[Tuple[int, int], Tuple[int, int]]
    matched: Tuple[Tuple[int, int], Tuple[int, int]]
    fisher: FisherResult


@dataclass(frozen=True)
class BiasReport:
    funnel: Tuple[FunnelPoint, ...] = ()
    begg_mazumdar: Optional[BeggMazumdarResult] = None
    winners_curse: Optional[WinnersCurseResult] = None
    chasing: Optional[ChasingCurve] = None
    chasing_mcc: Optional[ChasingCurve] = None
    mcc: Optional[MccContingency] = None


def greiner_r(tau: float) -> float:
    """Pearson-scale equivalent of a Kendall tau (Greiner's relation)."""
    return math.sin(math.pi * tau / 2.0)


# ------------------------------------------------------------------ funnel

def build_funnel(estimates: Sequence[EffectEstimate],
                 per_paper: bool = True) -> Tuple[FunnelPoint, ...]:
    """One funnel point per test, or the per-paper arithmetic means of
    log OR and SE when per_paper is set. Paper order follows first
    appearance, so permuting tests within a paper changes nothing."""
    if not estimates:
        raise InsufficientDataError("no estimates to build a funnel from")
    if not per_paper:
        return tuple(FunnelPoint(log_or=e.log_or, se=e.se_log_or,
                                 paper_id=e.paper_id or "", aggregated=False)
                     for e in estimates)
    order: List[str] = []
    by_paper = {}
    for e in estimates:
        pid = e.paper_id or ""
        if pid not in by_paper:
            by_paper[pid] = []
            order.append(pid)
        by_paper[pid].append(e)
    points = []
    for pid in order:
        group = by_paper[pid]
        log_or = sum(e.log_or for e in group) / len(group)
        se = sum(e.se_log_or for e in group) / len(group)
        points.append(FunnelPoint(log_or=log_or, se=se, paper_id=pid,
                                  aggregated=True))
    return tuple(points)


def begg_mazumdar(points: Sequence[FunnelPoint],
                  stabilized: bool = True) -> BeggMazumdarResult:
    """Rank-correlation funnel asymmetry test.

    Default is the variance-stabilized construction: each effect is
    centered on the inverse-variance-weighted mean and scaled by
    sqrt(v_i - 1/sum(1/v_j)), then Kendall tau-b is taken against the
    variances. stabilized=False ranks the raw effects instead (sensitivity
    variant). Identical effects leave nothing to rank and come back as
    tau = 0, p = 1.
    """
    n = len(points)
    if n < 3:
        raise InsufficientDataError(f"begg_mazumdar needs >= 3 points, got {n}")
    v = [p.se * p.se for p in points]
    es = [p.log_or for p in points]
    if stabilized:
        inv_sum = sum(1.0 / vi for vi in v)
        es_w = sum(e / vi for e, vi in zip(es, v)) / inv_sum
        # deviations below rounding noise are ties, not rankable signal
        tol = 1e-12 * max(1.0, max(abs(e) for e in es))
        x = [0.0 if abs(e - es_w) < tol
             else (e - es_w) / math.sqrt(vi - 1.0 / inv_sum)
             for e, vi in zip(es, v)]
    else:
        x = es
    try:
        tau, p = kendall_tau_b(x, v)
    except UndefinedCorrelationError:
        tau, p = 0.0, 1.0
    return BeggMazumdarResult(tau=tau, p=p)


# ----------------------------------------------------------- winner's curse

def winners_curse(estimates: Sequence[EffectEstimate],
                  powers: Sequence[Optional[float]]) -> WinnersCurseResult:
    """Power against |log OR|: Kendall tau, Huber fit, and the extrapolated
    effect at 100% power with its 95% interval.

    The sequences are aligned; pairs whose power is None (no codable group
    sizes) are dropped. Constant effects make tau undefined, which comes
    back as tau = 0, p = 1: no detectable association.
    """
    if len(estimates) != len(powers):
        raise InsufficientDataError("estimates and powers are not aligned")
    pairs = [(pw, abs(e.log_or)) for e, pw in zip(estimates, powers)
             if pw is not None]
    if len(pairs) < 4:
        raise InsufficientDataError(
            f"winners_curse needs >= 4 powered tests, got {len(pairs)}")
    x = [p for p, _ in pairs]
    y = [a for _, a in pairs]
    try:
        tau, p = kendall_tau_b(x, y)
    except UndefinedCorrelationError:
        tau, p = 0.0, 1.0
    fit = huber_iwls(x, y)
    # Refit against power - 1 so the intercept and its SE sit at full power.
    shifted = huber_iwls([xi - 1.0 for xi in x], y)
    es_full = shifted.intercept
    se_full = shifted.intercept_se
    ci = (es_full - _Z95 * se_full, es_full + _Z95 * se_full)
    d = es_full / _D_TO_LOGOR
    d_ci = (ci[0] / _D_TO_LOGOR, ci[1] / _D_TO_LOGOR)
    extra = Extrapolation(log_or=es_full, se=se_full, ci=ci, d=d, d_ci=d_ci)
    return WinnersCurseResult(tau=tau, p=p, fit=fit, es_at_full_power=extra)


# ------------------------------------------------------ significance chasing

def sig_chasing(pairs: Sequence[Tuple[float, float]],
                alpha: float = 0.05) -> Tuple[float, float]:
    """A statistic for excess significance on (power, p_value) pairs.

    O counts p < alpha, E = sum of powers, and
    A = (O-E)^2/E + (O-E)^2/(n-E), referred to chi2 with one df. By
    construction A = 0 exactly when O = E.
    """
    n = len(pairs)
    if n < 1:
        raise InsufficientDataError("sig_chasing needs at least one pair")
    if not 0.0 < alpha < 1.0:
        raise DegenerateDataError(f"alpha must be in (0, 1), got {alpha}")
    O = sum(1 for _, p in pairs if p < alpha)
    E = float(sum(pw for pw, _ in pairs))
    if E <= 0.0 or E >= n:
        raise DegenerateDataError(f"E = {E} outside (0, {n})")
    diff = O - E
    A = diff * diff / E + diff * diff / (n - E)
    p = 1.0 - K.chi2_cdf(A, 1.0)
    return A, min(max(p, 0.0), 1.0)


def _point(records: Sequence[ChasingRecord], alpha: float, mcc: bool):
    # With mcc every record has its own cut alpha/m_i, so O and E accumulate
    # here instead of routing through sig_chasing's single shared cut.
    O = 0
    E = 0.0
    for r in records:
        res = power_with_mcc(replace(r.query, alpha=alpha))
        if mcc:
            E += res.power_mcc
            if r.p_value < alpha / r.query.m:
                O += 1
        else:
            E += res.power
            if r.p_value < alpha:
                O += 1
    n = len(records)
    if E <= 0.0 or E >= n:
        return float("nan"), float("nan"), O, E
    diff = O - E
    A = diff * diff / E + diff * diff / (n - E)
    p = 1.0 - K.chi2_cdf(A, 1.0)
    return A, min(max(p, 0.0), 1.0), O, E


def chasing_curve(records: Sequence[ChasingRecord],
                  alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
                  mcc: bool = False) -> ChasingCurve:
    """sig_chasing swept over a significance-level grid.

    With mcc set, each record's threshold and power both move to
    alpha / m_i for its own family size. Grid points where E degenerates
    to 0 or n come back as NaN rather than raising. The scalar O and E
    are evaluated at the 0.05 reference level.
    """
    if not records:
        raise InsufficientDataError("chasing_curve needs records")
    grid = tuple(float(a) for a in alpha_grid)
    if any(not 0.0 < a < 1.0 for a in grid):
        raise DegenerateDataError("alpha grid must lie inside (0, 1)")
    A_values = []
    p_values = []
    for alpha in grid:
        A, p, _, _ = _point(records, alpha, mcc)
        A_values.append(A)
        p_values.append(p)
    _, _, O, E = _point(records, _REFERENCE_ALPHA, mcc)
    return ChasingCurve(alpha_grid=grid, A_values=tuple(A_values),
                        p_values=tuple(p_values), O=O, E=E,
                        n=len(records), mcc_applied=mcc)


# --------------------------------------------------------- MCC contingency

def _significant(ci: Tuple[float, float]) -> bool:
    lo, hi = ci
    return lo > 0.0 or hi < 0.0


def mcc_contingency(estimates: Sequence[EffectEstimate]) -> MccContingency:
    """Significance with and without the family correction.

    overall: rows (MCC, no MCC) x columns (significant, not significant),
    with the Fisher exact test run on it. matched: rows by uncorrected
    status x columns by corrected status; Bonferroni only ever removes
    significance, so the (not significant, significant) cell is zero by
    construction.
    """
    if not estimates:
        raise InsufficientDataError("mcc_contingency needs estimates")
    sig_plain = [_significant(e.ci95) for e in estimates]
    sig_mcc = [_significant(e.ci_mcc) for e in estimates]
    a_mcc = sum(sig_mcc)
    a_plain = sum(sig_plain)
    n = len(estimates)
    overall = ((a_mcc, n - a_mcc), (a_plain, n - a_plain))
    both = sum(1 for s0, s1 in zip(sig_plain, sig_mcc) if s0 and s1)
    lost = sum(1 for s0, s1 in zip(sig_plain, sig_mcc) if s0 and not s1)
    gained = sum(1 for s0, s1 in zip(sig_plain, sig_mcc) if not s0 and s1)
    neither = sum(1 for s0, s1 in zip(sig_plain, sig_mcc)
                  if not s0 and not s1)
    matched = ((both, lost), (gained, neither))
    fisher = fisher_exact_2x2(overall)
    return MccContingency(overall=overall, matched=matched, fisher=fisher)
