"""A-priori power for two-sample t, chi2, and one-way F tests against effect
thresholds, from group sizes alone.

There is deliberately no entry point that accepts an observed effect size:
post-hoc power is out of scope by construction. r-type and Z-type tests are
served by derived paths (r -> d -> t; Z via the normal model).
"""

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, floor, isfinite, sqrt
from typing import Optional

from .core import kernels as K
from .core.dists import DistSpec, quantile
from .effects import d_from_r
from .errors import DomainError


@dataclass(frozen=True)
class PowerQuery:
    test: str                      # t_two_sample | z_two_sample | r | chi2 | anova_oneway
    effect: float
    effect_type: str               # d | w | f
    alpha: float = 0.05
    m: int = 1                     # family size for the MCC variant
    n1: Optional[int] = None
    n2: Optional[int] = None
    n_total: Optional[int] = None
    df: Optional[int] = None       # chi2
    k: Optional[int] = None        # anova groups
    n_per: Optional[int] = None    # anova per-group n


@dataclass(frozen=True)
class PowerResult:
    power: float
    power_mcc: float
    ncp: float
    critical_value: float


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0,1), got {alpha}")


@lru_cache(maxsize=200_000)
def _t_power(n1: int, n2: int, d: float, alpha: float):
    df = n1 + n2 - 2
    delta = d * sqrt(n1 * n2 / (n1 + n2))
    crit = quantile(DistSpec("t", float(df)), 1.0 - alpha / 2.0)
    power = 1.0 - K.nct_cdf(crit, df, delta) + K.nct_cdf(-crit, df, delta)
    return min(max(power, 0.0), 1.0), delta, crit


def power_t_two_sample(n1: int, n2: int, d: float, alpha: float = 0.05) -> PowerResult:
    """Two-tailed independent-samples t test against standardized difference d."""
    if n1 < 2 or n2 < 2:
        raise DomainError("need n >= 2 per group")
    _check_alpha(alpha)
    if not isfinite(d):
        raise DomainError("d must be finite")
    power, delta, crit = _t_power(int(n1), int(n2), float(d), float(alpha))
    return PowerResult(power=power, power_mcc=power, ncp=delta, critical_value=crit)


@lru_cache(maxsize=200_000)
def _chi2_power(n: int, w: float, df: int, alpha: float):
    lam = n * w * w
    crit = quantile(DistSpec("chi2", float(df)), 1.0 - alpha)
    power = 1.0 - K.nchi2_cdf(crit, df, lam)
    return min(max(power, 0.0), 1.0), lam, crit


def power_chi2(n: int, w: float, df: int = 1, alpha: float = 0.05) -> PowerResult:
    if n < 1:
        raise DomainError("need N >= 1")
    if df < 1:
        raise DomainError("need df >= 1")
    if w < 0.0 or not isfinite(w):
        raise DomainError("w must be finite and >= 0")
    _check_alpha(alpha)
    power, lam, crit = _chi2_power(int(n), float(w), int(df), float(alpha))
    return PowerResult(power=power, power_mcc=power, ncp=lam, critical_value=crit)


@lru_cache(maxsize=200_000)
def _anova_power(k: int, n_per: int, f: float, alpha: float):
    lam = f * f * k * n_per
    df1 = k - 1
    df2 = k * (n_per - 1)
    crit = quantile(DistSpec("f", float(df1), float(df2)), 1.0 - alpha)
    power = 1.0 - K.ncf_cdf(crit, df1, df2, lam)
    return min(max(power, 0.0), 1.0), lam, crit


def power_anova_oneway(k: int, n_per: int, f: float, alpha: float = 0.05) -> PowerResult:
    if k < 2:
        raise DomainError("need k >= 2 groups")
    if n_per < 2:
        raise DomainError("need n >= 2 per group")
    if f < 0.0 or not isfinite(f):
        raise DomainError("f must be finite and >= 0")
    _check_alpha(alpha)
    power, lam, crit = _anova_power(int(k), int(n_per), float(f), float(alpha))
    return PowerResult(power=power, power_mcc=power, ncp=lam, critical_value=crit)


def power_z_two_sample(n1: int, n2: int, d: float, alpha: float = 0.05) -> PowerResult:
    """Normal-model power, the df -> inf analogue of the t routine."""
    if n1 < 2 or n2 < 2:
        raise DomainError("need n >= 2 per group")
    _check_alpha(alpha)
    delta = d * sqrt(n1 * n2 / (n1 + n2))
    crit = K.norm_ppf(1.0 - alpha / 2.0)
    power = 1.0 - K.norm_cdf(crit - delta) + K.norm_cdf(-crit - delta)
    power = min(max(power, 0.0), 1.0)
    return PowerResult(power=power, power_mcc=power, ncp=delta, critical_value=crit)


def power_r(n_total: int, r: float, alpha: float = 0.05) -> PowerResult:
    """Derived path: r -> d -> two-sample t on an even split of N."""
    if n_total < 4:
        raise DomainError("need N >= 4")
    d = d_from_r(r)
    n1 = int(ceil(n_total / 2.0))
    n2 = int(floor(n_total / 2.0))
    return power_t_two_sample(n1, n2, d, alpha)


def upper_bound_power(n_total: int, d: float, alpha: float = 0.05) -> PowerResult:
    """Power had the entire sample gone into one two-group t test."""
    if n_total < 4:
        raise DomainError("need N >= 4")
    n1 = int(ceil(n_total / 2.0))
    n2 = int(floor(n_total / 2.0))
    return power_t_two_sample(n1, n2, d, alpha)


def power_with_mcc(query: PowerQuery) -> PowerResult:
    """Evaluate a PowerQuery at alpha and at the Bonferroni alpha/m."""
    m = int(query.m)
    if m < 1:
        raise DomainError("family size m must be >= 1")
    _check_alpha(query.alpha)
    if not (0.0 < query.alpha / m < 1.0):
        raise DomainError("alpha/m out of (0,1)")

    def solve(alpha):
        if query.test == "t_two_sample":
            if query.n1 is not None and query.n2 is not None:
                return power_t_two_sample(query.n1, query.n2, query.effect, alpha)
            return upper_bound_power(query.n_total, query.effect, alpha)
        if query.test == "z_two_sample":
            return power_z_two_sample(query.n1, query.n2, query.effect, alpha)
        if query.test == "r":
            return power_r(query.n_total, query.effect, alpha)
        if query.test == "chi2":
            return power_chi2(query.n_total, query.effect, query.df or 1, alpha)
        if query.test == "anova_oneway":
            return power_anova_oneway(query.k, query.n_per, query.effect, alpha)
        raise DomainError(f"unknown test kind {query.test!r}")

    base = solve(query.alpha)
    if m == 1:
        return base
    adj = solve(query.alpha / m)
    return PowerResult(power=base.power, power_mcc=adj.power,
                       ncp=base.ncp, critical_value=base.critical_value)
