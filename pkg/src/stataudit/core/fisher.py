"""Fisher exact test for 2x2 tables.

Two-sided p is the classical tail sum over tables whose probability does not
exceed the observed one. Two odds-ratio estimates are exposed: the sample OR
ad/bc with a Wald log-scale CI, and the conditional maximum-likelihood OR of
the noncentral hypergeometric model. Zero cells are legal as long as both
margins are positive; the OR then degenerates to 0 or inf and the CI is
one-sided (computed from the 0.5-corrected table on the finite side).
"""

from dataclasses import dataclass
from math import exp, inf, lgamma, log
from typing import Tuple

from ..errors import DegenerateTableError, DomainError
from ._backend import kernels as K

# relative slack when comparing pmfs, absorbs float noise in the tail sum
_REL = 1e-7


def _log_choose(n, k):
    return lgamma(n + 1.0) - lgamma(k + 1.0) - lgamma(n - k + 1.0)


@dataclass(frozen=True)
class FisherResult:
    p: float
    odds_ratio: float            # conditional MLE
    sample_or: float             # ad/bc
    sample_or_ci: Tuple[float, float]
    table: Tuple[Tuple[int, int], Tuple[int, int]]


def _cond_mle(amin, amax, a_obs, logw0, ks):
    # solve E_psi[A] = a_obs; the mean is strictly increasing in log(psi)
    if a_obs <= amin:
        return 0.0
    if a_obs >= amax:
        return inf

    def mean_at(lpsi):
        logs = [logw0[i] + k * lpsi for i, k in enumerate(ks)]
        m = max(logs)
        ws = [exp(v - m) for v in logs]
        tot = sum(ws)
        return sum(k * w for k, w in zip(ks, ws)) / tot

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if mean_at(lo) <= a_obs:
            break
        lo *= 2.0
    for _ in range(200):
        if mean_at(hi) >= a_obs:
            break
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_at(mid) < a_obs:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return exp(0.5 * (lo + hi))


def fisher_exact_2x2(table) -> FisherResult:
    (a, b), (c, d) = table
    cells = (a, b, c, d)
    for v in cells:
        if int(v) != v or v < 0:
            raise DomainError(f"cells must be nonnegative integers, got {cells}")
    a, b, c, d = (int(v) for v in cells)
    r1, r2 = a + b, c + d
    c1, c2 = a + c, b + d
    if min(r1, r2, c1, c2) == 0:
        raise DegenerateTableError(f"zero margin in table {((a, b), (c, d))}")
    n = r1 + r2

    amin = max(0, c1 - r2)
    amax = min(r1, c1)
    ks = list(range(amin, amax + 1))
    log_denom = _log_choose(n, c1)
    logw0 = [_log_choose(r1, k) + _log_choose(r2, c1 - k) for k in ks]
    pmf = [exp(w - log_denom) for w in logw0]
    p_obs = pmf[a - amin]
    p = sum(pk for pk in pmf if pk <= p_obs * (1.0 + _REL))
    p = min(p, 1.0)

    if a * d == 0:
        sample_or = 0.0
    elif b * c == 0:
        sample_or = inf
    else:
        sample_or = (a * d) / (b * c)

    z = K.norm_ppf(0.975)
    if min(cells) > 0:
        se = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d) ** 0.5
        ci = (exp(log(sample_or) - z * se), exp(log(sample_or) + z * se))
    else:
        # Haldane-Anscombe correction for the finite side only
        ah, bh, ch, dh = a + 0.5, b + 0.5, c + 0.5, d + 0.5
        or_h = (ah * dh) / (bh * ch)
        se_h = (1.0 / ah + 1.0 / bh + 1.0 / ch + 1.0 / dh) ** 0.5
        if sample_or == 0.0:
            ci = (0.0, exp(log(or_h) + z * se_h))
        else:
            ci = (exp(log(or_h) - z * se_h), inf)

    cmle = _cond_mle(amin, amax, a, logw0, ks)
    return FisherResult(p=p, odds_ratio=cmle, sample_or=sample_or,
                        sample_or_ci=ci, table=((a, b), (c, d)))
