"""Distribution CDFs and quantiles behind a single DistSpec front door.

Central families invert their CDFs with a safeguarded Newton iteration
(analytic densities, bisection fallback when a step leaves the bracket);
noncentral families use plain bracketed bisection, which is what guarantees
the quantile contract there.
"""

from dataclasses import dataclass
from math import exp, inf, isfinite, lgamma, log, log1p, pi, sqrt
from typing import Optional

from ..errors import DomainError
from ._backend import kernels as K

_FAMILIES = ("normal", "t", "chi2", "f")


@dataclass(frozen=True)
class DistSpec:
    """A distribution family with degrees of freedom and noncentrality.

    ncp = 0 denotes the central distribution. For the normal family the ncp
    acts as a location shift (the limiting case the Z power model uses).
    """

    family: str
    df1: Optional[float] = None
    df2: Optional[float] = None
    ncp: float = 0.0

    def validate(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if self.family == "normal":
            if self.df1 is not None or self.df2 is not None:
                raise DomainError("normal takes no degrees of freedom")
        else:
            if self.df1 is None or not (isfinite(self.df1) and self.df1 > 0):
                raise DomainError(f"{self.family} requires df1 > 0")
            if self.family == "f":
                if self.df2 is None or not (isfinite(self.df2) and self.df2 > 0):
                    raise DomainError("f requires df2 > 0")
            elif self.df2 is not None:
                raise DomainError(f"{self.family} takes no df2")
        if not (isfinite(self.ncp) and self.ncp >= 0.0):
            raise DomainError("ncp must be finite and >= 0")


def cdf(spec: DistSpec, x: float) -> float:
    """P[X <= x] for the distribution described by spec."""
    spec.validate()
    if spec.family == "normal":
        return K.norm_cdf(x - spec.ncp)
    if spec.family == "t":
        if spec.ncp == 0.0:
            return K.t_cdf(x, spec.df1)
        return K.nct_cdf(x, spec.df1, spec.ncp)
    if spec.family == "chi2":
        if spec.ncp == 0.0:
            return K.chi2_cdf(x, spec.df1)
        return K.nchi2_cdf(x, spec.df1, spec.ncp)
    if spec.ncp == 0.0:
        return K.f_cdf(x, spec.df1, spec.df2)
    return K.ncf_cdf(x, spec.df1, spec.df2, spec.ncp)


def _norm_pdf(x):
    return exp(-0.5 * x * x) / sqrt(2.0 * pi)


def _t_pdf(x, v):
    return exp(
        lgamma(0.5 * (v + 1.0)) - lgamma(0.5 * v)
        - 0.5 * log(v * pi)
        - 0.5 * (v + 1.0) * log1p(x * x / v)
    )


def _chi2_pdf(x, k):
    if x <= 0.0:
        return 0.0
    return exp(-0.5 * x + (0.5 * k - 1.0) * log(x) - lgamma(0.5 * k) - 0.5 * k * log(2.0))


def _f_pdf(x, d1, d2):
    if x <= 0.0:
        return 0.0
    num = 0.5 * (d1 * log(d1 * x) + d2 * log(d2) - (d1 + d2) * log(d1 * x + d2))
    return exp(num - log(x) - K.lbeta(0.5 * d1, 0.5 * d2))


def _invert_newton(cdffn, pdffn, p, x0, lower):
    """Invert cdffn at p. lower is the support infimum (None = unbounded)."""
    # establish a bracket [a, b] with cdffn(a) <= p <= cdffn(b)
    x = x0
    if lower is not None and x <= lower:
        x = lower + 1.0
    fx = cdffn(x)
    step = 1.0 + 0.5 * abs(x)
    a = b = x
    fa = fb = fx
    it = 0
    while fb < p and it < 300:
        a, fa = b, fb
        b += step
        step *= 2.0
        fb = cdffn(b)
        it += 1
    step = 1.0 + 0.5 * abs(x)
    it = 0
    while fa > p and it < 300:
        b, fb = a, fa
        if lower is not None:
            a = lower + (a - lower) * 0.25
        else:
            a -= step
            step *= 2.0
        fa = cdffn(a)
        it += 1

    x = 0.5 * (a + b)
    for _ in range(200):
        f = cdffn(x) - p
        if f > 0.0:
            b = x
        else:
            a = x
        if abs(f) < 1e-11:
            break
        g = pdffn(x)
        if g > 1e-300:
            xn = x - f / g
        else:
            xn = 0.5 * (a + b)
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) < 1e-14 * (1.0 + abs(x)):
            x = xn
            break
        x = xn
    return x


def _invert_bisect(cdffn, p, x0, lower):
    """Pure bisection after bracket expansion; used for noncentral families."""
    x = x0
    if lower is not None and x <= lower:
        x = lower + 1.0
    a = b = x
    fa = fb = cdffn(x)
    step = 1.0 + 0.5 * abs(x)
    it = 0
    while fb < p and it < 300:
        a, fa = b, fb
        b += step
        step *= 2.0
        fb = cdffn(b)
        it += 1
    step = 1.0 + 0.5 * abs(x)
    it = 0
    while fa > p and it < 300:
        b, fb = a, fa
        if lower is not None:
            a = lower + (a - lower) * 0.25
        else:
            a -= step
            step *= 2.0
        fa = cdffn(a)
        it += 1
    for _ in range(300):
        m = 0.5 * (a + b)
        fm = cdffn(m)
        if abs(fm - p) < 1e-12:
            return m
        if fm < p:
            a = m
        else:
            b = m
        if b - a < 1e-13 * (1.0 + abs(m)):
            break
    return 0.5 * (a + b)


def quantile(spec: DistSpec, p: float) -> float:
    """Inverse CDF; requires 0 < p < 1."""
    spec.validate()
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile requires 0 < p < 1, got {p}")
    if spec.family == "normal":
        return K.norm_ppf(p) + spec.ncp
    z = K.norm_ppf(p)
    if spec.family == "t":
        v = spec.df1
        if spec.ncp == 0.0:
            x0 = z * sqrt(v / (v - 2.0)) if v > 2.0 else z
            return _invert_newton(lambda x: K.t_cdf(x, v), lambda x: _t_pdf(x, v), p, x0, None)
        x0 = spec.ncp + z
        return _invert_bisect(lambda x: K.nct_cdf(x, v, spec.ncp), p, x0, None)
    if spec.family == "chi2":
        k = spec.df1
        if spec.ncp == 0.0:
            # Wilson-Hilferty starting point
            h = 1.0 - 2.0 / (9.0 * k) + z * sqrt(2.0 / (9.0 * k))
            x0 = k * h * h * h
            if x0 <= 0.0:
                x0 = 0.5
            return _invert_newton(lambda x: K.chi2_cdf(x, k), lambda x: _chi2_pdf(x, k), p, x0, 0.0)
        lam = spec.ncp
        x0 = max(k + lam + z * sqrt(2.0 * (k + 2.0 * lam)), 0.5)
        return _invert_bisect(lambda x: K.nchi2_cdf(x, k, lam), p, x0, 0.0)
    d1, d2 = spec.df1, spec.df2
    if spec.ncp == 0.0:
        x0 = d2 / (d2 - 2.0) if d2 > 2.0 else 1.0
        return _invert_newton(
            lambda x: K.f_cdf(x, d1, d2), lambda x: _f_pdf(x, d1, d2), p, x0, 0.0
        )
    lam = spec.ncp
    x0 = (1.0 + lam / d1) * (d2 / (d2 - 2.0) if d2 > 2.0 else 1.0)
    return _invert_bisect(lambda x: K.ncf_cdf(x, d1, d2, lam), p, x0, 0.0)


def two_tailed_p(z: float) -> float:
    """2 * (1 - Phi(|z|)) without cancellation for large |z|."""
    p = 2.0 * K.norm_cdf(-abs(z))
    return p if p <= 1.0 else 1.0
