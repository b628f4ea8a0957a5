"""Huber robust simple linear regression by iteratively reweighted least
squares. Scale is re-estimated every iteration from the median absolute
residual; tuning -> inf recovers ordinary least squares exactly."""

from dataclasses import dataclass
from math import inf, sqrt

import numpy as np

from ..errors import DegenerateDataError, InsufficientDataError

# MAD consistency factor for the normal
_MAD_C = 0.6745


@dataclass(frozen=True)
class RobustFit:
    intercept: float
    slope: float
    intercept_se: float
    slope_se: float
    residual_scale: float
    iterations: int
    converged: bool


def _weighted_line(x, y, w):
    sw = float(np.sum(w))
    swx = float(np.sum(w * x))
    swxx = float(np.sum(w * x * x))
    swy = float(np.sum(w * y))
    swxy = float(np.sum(w * x * y))
    det = sw * swxx - swx * swx
    if det <= 0.0:
        return None
    slope = (sw * swxy - swx * swy) / det
    intercept = (swy - slope * swx) / sw
    return intercept, slope, sw, swx, swxx, det


def huber_iwls(x, y, tuning=1.345, tol=1e-8, max_iter=50) -> RobustFit:
    """Fit y = a + b*x with Huber weights w = min(1, k*s/|r|).

    Returns a RobustFit; non-convergence is reported through converged=False
    rather than raised, so the caller decides.
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InsufficientDataError("x and y must be equal-length 1-d sequences")
    n = xs.size
    if n < 3:
        raise InsufficientDataError("need at least 3 observations")
    if float(np.ptp(xs)) == 0.0:
        raise DegenerateDataError("x is constant")

    w = np.ones(n)
    sol = _weighted_line(xs, ys, w)
    if sol is None:
        raise DegenerateDataError("singular design")
    a, b = sol[0], sol[1]

    scale = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        r = ys - a - b * xs
        scale = float(np.median(np.abs(r))) / _MAD_C
        if scale == 0.0:
            # at least half the points lie exactly on the line
            converged = True
            break
        cut = tuning * scale
        absr = np.abs(r)
        w = np.where(absr <= cut, 1.0, np.where(absr > 0, cut / np.maximum(absr, 1e-300), 1.0))
        sol = _weighted_line(xs, ys, w)
        if sol is None:
            break
        a_new, b_new = sol[0], sol[1]
        if max(abs(a_new - a), abs(b_new - b)) < tol:
            a, b = a_new, b_new
            converged = True
            break
        a, b = a_new, b_new

    # covariance from the final weighted solve
    sol = _weighted_line(xs, ys, w)
    if sol is None:
        return RobustFit(a, b, inf, inf, max(scale, 0.0), it, False)
    a_f, b_f, sw, swx, swxx, det = sol
    r = ys - a_f - b_f * xs
    dof = max(n - 2, 1)
    sigma2 = float(np.sum(w * r * r)) / dof
    se_a = sqrt(max(sigma2 * swxx / det, 0.0))
    se_b = sqrt(max(sigma2 * sw / det, 0.0))
    return RobustFit(intercept=a_f, slope=b_f, intercept_se=se_a, slope_se=se_b,
                     residual_scale=max(scale, 0.0), iterations=it,
                     converged=converged)
