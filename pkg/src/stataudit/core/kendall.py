"""Kendall tau-b rank correlation with tie-corrected normal p-value."""

from math import sqrt

import numpy as np

from ..errors import InsufficientDataError, UndefinedCorrelationError
from ._backend import kernels as K
from .dists import two_tailed_p


def _tie_sums(values):
    # sizes of tie groups -> the three tie aggregates the variance needs
    _, counts = np.unique(values, return_counts=True)
    t = counts[counts > 1].astype(float)
    s1 = float(np.sum(t * (t - 1.0)))                    # sum t(t-1)
    s2 = float(np.sum(t * (t - 1.0) * (t - 2.0)))        # sum t(t-1)(t-2)
    s3 = float(np.sum(t * (t - 1.0) * (2.0 * t + 5.0)))  # sum t(t-1)(2t+5)
    return s1, s2, s3


def kendall_tau_b(x, y):
    """Tau-b with tie correction and a two-tailed normal-approximation p.

    Raises UndefinedCorrelationError when either vector is all ties.
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InsufficientDataError("x and y must be equal-length 1-d sequences")
    n = xs.size
    if n < 2:
        raise InsufficientDataError("need at least 2 observations")

    nc, nd = K.kendall_counts(xs, ys)
    s = float(nc - nd)

    n0 = 0.5 * n * (n - 1.0)
    tx1, tx2, tx3 = _tie_sums(xs)
    ty1, ty2, ty3 = _tie_sums(ys)
    n1 = 0.5 * tx1
    n2 = 0.5 * ty1
    denom2 = (n0 - n1) * (n0 - n2)
    if denom2 <= 0.0:
        raise UndefinedCorrelationError("correlation undefined: all ties in one vector")
    tau = s / sqrt(denom2)
    tau = max(-1.0, min(1.0, tau))

    # Kendall (1970) tie-adjusted variance of S
    v0 = n * (n - 1.0) * (2.0 * n + 5.0)
    var_s = (v0 - tx3 - ty3) / 18.0
    var_s += tx1 * ty1 / (2.0 * n * (n - 1.0))
    if n > 2:
        var_s += tx2 * ty2 / (9.0 * n * (n - 1.0) * (n - 2.0))
    if var_s <= 0.0:
        return tau, 1.0
    z = s / sqrt(var_s)
    return tau, two_tailed_p(z)
