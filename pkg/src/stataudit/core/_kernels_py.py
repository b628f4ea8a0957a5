"""Pure-Python scalar kernels: special functions and distribution CDFs.

This is the fallback backend; stataudit.core._kernels_c is the compiled twin
with identical signatures and semantics. Everything here is implemented from
scratch on top of math.lgamma/erfc so the package carries its own numerics.

All functions are pure and thread-safe. Domain checks live in the wrappers
(stataudit.core.dists); kernels assume arguments are already sane except where
noted.
"""

from math import erfc, exp, expm1, lgamma, log, log1p, pi, sqrt

_EPS = 1e-15
_FPMIN = 1e-300
_SQRT2 = sqrt(2.0)
_MAXIT_CF = 600
_MAXIT_SERIES = 2000


def lbeta(a, b):
    return lgamma(a) + lgamma(b) - lgamma(a + b)


def _gamma_series(a, x):
    # Lower regularized gamma by series; requires x < a + 1.
    ap = a
    s = 1.0 / a
    term = s
    for _ in range(_MAXIT_SERIES):
        ap += 1.0
        term *= x / ap
        s += term
        if abs(term) < abs(s) * _EPS:
            break
    return s * exp(-x + a * log(x) - lgamma(a))


def _gamma_contfrac(a, x):
    # Upper regularized gamma by Lentz continued fraction; requires x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT_CF):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * exp(-x + a * log(x) - lgamma(a))


def gammainc_p(a, x):
    """Regularized lower incomplete gamma P(a, x), a > 0, x >= 0."""
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_contfrac(a, x)


def gammainc_q(a, x):
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_contfrac(a, x)


def _betacf(a, b, x):
    # Continued fraction for the incomplete beta (Lentz).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT_CF):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def betainc(a, b, x):
    """Regularized incomplete beta I_x(a, b), a,b > 0, 0 <= x <= 1."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lbt = a * log(x) + b * log1p(-x) - lbeta(a, b)
    bt = exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def norm_cdf(x):
    return 0.5 * erfc(-x / _SQRT2)


def t_cdf(x, df):
    if x == 0.0:
        return 0.5
    w = df / (df + x * x)
    ib = betainc(0.5 * df, 0.5, w)
    if x > 0.0:
        return 1.0 - 0.5 * ib
    return 0.5 * ib


def chi2_cdf(x, df):
    if x <= 0.0:
        return 0.0
    return gammainc_p(0.5 * df, 0.5 * x)


def f_cdf(x, df1, df2):
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    return betainc(0.5 * df1, 0.5 * df2, y)


def _nct_body(x, df, delta):
    # Lenth's twin series for P(T <= x; df, delta), x >= 0 required.
    y = x * x / (x * x + df)
    if y <= 0.0:
        return norm_cdf(-delta)
    lam_half = 0.5 * delta * delta
    p = 0.5 * exp(-lam_half)
    q = sqrt(2.0 / pi) * p * delta
    s = 0.5 - p
    if s < 1e-7:
        s = -0.5 * expm1(-lam_half)
    a = 0.5
    b = 0.5 * df
    rxb = exp(b * log1p(-y))
    albeta = lbeta(a, b)
    xodd = betainc(a, b, y)
    godd = 2.0 * rxb * exp(a * log(y) - albeta)
    xeven = 1.0 - rxb
    geven = b * y * rxb
    acc = p * xodd + q * xeven
    it = 1
    while it <= 1000:
        a += 1.0
        xodd -= godd
        xeven -= geven
        godd *= y * (a + b - 1.0) / a
        geven *= y * (a + b - 0.5) / (a + 0.5)
        p *= lam_half / it
        q *= lam_half / (it + 0.5)
        s -= p
        acc += p * xodd + q * xeven
        if s <= 0.0:
            break
        if 2.0 * s * (xodd - godd) < 1e-12:
            break
        it += 1
    return acc + norm_cdf(-delta)


def nct_cdf(x, df, delta):
    """Noncentral t CDF. delta = 0 reduces to the central t exactly."""
    if 0.5 * delta * delta > 700.0:
        # exp(-delta^2/2) underflows; answers out here saturate at 0/1, the
        # A&S 26.7.10 normal approximation is more than adequate.
        z = (x * (1.0 - 0.25 / df) - delta) / sqrt(1.0 + x * x / (2.0 * df))
        return norm_cdf(z)
    if x < 0.0:
        r = 1.0 - _nct_body(-x, df, -delta)
    else:
        r = _nct_body(x, df, delta)
    if r < 0.0:
        return 0.0
    if r > 1.0:
        return 1.0
    return r


def nchi2_cdf(x, df, lam):
    """Noncentral chi-square CDF via the Poisson mixture, expanded outward
    from the modal index so large lam never underflows."""
    if x <= 0.0:
        return 0.0
    z = 0.5 * x
    hl = 0.5 * lam
    j0 = int(hl)
    a0 = 0.5 * df + j0
    if hl > 0.0:
        logw = -hl + j0 * log(hl) - lgamma(j0 + 1.0)
    else:
        logw = 0.0
    w0 = exp(logw)
    c0 = gammainc_p(a0, z)
    logt = a0 * log(z) - z - lgamma(a0 + 1.0)
    t0 = exp(logt)
    acc = w0 * c0
    wsum = w0

    # downward from the mode: C_{j-1} = C_j + T_{j-1}, T_{j-1} = T_j * a_j / z
    w = w0
    c = c0
    t = t0
    a = a0
    j = j0
    while j > 0:
        t *= a / z
        a -= 1.0
        c += t
        w *= j / hl
        j -= 1
        if c > 1.0:
            c = 1.0
        acc += w * c
        wsum += w
        if w < 1e-18:
            break

    # upward: C_{j+1} = C_j - T_j, then advance T
    w = w0
    c = c0
    t = t0
    a = a0
    j = j0
    it = 0
    while 1.0 - wsum > 1e-12 and it < 100000:
        c -= t
        if c < 0.0:
            c = 0.0
        t *= z / (a + 1.0)
        a += 1.0
        w *= hl / (j + 1)
        j += 1
        acc += w * c
        wsum += w
        it += 1
    if acc > 1.0:
        return 1.0
    if acc < 0.0:
        return 0.0
    return acc


def ncf_cdf(x, df1, df2, lam):
    """Noncentral F CDF: Poisson mixture over incomplete betas, outward from
    the modal weight, I-term recurrences in both directions."""
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    b = 0.5 * df2
    hl = 0.5 * lam
    j0 = int(hl)
    a0 = 0.5 * df1 + j0
    if hl > 0.0:
        logw = -hl + j0 * log(hl) - lgamma(j0 + 1.0)
    else:
        logw = 0.0
    w0 = exp(logw)
    i0 = betainc(a0, b, y)
    logg = a0 * log(y) + b * log1p(-y) - log(a0) - lbeta(a0, b)
    g0 = exp(logg)
    acc = w0 * i0
    wsum = w0

    # downward: I_{a-1} = I_a + g(a-1, b); g(a-1) = g(a) * a / (y * (a+b-1))
    w = w0
    cur = i0
    g = g0
    a = a0
    j = j0
    while j > 0:
        g *= a / (y * (a + b - 1.0))
        a -= 1.0
        cur += g
        if cur > 1.0:
            cur = 1.0
        w *= j / hl
        j -= 1
        acc += w * cur
        wsum += w
        if w < 1e-18:
            break

    # upward: I_{a+1} = I_a - g(a, b); g(a+1) = g(a) * y * (a+b) / (a+1)
    w = w0
    cur = i0
    g = g0
    a = a0
    j = j0
    it = 0
    while 1.0 - wsum > 1e-12 and it < 100000:
        cur -= g
        if cur < 0.0:
            cur = 0.0
        g *= y * (a + b) / (a + 1.0)
        a += 1.0
        w *= hl / (j + 1)
        j += 1
        acc += w * cur
        wsum += w
        it += 1
    if acc > 1.0:
        return 1.0
    if acc < 0.0:
        return 0.0
    return acc


# Wichura's AS 241 (PPND16) rational approximations for the normal quantile.
_PPND_A = (
    3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3,
)
_PPND_B = (
    1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
    5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
    2.8729085735721942674e4, 5.2264952788528545610e3,
)
_PPND_C = (
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4,
)
_PPND_D = (
    1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1,
    1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_PPND_E = (
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7,
)
_PPND_F = (
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4,
    1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs, r):
    v = coeffs[7]
    for i in range(6, -1, -1):
        v = v * r + coeffs[i]
    return v


def norm_ppf(p):
    """Normal quantile, AS 241 accuracy (~1e-16 relative); 0 < p < 1."""
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PPND_A, r) / _poly(_PPND_B, r)
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = sqrt(-log(r))
    if r <= 5.0:
        r -= 1.6
        v = _poly(_PPND_C, r) / _poly(_PPND_D, r)
    else:
        r -= 5.0
        v = _poly(_PPND_E, r) / _poly(_PPND_F, r)
    return -v if q < 0.0 else v


def kendall_counts(x, y):
    """Concordant/discordant pair counts for sequences of equal length.

    Returns (nc, nd); ties in either coordinate count toward neither.
    """
    n = len(x)
    nc = 0
    nd = 0
    for i in range(n):
        xi = x[i]
        yi = y[i]
        for j in range(i + 1, n):
            dx = x[j] - xi
            dy = y[j] - yi
            prod = dx * dy
            if prod > 0.0:
                nc += 1
            elif prod < 0.0:
                nd += 1
    return nc, nd
