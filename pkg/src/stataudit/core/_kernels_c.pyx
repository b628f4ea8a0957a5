# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels: twin of _kernels_py with identical signatures.

Keep the two files in lockstep; the backend-agreement tests enforce it.
"""

from libc.math cimport erfc, exp, expm1, lgamma, log, log1p, sqrt, M_PI

cdef double _EPS = 1e-15
cdef double _FPMIN = 1e-300
cdef double _SQRT2 = 1.4142135623730951
cdef int _MAXIT_CF = 600
cdef int _MAXIT_SERIES = 2000


cpdef double lbeta(double a, double b):
    return lgamma(a) + lgamma(b) - lgamma(a + b)


cdef double _gamma_series(double a, double x):
    cdef double ap = a
    cdef double s = 1.0 / a
    cdef double term = s
    cdef int i
    for i in range(_MAXIT_SERIES):
        ap += 1.0
        term *= x / ap
        s += term
        if term < s * _EPS and term > -s * _EPS:
            break
    return s * exp(-x + a * log(x) - lgamma(a))


cdef double _gamma_contfrac(double a, double x):
    cdef double b = x + 1.0 - a
    cdef double c = 1.0 / _FPMIN
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double an, delta
    cdef int i
    for i in range(1, _MAXIT_CF):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if d < _FPMIN and d > -_FPMIN:
            d = _FPMIN
        c = b + an / c
        if c < _FPMIN and c > -_FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if delta - 1.0 < _EPS and delta - 1.0 > -_EPS:
            break
    return h * exp(-x + a * log(x) - lgamma(a))


cpdef double gammainc_p(double a, double x):
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_contfrac(a, x)


cpdef double gammainc_q(double a, double x):
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_contfrac(a, x)


cdef double _betacf(double a, double b, double x):
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if d < _FPMIN and d > -_FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT_CF):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if d < _FPMIN and d > -_FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if c < _FPMIN and c > -_FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if d < _FPMIN and d > -_FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if c < _FPMIN and c > -_FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if delta - 1.0 < _EPS and delta - 1.0 > -_EPS:
            break
    return h


cpdef double betainc(double a, double b, double x):
    cdef double lbt, bt
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lbt = a * log(x) + b * log1p(-x) - lbeta(a, b)
    bt = exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


cpdef double norm_cdf(double x):
    return 0.5 * erfc(-x / _SQRT2)


cpdef double t_cdf(double x, double df):
    cdef double w, ib
    if x == 0.0:
        return 0.5
    w = df / (df + x * x)
    ib = betainc(0.5 * df, 0.5, w)
    if x > 0.0:
        return 1.0 - 0.5 * ib
    return 0.5 * ib


cpdef double chi2_cdf(double x, double df):
    if x <= 0.0:
        return 0.0
    return gammainc_p(0.5 * df, 0.5 * x)


cpdef double f_cdf(double x, double df1, double df2):
    cdef double y
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    return betainc(0.5 * df1, 0.5 * df2, y)


cdef double _nct_body(double x, double df, double delta):
    cdef double y, lam_half, p, q, s, a, b, rxb, albeta
    cdef double xodd, godd, xeven, geven, acc
    cdef int it
    y = x * x / (x * x + df)
    if y <= 0.0:
        return norm_cdf(-delta)
    lam_half = 0.5 * delta * delta
    p = 0.5 * exp(-lam_half)
    q = sqrt(2.0 / M_PI) * p * delta
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


cpdef double nct_cdf(double x, double df, double delta):
    cdef double r, z
    if 0.5 * delta * delta > 700.0:
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


cpdef double nchi2_cdf(double x, double df, double lam):
    cdef double z, hl, logw, w0, c0, logt, t0, acc, wsum
    cdef double w, c, t, a
    cdef double a0
    cdef long j0, j
    cdef int it
    if x <= 0.0:
        return 0.0
    z = 0.5 * x
    hl = 0.5 * lam
    j0 = <long>hl
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


cpdef double ncf_cdf(double x, double df1, double df2, double lam):
    cdef double y, b, hl, logw, w0, i0, logg, g0, acc, wsum
    cdef double w, cur, g, a
    cdef double a0
    cdef long j0, j
    cdef int it
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    b = 0.5 * df2
    hl = 0.5 * lam
    j0 = <long>hl
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


cdef double[8] _A = [
    3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3]
cdef double[8] _B = [
    1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
    5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
    2.8729085735721942674e4, 5.2264952788528545610e3]
cdef double[8] _C = [
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4]
cdef double[8] _D = [
    1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1,
    1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9]
cdef double[8] _E = [
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7]
cdef double[8] _F = [
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4,
    1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15]


cdef double _poly(double* co, double r):
    cdef double v = co[7]
    cdef int i
    for i in range(6, -1, -1):
        v = v * r + co[i]
    return v


cpdef double norm_ppf(double p):
    cdef double q = p - 0.5
    cdef double r, v
    if -0.425 <= q <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = sqrt(-log(r))
    if r <= 5.0:
        r -= 1.6
        v = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        v = _poly(_E, r) / _poly(_F, r)
    return -v if q < 0.0 else v


def kendall_counts(double[:] x, double[:] y):
    """Concordant/discordant pair counts; ties count toward neither."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef long nc = 0, nd = 0
    cdef double xi, yi, prod
    for i in range(n):
        xi = x[i]
        yi = y[i]
        for j in range(i + 1, n):
            prod = (x[j] - xi) * (y[j] - yi)
            if prod > 0.0:
                nc += 1
            elif prod < 0.0:
                nd += 1
    return nc, nd
