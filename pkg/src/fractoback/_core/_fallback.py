"""Pure-Python versions of the compiled kernels.

Same signatures and return conventions as ``_series.pyx`` and ``_l1.pyx``.
"""
import math

import numpy as np


def _compositions(k, m):
    c = [0] * m
    c[0] = k
    t, h = k, 0
    while True:
        yield c
        if c[m - 1] == k:
            return
        if t > 1:
            h = 0
        h += 1
        t = c[h - 1]
        c[h - 1] = 0
        c[0] = t - 1
        c[h] += 1


def series_sum(beta0, betas, z, tol, kmax, cancel_limit=math.inf):
    active = [(b, zj) for b, zj in zip(betas, z) if zj != 0.0]
    term = math.exp(-math.lgamma(beta0))
    s, comp, max_term, asum = term, 0.0, term, term
    if not active:
        return s, 0.0, max_term, asum, 1, 0
    bet = [b for b, _ in active]
    logz = [math.log(abs(zj)) for _, zj in active]
    neg = [zj < 0 for _, zj in active]
    m = len(active)
    lfact = [math.lgamma(i + 1.0) for i in range(kmax + 1)]
    shell_max = 0.0
    for k in range(1, kmax + 1):
        shell_max = 0.0
        for c in _compositions(k, m):
            arg = beta0
            lt = lfact[k]
            sgn = False
            for j in range(m):
                cj = c[j]
                arg += bet[j] * cj
                lt += cj * logz[j] - lfact[cj]
                if neg[j] and cj & 1:
                    sgn = not sgn
            term = math.exp(lt - math.lgamma(arg))
            asum += term
            if term > shell_max:
                shell_max = term
            if sgn:
                term = -term
            y = term - comp
            tt = s + y
            comp = (tt - s) - y
            s = tt
        max_term = max(max_term, shell_max)
        if max_term > cancel_limit:
            return s, shell_max, max_term, asum, k + 1, 2
        if shell_max <= tol * abs(s):
            return s, shell_max, max_term, asum, k + 1, 0
    return s, shell_max, max_term, asum, kmax + 1, 1


def series_many(beta0, betas, zrows, tol, kmax, cancel_limit=math.inf):
    zrows = np.atleast_2d(np.asarray(zrows, dtype=float))
    n = zrows.shape[0]
    values, last, peak, asums = (np.empty(n) for _ in range(4))
    status = np.empty(n, dtype=np.intc)
    for i in range(n):
        values[i], last[i], peak[i], asums[i], _, status[i] = series_sum(
            beta0, betas, zrows[i], tol, kmax, cancel_limit
        )
    return values, last, peak, asums, status


def l1_history(samples, rho):
    y = np.asarray(samples, dtype=float)
    n = y.shape[0] - 1
    i = np.arange(n, dtype=float)
    b = (i + 1.0) ** (1.0 - rho) - i ** (1.0 - rho)
    d = np.diff(y, axis=0)
    out = np.zeros((n,) + y.shape[1:])
    for lag in range(n):
        out[lag:] += b[lag] * d[: n - lag]
    return out
