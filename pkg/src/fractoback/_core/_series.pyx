# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled shell-by-shell summation of the multinomial Mittag-Leffler series."""

import numpy as np
cimport numpy as cnp
from libc.math cimport lgamma, log, exp, fabs, INFINITY

cnp.import_array()

DEF MAXM = 16


cdef int _sum_one(double beta0, const double[:] betas, const double[:] z,
                  double tol, long kmax, double cancel_limit,
                  const double[:] lfact, double* out) noexcept nogil:
    # out = [value, last_shell_max, max_term, shells, abs_sum]
    # status: 0 converged, 1 kmax exhausted, 2 aborted on cancel_limit
    cdef int c[MAXM]
    cdef double bet[MAXM]
    cdef double logz[MAXM]
    cdef int neg[MAXM]
    cdef int j, m = 0, h, t, sgn
    cdef long k
    cdef double s, comp = 0.0, y, tt, lt, term, shell_max, max_term, arg, asum
    for j in range(betas.shape[0]):
        if z[j] != 0.0:
            bet[m] = betas[j]
            logz[m] = log(fabs(z[j]))
            neg[m] = 1 if z[j] < 0 else 0
            m += 1
    term = exp(-lgamma(beta0))
    s = term
    asum = term
    max_term = term
    if m == 0:
        out[0] = s; out[1] = 0.0; out[2] = max_term; out[3] = 1; out[4] = asum
        return 0
    for k in range(1, kmax + 1):
        for j in range(m):
            c[j] = 0
        c[0] = k
        t = k
        h = 0
        shell_max = 0.0
        while True:
            arg = beta0
            lt = lfact[k]
            sgn = 0
            for j in range(m):
                arg = arg + bet[j] * c[j]
                lt = lt - lfact[c[j]] + c[j] * logz[j]
                if neg[j] and (c[j] & 1):
                    sgn = sgn ^ 1
            term = exp(lt - lgamma(arg))
            asum = asum + term
            if term > shell_max:
                shell_max = term
            if sgn:
                term = -term
            y = term - comp
            tt = s + y
            comp = (tt - s) - y
            s = tt
            if c[m - 1] == k:
                break
            # next composition of k into m parts
            if t > 1:
                h = 0
            h = h + 1
            t = c[h - 1]
            c[h - 1] = 0
            c[0] = t - 1
            c[h] = c[h] + 1
        if shell_max > max_term:
            max_term = shell_max
        out[0] = s; out[1] = shell_max; out[2] = max_term; out[3] = k + 1; out[4] = asum
        if max_term > cancel_limit:
            return 2
        if shell_max <= tol * fabs(s):
            return 0
    return 1


def _lfact(long kmax):
    return np.array([lgamma(i + 1.0) for i in range(kmax + 1)], dtype=np.float64)


def series_sum(double beta0, betas, z, double tol, long kmax,
               double cancel_limit=INFINITY):
    """Sum the series for a single argument vector.

    Returns ``(value, last_shell_max, max_term, abs_sum, shells, status)``;
    ``abs_sum`` is the sum of term magnitudes. Status is
    0 when converged, 1 when ``kmax`` shells were exhausted and 2 when the
    largest term exceeded ``cancel_limit``.
    """
    cdef double[:] b = np.ascontiguousarray(betas, dtype=np.float64)
    cdef double[:] zz = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[:] lf = _lfact(kmax)
    cdef double out[5]
    cdef int status
    if b.shape[0] > MAXM:
        raise ValueError("at most %d arguments supported" % MAXM)
    with nogil:
        status = _sum_one(beta0, b, zz, tol, kmax, cancel_limit, lf, out)
    return out[0], out[1], out[2], out[4], int(out[3]), status


def series_many(double beta0, betas, zrows, double tol, long kmax,
                double cancel_limit=INFINITY):
    """Row-wise :func:`series_sum` over a 2-D array of argument vectors."""
    cdef double[:] b = np.ascontiguousarray(betas, dtype=np.float64)
    cdef double[:, :] Z = np.ascontiguousarray(zrows, dtype=np.float64)
    cdef double[:] lf = _lfact(kmax)
    cdef Py_ssize_t n = Z.shape[0], i
    values = np.empty(n)
    last = np.empty(n)
    peak = np.empty(n)
    asums = np.empty(n)
    status = np.empty(n, dtype=np.intc)
    cdef double[:] v = values, l = last, p = peak, a = asums
    cdef int[:] st = status
    cdef double out[5]
    if b.shape[0] > MAXM:
        raise ValueError("at most %d arguments supported" % MAXM)
    with nogil:
        for i in range(n):
            st[i] = _sum_one(beta0, b, Z[i], tol, kmax, cancel_limit, lf, out)
            v[i] = out[0]
            l[i] = out[1]
            p[i] = out[2]
            a[i] = out[4]
    return values, last, peak, asums, status
