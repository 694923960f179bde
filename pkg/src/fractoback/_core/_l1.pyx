# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled L1 history sums for the Caputo derivative on a uniform grid."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()


def l1_history(samples, double rho):
    """Return ``S[m-1, :] = sum_i b_i (y[m-i] - y[m-i-1])`` for m = 1..n.

    ``samples`` has shape ``(n + 1, ncol)``; ``b_i = (i+1)^(1-rho) - i^(1-rho)``.
    """
    cdef double[:, :] y = np.ascontiguousarray(samples, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0] - 1, ncol = y.shape[1]
    cdef Py_ssize_t m, i, c
    cdef double acc
    out = np.zeros((n, ncol))
    cdef double[:, :] S = out
    b_arr = np.empty(n)
    cdef double[:] b = b_arr
    for i in range(n):
        b[i] = pow(i + 1.0, 1.0 - rho) - pow(<double>i, 1.0 - rho)
    with nogil:
        for c in range(ncol):
            for m in range(1, n + 1):
                acc = 0.0
                for i in range(m):
                    acc = acc + b[i] * (y[m - i, c] - y[m - i - 1, c])
                S[m - 1, c] = acc
    return out
