"""Laplace inversion at unit time along a hyperbolic Hankel contour.

For ``z_j <= 0`` and first indices in (0, 1) the transform
``s^-beta0 / (1 + sum_j a_j s^-beta_j)`` (``a_j = -z_j``) is analytic off
the negative real axis: every ``s^-beta_j`` has an imaginary part of the
same sign in the open upper half plane, so the denominator cannot vanish.
The trapezoid rule on the hyperbola ``s(u) = mu (1 + sin(iu - alpha))``
therefore converges geometrically; parameters follow Weideman & Trefethen
(2007) for a single time.
"""
from __future__ import annotations

import functools

import numpy as np

from ..errors import ContourFailure

EPS = np.finfo(float).eps


@functools.lru_cache(maxsize=16)
def hyperbola(n: int):
    """Nodes and weights on the upper half of the contour (``u >= 0``).

    The lower half is the mirror image, so the inverse transform of a real
    function is ``sum(Im(w * F(s)))``. Cached arrays are read-only.
    """
    alpha, h, mu = 1.1721, 1.0818 / n, 4.4921 * n
    w = 1j * h * np.arange(n + 1) - alpha
    s = mu * (1.0 + np.sin(w))
    weights = np.exp(s) * (1j * mu * np.cos(w)) * h / np.pi
    weights[0] *= 0.5
    s.setflags(write=False)
    weights.setflags(write=False)
    return s, weights


def invert_rows(beta0, betas, a, keep=None, n: int = 14):
    """Invert ``s^-beta0 (1 + sum_j c_j a_j s^-beta_j) / (1 + sum_j a_j s^-beta_j)``.

    Parameters
    ----------
    beta0 : float
    betas : sequence of float, length M
    a : array (..., M)
        Nonnegative coefficients, one row per evaluation point.
    keep : sequence of {0, 1}, optional
        Selects the numerator terms ``c_j``; default all zero.
    n : int
        Half the number of trapezoid nodes for ``beta0 <= 1.2``. The
        transform grows like ``|s|^-beta0`` near the origin, so larger
        ``beta0`` gets 4 (and beyond 4, 8) extra nodes.

    Returns
    -------
    values, est_abs_error : arrays of shape ``a.shape[:-1]``
    """
    a = np.asarray(a, float)
    n += 4 * (beta0 > 1.2) + 4 * (beta0 > 4.0)
    s, w = hyperbola(n)
    powers = s[None, :] ** (-np.asarray(betas, float))[:, None]  # (M, K)
    den = 1.0 + a @ powers
    num = 1.0
    if keep is not None and any(keep):
        num = 1.0 + (a * np.asarray(keep, float)) @ powers
    terms = w * s ** (-beta0) * num / den
    values = terms.imag.sum(axis=-1)
    if not np.all(np.isfinite(values)):
        raise ContourFailure("non-finite value in contour inversion")
    est = 16.0 * EPS * np.abs(terms).sum(axis=-1) + 1e-13 * np.abs(values)
    return values, est
