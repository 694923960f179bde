"""Relaxation and source kernels of the multi-term equation.

For one eigenvalue ``lam`` the homogeneous solution is
``omega(t) = 1 - lam t^rho_1 E_{rho', rho_1 + 1}(-lam t^rho_1, *)`` and the
source enters through ``xi^(rho_1 - 1) E_{rho', rho_1}(-lam xi^rho_1, *)``,
with ``*`` standing for ``-q_j t^(rho_1 - rho_j)``, j >= 2.
"""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParams
from .contour import invert_rows
from .evaluate import eval_rows
from .series import series_rows
from .types import DEFAULT_SETTINGS, FractionalOrders, MLFSettings

# Kernels are evaluated on large batches; beyond this radius the contour
# is both cheaper and as accurate as the series.
KERNEL_SERIES_RADIUS = 0.1


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def relaxation(orders: FractionalOrders, lam, t,
               settings: MLFSettings = DEFAULT_SETTINGS):
    """Homogeneous mode factor ``omega(t; lam)``, with ``omega(0) = 1`` exactly.

    Small arguments use the series for ``E_{rho', rho_1 + 1}``. Elsewhere the
    function is inverted directly from
    ``s^-1 (1 + sum_{j>=2} a_j s^-beta_j) / (1 + sum_j a_j s^-beta_j)``,
    which never forms ``1 - (nearly 1)`` and keeps full relative accuracy
    as ``lam t^rho_1`` grows.
    """
    lam_a, t_a = np.broadcast_arrays(np.asarray(lam, float), np.asarray(t, float))
    if np.any(~(lam_a > 0)) or np.any(~np.isfinite(lam_a)):
        raise InvalidParams("eigenvalues must be positive and finite")
    if np.any(~(t_a >= 0)) or np.any(~np.isfinite(t_a)):
        raise InvalidParams("times must be nonnegative and finite")
    out = np.ones(lam_a.shape)
    pos = t_a > 0
    if np.any(pos):
        Z = orders.scaled_arguments(lam_a[pos], t_a[pos])
        vals = np.full(Z.shape[0], np.nan)
        small = np.max(np.abs(Z), axis=1) <= KERNEL_SERIES_RADIUS
        if np.any(small):
            E, _ = series_rows(orders.rho1 + 1.0, orders.shifted, Z[small],
                               settings.series_tol, settings.kmax,
                               settings.cancel_limit)
            vals[small] = 1.0 + Z[small, 0] * E
        rest = ~np.isfinite(vals)
        if np.any(rest):
            keep = (0,) + (1,) * (orders.M - 1)
            vals[rest], _ = invert_rows(1.0, orders.shifted, -Z[rest], keep=keep,
                                        n=settings.contour_nodes)
        out[pos] = vals
    return _scalar_or_array(out, lam_a)


def kernel_in_s(orders: FractionalOrders, lam, s,
                settings: MLFSettings = DEFAULT_SETTINGS):
    """``E_{rho', rho_1}(-lam s, -q_j s^((rho_1 - rho_j)/rho_1))`` for ``s >= 0``.

    This is the source kernel after the substitution ``s = xi^rho_1``, which
    absorbs the weak singularity: ``xi^(rho_1-1) dxi = ds / rho_1``.
    """
    lam_a, s_a = np.broadcast_arrays(np.asarray(lam, float), np.asarray(s, float))
    xi = s_a ** (1.0 / orders.rho1)
    Z = orders.scaled_arguments(lam_a, xi)
    vals = eval_rows(orders.rho1, orders.shifted, Z, settings=settings,
                     series_radius=KERNEL_SERIES_RADIUS)
    return _scalar_or_array(vals, lam_a)


def propagator(orders: FractionalOrders, lam, xi,
               settings: MLFSettings = DEFAULT_SETTINGS):
    """Source kernel ``xi^(rho_1 - 1) E_{rho', rho_1}(-lam xi^rho_1, *)``, ``xi > 0``."""
    lam_a, xi_a = np.broadcast_arrays(np.asarray(lam, float), np.asarray(xi, float))
    if np.any(~(lam_a > 0)):
        raise InvalidParams("eigenvalues must be positive")
    if np.any(~(xi_a > 0)) or np.any(~np.isfinite(xi_a)):
        raise InvalidParams("the source kernel is singular at xi = 0; need xi > 0")
    Z = orders.scaled_arguments(lam_a, xi_a)
    vals = eval_rows(orders.rho1, orders.shifted, Z, settings=settings,
                     series_radius=KERNEL_SERIES_RADIUS)
    return _scalar_or_array(xi_a ** (orders.rho1 - 1.0) * vals, lam_a)
