"""Multiprecision fixed-Talbot inversion used as an independent reference.

Nothing here touches the series or the double-precision contour: the
Laplace transforms are written out in their unscaled form and inverted
with mpmath on the Abate-Valko contour ``s = r theta (cot theta + i)``.
"""
from __future__ import annotations

import mpmath as mp
import numpy as np

from ..errors import ContourFailure, InvalidParams
from .series import _check_shapes
from .types import EvalResult, FractionalOrders, Method, MLArguments, MLParams

DEFAULT_NODES = 32


def talbot(F, t, nodes: int = DEFAULT_NODES, dps: int | None = None) -> float:
    """Invert the Laplace transform ``F`` at time ``t > 0``.

    ``F`` receives and returns mpmath numbers. The working precision
    defaults to ``nodes`` decimal digits, which leaves roughly ``0.6 * nodes``
    correct digits.
    """
    if not t > 0:
        raise InvalidParams("Talbot inversion needs t > 0")
    with mp.workdps(dps or nodes):
        t = mp.mpf(t)
        r = mp.mpf(2 * nodes) / (5 * t)
        total = mp.mpf("0.5") * mp.exp(r * t) * F(r)
        for k in range(1, nodes):
            theta = k * mp.pi / nodes
            cot = mp.cot(theta)
            s = r * theta * (cot + 1j)
            sigma = theta + (theta * cot - 1) * cot
            total += mp.re(mp.exp(t * s) * F(s) * (1 + 1j * sigma))
        value = float(r / nodes * total)
    if not np.isfinite(value):
        raise ContourFailure(f"Talbot inversion returned {value}")
    return value


def relaxation_oracle(orders: FractionalOrders, lam: float, t: float,
                      nodes: int = DEFAULT_NODES) -> float:
    """``omega(t; lam)`` from its transform
    ``sum_j q_j s^(rho_j - 1) / (sum_j q_j s^rho_j + lam)``."""
    if not t > 0:
        raise InvalidParams("oracle needs t > 0")
    rhos = [mp.mpf(r) for r in orders.rhos]
    qs = [mp.mpf(q) for q in orders.weights]
    lam_m = mp.mpf(lam)

    def F(s):
        num = sum(q * s ** (r - 1) for q, r in zip(qs, rhos))
        return num / (sum(q * s**r for q, r in zip(qs, rhos)) + lam_m)

    return talbot(F, t, nodes)


def propagator_oracle(orders: FractionalOrders, lam: float, xi: float,
                      nodes: int = DEFAULT_NODES) -> float:
    """Source kernel from its transform ``1 / (sum_j q_j s^rho_j + lam)``."""
    rhos = [mp.mpf(r) for r in orders.rhos]
    qs = [mp.mpf(q) for q in orders.weights]
    lam_m = mp.mpf(lam)
    return talbot(lambda s: 1 / (sum(q * s**r for q, r in zip(qs, rhos)) + lam_m),
                  xi, nodes)


def mlf_oracle(params: MLParams, args: MLArguments,
               nodes: int = DEFAULT_NODES) -> EvalResult:
    """``E_{(betas), beta0}(z)`` as the unit-time inverse of
    ``s^-beta0 / (1 - sum_j z_j s^-beta_j)``."""
    _check_shapes(params, args)
    b0 = mp.mpf(params.beta0)
    bs = [mp.mpf(b) for b in params.betas]
    zs = [mp.mpf(z) for z in args.z]

    def F(s):
        return s ** (-b0) / (1 - sum(z * s ** (-b) for z, b in zip(zs, bs)))

    value = talbot(F, 1.0, nodes)
    return EvalResult(value, Method.ORACLE, 10.0 ** (-0.6 * nodes) * (1 + abs(value)))

