"""Two-term large-``|z_1|`` expansion of the multinomial Mittag-Leffler function."""
from __future__ import annotations

import numpy as np
from scipy.special import rgamma

from ..errors import InvalidOrder, InvalidParams, SmallArgument
from .series import _check_shapes
from .types import EvalResult, Method, MLArguments, MLParams

DEFAULT_THRESHOLD = 10.0


def asymptotic_coefficients(params: MLParams, z_rest) -> tuple[float, float]:
    """Coefficients ``(c1, c2)`` with ``E ~ -c1/z_1 - c2/z_1**2``.

    ``z_rest`` are the arguments ``z_2..z_M``. 1/Gamma vanishes at the poles,
    so terms with a nonpositive-integer Gamma argument drop out.
    """
    b0 = params.beta0
    r1 = params.betas[0]
    c1 = float(rgamma(b0 - r1))
    c2 = float(rgamma(b0 - 2.0 * r1))
    for bj, zj in zip(params.betas[1:], z_rest):
        # the j-th first index is rho_1 - rho_j, so beta0 - rho_1 - rho_j
        rho_j = r1 - bj
        c2 -= zj * float(rgamma(b0 - r1 - rho_j))
    return c1, c2


def mlf_asymptotic(params: MLParams, args: MLArguments, p: int = 2,
                   threshold: float = DEFAULT_THRESHOLD) -> EvalResult:
    if p not in (1, 2):
        raise InvalidOrder(f"asymptotic depth must be 1 or 2, got {p}")
    _check_shapes(params, args)
    if any(b >= params.betas[0] for b in params.betas[1:]):
        raise InvalidParams("expansion needs betas[0] to dominate the other indices")
    z1 = args.z1
    if abs(z1) < threshold:
        raise SmallArgument(f"|z_1| = {abs(z1):g} below threshold {threshold:g}")
    c1, c2 = asymptotic_coefficients(params, args.z[1:])
    value = -c1 / z1
    if p == 2:
        value -= c2 / z1**2
    return EvalResult(float(value), Method.ASYMPTOTIC,
                      float(_error_scale(params, args, p) * abs(z1) ** -(p + 1)))


def _error_scale(params: MLParams, args: MLArguments, p: int) -> float:
    # Size of the first omitted coefficient. For M = 1 it is exactly
    # 1/Gamma(beta0 - (p+1) rho); extra arguments enter polynomially.
    r1 = params.betas[0]
    lead = abs(float(rgamma(params.beta0 - (p + 1) * r1)))
    spread = 1.0 + sum(abs(z) for z in args.z[1:])
    if len(args.z) == 1:
        return max(lead, 1e-300)
    return 4.0 * (lead + 1.0) * spread ** p


def relaxation_leading(rhos, weights, t):
    """Limit of ``lam t^rho_1 * omega(t; lam)`` as ``lam -> oo``.

    Equals ``sum_j q_j t^(rho_1 - rho_j) / Gamma(1 - rho_j)``.
    """
    r1 = rhos[0]
    t = np.asarray(t, float)
    return sum(q * t ** (r1 - r) * rgamma(1.0 - r) for r, q in zip(rhos, weights))
