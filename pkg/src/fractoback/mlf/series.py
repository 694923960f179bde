"""Power-series evaluation of the multinomial Mittag-Leffler function."""
from __future__ import annotations

import numpy as np

from .. import _core
from ..errors import NoConvergence, InvalidParams
from .types import EvalResult, Method, MLArguments, MLParams

EPS = np.finfo(float).eps
# each term carries a few ulps from exp/lgamma on top of the summation error
ROUNDING = 32 * EPS


def _check_shapes(params: MLParams, args: MLArguments):
    if len(params.betas) != len(args.z):
        raise InvalidParams(
            f"{len(params.betas)} first indices but {len(args.z)} arguments"
        )


def mlf_series(params: MLParams, args: MLArguments, tol: float = 1e-14,
               kmax: int = 400) -> EvalResult:
    """Sum the defining series shell by shell in total degree.

    Shell ``k`` collects every composition ``k_1 + ... + k_M = k``. Summation
    stops at the first shell whose largest term is below ``tol`` times the
    partial sum. The error estimate adds the last shell to the rounding
    error implied by the largest term met, which is what matters for
    alternating sums at moderate ``|z|``.

    Raises
    ------
    NoConvergence
        If ``kmax`` shells are not enough.
    """
    _check_shapes(params, args)
    if not tol > 0:
        raise InvalidParams("tol must be positive")
    if kmax < 1:
        raise InvalidParams("kmax must be >= 1")
    value, last, peak, asum, shells, status = _core.series_sum(
        params.beta0, params.betas, args.z, tol, kmax
    )
    if status != 0 or not np.isfinite(value):
        raise NoConvergence(
            f"series not converged after {kmax} shells "
            f"(last shell max {last:.3e}, largest term {peak:.3e})"
        )
    est = last + ROUNDING * asum
    return EvalResult(float(value), Method.SERIES, float(est),
                      {"shells": shells, "max_term": float(peak), "abs_sum": float(asum)})


def series_rows(beta0, betas, zrows, tol, kmax, cancel_limit):
    """Vectorised series over rows of ``zrows``; failed rows come back NaN."""
    values, last, _, asum, status = _core.series_many(
        beta0, np.asarray(betas, float), zrows, tol, kmax, cancel_limit
    )
    values = np.where(status == 0, values, np.nan)
    return values, last + ROUNDING * asum
