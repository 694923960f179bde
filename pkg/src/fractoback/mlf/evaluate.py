"""Regime dispatch for the multinomial Mittag-Leffler function."""
from __future__ import annotations

import numpy as np

from ..errors import FractobackError, NoConvergence
from .asymptotic import asymptotic_coefficients, mlf_asymptotic
from .contour import invert_rows
from .series import _check_shapes, series_rows
from .types import DEFAULT_SETTINGS, EvalResult, Method, MLArguments, MLFSettings, MLParams


def mlf_eval(params: MLParams, args: MLArguments,
             settings: MLFSettings = DEFAULT_SETTINGS) -> EvalResult:
    """Evaluate ``E_{(betas), beta0}(z)`` choosing the method by regime.

    * every ``|z_j| <= series_radius``: power series, unless its terms grow
      past ``cancel_limit``;
    * ``|z_1| >= z_switch`` with a nonvanishing leading coefficient: the
      two-term expansion;
    * otherwise: contour inversion of the Laplace transform.
    """
    _check_shapes(params, args)
    z = np.asarray(args.z)
    if np.max(np.abs(z)) <= settings.series_radius:
        values, est = series_rows(params.beta0, params.betas, z[None, :],
                                  settings.series_tol, settings.kmax,
                                  settings.cancel_limit)
        if np.isfinite(values[0]):
            return EvalResult(float(values[0]), Method.SERIES, float(est[0]))
    if abs(args.z1) >= settings.z_switch:
        c1, _ = asymptotic_coefficients(params, args.z[1:])
        if c1 != 0.0:
            try:
                return mlf_asymptotic(params, args, p=2, threshold=settings.z_switch)
            except FractobackError as exc:  # pragma: no cover - excluded by the guard
                raise NoConvergence(f"internal dispatch error: {exc}") from exc
    values, est = invert_rows(params.beta0, params.betas, -z[None, :],
                              n=settings.contour_nodes)
    return EvalResult(float(values[0]), Method.CONTOUR, float(est[0]))


def eval_rows(beta0, betas, zrows, keep=None, settings: MLFSettings = DEFAULT_SETTINGS,
              series_radius=None):
    """Vectorised evaluation for kernels built on the function.

    Rows within ``series_radius`` go through the series; the rest, and
    series failures, through the contour. ``keep`` selects the numerator
    form of :func:`invert_rows` and disables the series path.
    """
    zrows = np.asarray(zrows, float)
    shape = zrows.shape[:-1]
    flat = zrows.reshape(-1, zrows.shape[-1])
    out = np.full(flat.shape[0], np.nan)
    radius = settings.series_radius if series_radius is None else series_radius
    small = np.max(np.abs(flat), axis=1) <= radius
    if keep is None and np.any(small):
        vals, _ = series_rows(beta0, betas, flat[small], settings.series_tol,
                              settings.kmax, settings.cancel_limit)
        out[small] = vals
    rest = ~np.isfinite(out)
    if np.any(rest):
        out[rest], _ = invert_rows(beta0, betas, -flat[rest], keep=keep,
                                   n=settings.contour_nodes)
    return out.reshape(shape)
