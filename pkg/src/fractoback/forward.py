"""Forward problem: spectral solution from the initial state and the source.

Mode by mode,

    u_k(t) = phi_k omega(t; lam_k) + int_0^t f_k(t - xi) P(xi; lam_k) dxi,

with ``omega`` the relaxation function and ``P`` the weakly singular source
kernel from :mod:`fractoback.mlf`.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, QuadratureFailure
from .mlf import DEFAULT_SETTINGS, FractionalOrders, MLFSettings, kernel_in_s, relaxation
from .report import EvalReport, Table
from .sources import SourceTerm, ZeroSource
from .spectral import DiagonalOperator, fractional_norm


@dataclass(frozen=True)
class QuadratureSettings:
    """Gauss-Legendre panels in ``s = xi^rho_1``, graded geometrically toward 0.

    Panel edges are ``S ratio^j`` for ``j = 0..panels-1`` plus the origin.
    Each panel is integrated at two orders; their difference is the error
    estimate checked against ``atol + rtol * scale``.
    """

    panels: int = 20
    ratio: float = 0.3
    low: int = 10
    high: int = 16
    atol: float = 1e-10
    rtol: float = 1e-10

    def __post_init__(self):
        if self.panels < 1 or not 0 < self.ratio < 1:
            raise InvalidParams("need panels >= 1 and 0 < ratio < 1")
        if not 1 <= self.low < self.high:
            raise InvalidParams("need 1 <= low < high quadrature orders")


DEFAULT_QUAD = QuadratureSettings()


@functools.lru_cache(maxsize=8)
def _reference_rule(q: QuadratureSettings):
    """Nodes and weights on [0, 1] for both orders, concatenated.

    Returns ``(x, w_low, w_high)`` where each weight vector is zero on the
    other rule's nodes, so one kernel evaluation serves both sums.
    """
    edges = np.concatenate([[0.0], q.ratio ** np.arange(q.panels - 1, -1, -1)])
    xs, wl, wh = [], [], []
    for order, is_high in ((q.low, False), (q.high, True)):
        gx, gw = np.polynomial.legendre.leggauss(order)
        for a, b in zip(edges[:-1], edges[1:]):
            xs.append(0.5 * (b - a) * gx + 0.5 * (a + b))
            w = 0.5 * (b - a) * gw
            wl.append(np.zeros(order) if is_high else w)
            wh.append(w if is_high else np.zeros(order))
    x, w_low, w_high = (np.concatenate(v) for v in (xs, wl, wh))
    for arr in (x, w_low, w_high):
        arr.setflags(write=False)
    return x, w_low, w_high


def _convolution(orders, lams, values_at, t, quad, settings):
    """Convolution for every eigenvalue in ``lams`` at one time ``t > 0``.

    ``values_at(tau)`` returns source coefficients of shape ``tau.shape + (N,)``.
    Returns ``(high_order_value, error_estimate, scale)``, each of shape ``(N,)``.
    """
    x, w_low, w_high = _reference_rule(quad)
    S = t**orders.rho1
    s = S * x
    xi = s ** (1.0 / orders.rho1)
    K = kernel_in_s(orders, lams[None, :], s[:, None], settings=settings)
    F = values_at(np.maximum(t - xi, 0.0))
    KF = K * F
    factor = S / orders.rho1
    hi = factor * (w_high @ KF)
    lo = factor * (w_low @ KF)
    scale = factor * (w_high @ np.abs(KF))
    return hi, np.abs(hi - lo), scale


def convolve_source(orders: FractionalOrders, lam: float, f_k, t: float,
                    quad: QuadratureSettings = DEFAULT_QUAD,
                    settings: MLFSettings = DEFAULT_SETTINGS) -> float:
    """``int_0^t f_k(t - xi) xi^(rho_1-1) E_{rho',rho_1}(-lam xi^rho_1, *) dxi``.

    The substitution ``s = xi^rho_1`` turns the weakly singular kernel into
    the bounded ``E(-lam s, *) / rho_1``, integrated on graded panels.

    Raises
    ------
    QuadratureFailure
        If the two-order estimate exceeds the tolerance.
    """
    if not t >= 0:
        raise InvalidParams("convolution time must be nonnegative")
    if not lam > 0:
        raise InvalidParams("eigenvalue must be positive")
    if t == 0:
        return 0.0

    def values_at(tau):
        return np.asarray(f_k(tau), float)[..., None] * np.ones(1)

    hi, err, scale = _convolution(orders, np.array([float(lam)]), values_at, t, quad, settings)
    if err[0] > quad.atol + quad.rtol * scale[0]:
        raise QuadratureFailure(
            f"convolution at t={t:g}, lam={lam:g}: estimate {err[0]:.2e} above tolerance"
        )
    return float(hi[0])


@dataclass
class TrajectoryResult:
    times: np.ndarray
    states: np.ndarray
    norm1: np.ndarray
    norm0: np.ndarray
    op: DiagonalOperator
    orders: FractionalOrders
    quad_error: float = 0.0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, float))
    if times.ndim != 1 or times.size == 0:
        raise InvalidParams("times must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(times)) or times[0] < 0:
        raise InvalidParams("times must be finite and nonnegative")
    if np.any(np.diff(times) < 0):
        raise InvalidParams("times must be sorted")
    return times


def forward_solve(op: DiagonalOperator, orders: FractionalOrders, phi,
                  f: SourceTerm | None = None, times=(1.0,),
                  quad: QuadratureSettings = DEFAULT_QUAD,
                  settings: MLFSettings = DEFAULT_SETTINGS) -> TrajectoryResult:
    """Evaluate the solution at ``times`` from ``u(0) = phi`` and source ``f``."""
    phi = op.check(phi)
    times = _check_times(times)
    f = ZeroSource(op.n_modes) if f is None else f
    if f.n_modes != op.n_modes:
        raise InvalidParams(f"source has {f.n_modes} modes, operator {op.n_modes}")
    f.check_horizon(times[-1])
    lams = op.eigenvalues
    states = phi * relaxation(orders, lams[None, :], times[:, None], settings=settings)
    worst = 0.0
    if not f.is_zero:
        for i, t in enumerate(times):
            if t == 0:
                continue
            hi, err, scale = _convolution(orders, lams, f, t, quad, settings)
            tol = quad.atol + quad.rtol * scale
            if np.any(err > tol):
                k = int(np.argmax(err - tol))
                raise QuadratureFailure(
                    f"convolution at t={t:g}, mode {k + 1}: estimate {err[k]:.2e} above tolerance"
                )
            states[i] += hi
            worst = max(worst, float(err.max()))
    return TrajectoryResult(
        times=times,
        states=states,
        norm1=fractional_norm(op, states, 1.0),
        norm0=fractional_norm(op, states, 0.0),
        op=op,
        orders=orders,
        quad_error=worst,
    )


def geometric_times(T: float, n: int = 40, t_min: float | None = None) -> np.ndarray:
    """``n`` times from ``t_min`` (default ``T * 1e-6``) to ``T``, log-spaced."""
    if not T > 0:
        raise InvalidParams("T must be positive")
    t_min = T * 1e-6 if t_min is None else t_min
    return np.geomspace(t_min, T, n)


def _smoothing_ratio(result: TrajectoryResult, phi_norm, f_norm):
    t = result.times
    mask = t > 0
    singular = sum(t[mask] ** (-r) for r in result.orders.rhos)
    return t[mask], result.norm1[mask] / (phi_norm * singular + f_norm)


def smoothing_check(result: TrajectoryResult, phi, f: SourceTerm | None,
                    orders: FractionalOrders, eps: float,
                    quad: QuadratureSettings = DEFAULT_QUAD,
                    settings: MLFSettings = DEFAULT_SETTINGS,
                    growth_tol: float = 0.1) -> EvalReport:
    """Empirical constant of the ``D(A)`` smoothing estimate.

    ``R(t) = ||u(t)||_1 / (||phi|| sum_j t^-rho_j + max ||f||_eps)`` is
    evaluated on the result's grid and again on a grid twice as dense that
    reaches a decade closer to 0. The check passes when ``sup R`` is finite
    and grows by less than ``growth_tol`` under that refinement.
    """
    op = result.op
    phi = op.check(phi)
    T = float(result.times[-1])
    f = ZeroSource(op.n_modes) if f is None else f
    phi_norm = float(fractional_norm(op, phi, 0.0))
    f_norm = f.max_norm(op, eps, T)
    if phi_norm == 0 and f_norm == 0:
        raise InvalidParams("smoothing check needs nonzero data")
    t, R = _smoothing_ratio(result, phi_norm, f_norm)
    pos = t[t > 0]
    fine_times = np.geomspace(pos.min() / 10, T, 2 * pos.size)
    fine = forward_solve(op, orders, phi, f, fine_times, quad, settings)
    _, R_fine = _smoothing_ratio(fine, phi_norm, f_norm)

    table = Table(["t", "norm1", "ratio"])
    for ti, n1, ri in zip(t, result.norm1[result.times > 0], R):
        table.add(float(ti), float(n1), float(ri))
    sup, sup_fine = float(R.max()), float(R_fine.max())
    report = EvalReport("smoothing", tables={"ratio": table})
    report.constants.update({
        "sup_ratio": sup,
        "sup_ratio_refined": sup_fine,
        "phi_norm": phi_norm,
        "source_norm_eps": f_norm,
    })
    report.flags["smoothing_bounded"] = bool(
        np.isfinite(sup) and np.isfinite(sup_fine) and sup_fine <= (1 + growth_tol) * sup
    )
    return report
