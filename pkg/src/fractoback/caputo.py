"""L1 discretisation of the Caputo derivative and the equation residual."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import l1_history
from .errors import GridMismatch, InvalidOrder, InvalidParams
from .forward import TrajectoryResult
from .mlf import FractionalOrders
from .report import fit_loglog_slope
from .sources import SourceTerm, ZeroSource
from .spectral import DiagonalOperator


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``a = t_0 < ... < t_n = b`` with ``n >= 2``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParams("a time grid needs at least two steps")
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.b > self.a):
            raise InvalidParams("time grid needs finite a < b")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n + 1)

    @classmethod
    def from_nodes(cls, t, rtol: float = 1e-10) -> TimeGrid:
        t = np.asarray(t, float)
        if t.ndim != 1 or t.size < 3:
            raise GridMismatch("need at least three time nodes")
        d = np.diff(t)
        if np.any(d <= 0) or np.max(np.abs(d - d.mean())) > rtol * abs(d.mean()):
            raise GridMismatch("time nodes are not uniformly spaced")
        return cls(float(t[0]), float(t[-1]), t.size - 1)

    def refined(self) -> TimeGrid:
        return TimeGrid(self.a, self.b, 2 * self.n)


def caputo_l1(samples, rho: float, grid: TimeGrid) -> np.ndarray:
    """L1 approximation of the Caputo derivative at ``t_1..t_n``.

    ``samples`` has shape ``(n + 1, ...)``; the history starts at ``t_0``,
    so ``t_0`` must be the lower terminal of the derivative.

    Raises
    ------
    InvalidOrder
        If ``rho`` is not in (0, 1).
    """
    if not 0.0 < rho < 1.0:
        raise InvalidOrder(f"L1 scheme needs an order in (0, 1), got {rho}")
    y = np.asarray(samples, float)
    if y.shape[0] != grid.n + 1:
        raise GridMismatch(f"{y.shape[0]} samples for a grid of {grid.n + 1} nodes")
    if not np.all(np.isfinite(y)):
        raise InvalidParams("samples must be finite")
    flat = y.reshape(grid.n + 1, -1)
    S = np.asarray(l1_history(np.ascontiguousarray(flat), float(rho)))
    scale = grid.h ** (-rho) / math.gamma(2.0 - rho)
    return (scale * S).reshape((grid.n,) + y.shape[1:])


def residual(op: DiagonalOperator, orders: FractionalOrders, trajectory: TrajectoryResult,
             f: SourceTerm | None = None) -> np.ndarray:
    """``sum_j q_j L1[u_k](t_m) + lam_k u_k(t_m) - f_k(t_m)`` for ``m = 1..n``.

    The trajectory must be sampled on a uniform grid starting at ``t = 0``.
    """
    grid = TimeGrid.from_nodes(trajectory.times)
    if grid.a != 0.0:
        raise GridMismatch("the residual needs the trajectory from t = 0")
    if trajectory.states.shape[1] != op.n_modes:
        raise GridMismatch("trajectory and operator have different mode counts")
    f = ZeroSource(op.n_modes) if f is None else f
    u = trajectory.states
    r = op.eigenvalues * u[1:] - f(grid.nodes[1:])
    for rho, q in zip(orders.rhos, orders.weights):
        r += q * caputo_l1(u, rho, grid)
    return r


def observed_order(hs, errors) -> float:
    """Fitted ``p`` in ``error ~ h^p``."""
    return fit_loglog_slope(hs, errors)
