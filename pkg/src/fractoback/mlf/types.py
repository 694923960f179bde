from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParams


@dataclass(frozen=True)
class FractionalOrders:
    """Orders and weights of the operator ``sum_j q_j d_t^{rho_j}``.

    ``rhos`` must be strictly decreasing inside (0, 1) and ``weights[0]``
    must equal 1. ``test_mode`` additionally admits the single-term classical
    limit ``rhos == (1.0,)`` used to cross-check against the heat semigroup.
    """

    rhos: tuple[float, ...]
    weights: tuple[float, ...] | None = None
    test_mode: bool = False

    def __post_init__(self):
        rhos = tuple(float(r) for r in np.atleast_1d(self.rhos))
        weights = (1.0,) * len(rhos) if self.weights is None else self.weights
        weights = tuple(float(q) for q in np.atleast_1d(weights))
        object.__setattr__(self, "rhos", rhos)
        object.__setattr__(self, "weights", weights)
        if not rhos:
            raise InvalidParams("at least one fractional order is required")
        if len(weights) != len(rhos):
            raise InvalidParams(
                f"got {len(rhos)} orders but {len(weights)} weights"
            )
        unit_ok = self.test_mode and len(rhos) == 1 and rhos[0] == 1.0
        for r in rhos:
            if not (0.0 < r < 1.0 or unit_ok) or not math.isfinite(r):
                raise InvalidParams(f"fractional order {r} outside (0, 1)")
        for a, b in zip(rhos, rhos[1:]):
            if not a > b:
                raise InvalidParams(
                    f"orders must be strictly decreasing, got {a} then {b}"
                )
        if weights[0] != 1.0:
            raise InvalidParams(f"leading weight must be exactly 1, got {weights[0]}")
        for q in weights:
            if not (q > 0.0 and math.isfinite(q)):
                raise InvalidParams(f"weights must be positive, got {q}")

    @property
    def M(self) -> int:
        return len(self.rhos)

    @property
    def rho1(self) -> float:
        return self.rhos[0]

    @property
    def shifted(self) -> tuple[float, ...]:
        """First indices ``(rho_1, rho_1 - rho_2, ..., rho_1 - rho_M)``."""
        r1 = self.rhos[0]
        return (r1,) + tuple(r1 - r for r in self.rhos[1:])

    def scaled_arguments(self, lam, t):
        """Series arguments ``(-lam t^rho_1, -q_2 t^(rho_1-rho_2), ...)``.

        Broadcasts ``lam`` and ``t``; the result has a trailing axis of
        length ``M``.
        """
        lam, t = np.broadcast_arrays(np.asarray(lam, float), np.asarray(t, float))
        r1 = self.rhos[0]
        cols = [-lam * t**r1]
        for r, q in zip(self.rhos[1:], self.weights[1:]):
            cols.append(-q * t ** (r1 - r) * np.ones_like(lam))
        return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class MLParams:
    """Indices ``beta0`` (second index) and ``betas`` of the multinomial function."""

    beta0: float
    betas: tuple[float, ...]
    allow_unit: bool = False

    def __post_init__(self):
        betas = tuple(float(b) for b in np.atleast_1d(self.betas))
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "beta0", float(self.beta0))
        if not (self.beta0 > 0.0 and math.isfinite(self.beta0)):
            raise InvalidParams(f"beta0 must be positive, got {self.beta0}")
        if not betas:
            raise InvalidParams("betas must be nonempty")
        for b in betas:
            if not (0.0 < b < 1.0 or (self.allow_unit and b == 1.0)):
                raise InvalidParams(f"first index {b} outside (0, 1)")

    @classmethod
    def for_orders(cls, orders: FractionalOrders, beta0: float) -> MLParams:
        return cls(beta0, orders.shifted, allow_unit=orders.test_mode)


@dataclass(frozen=True)
class MLArguments:
    """Real nonpositive arguments ``(z_1, ..., z_M)``."""

    z: tuple[float, ...]

    def __post_init__(self):
        z = tuple(float(v) for v in np.atleast_1d(self.z))
        object.__setattr__(self, "z", z)
        for v in z:
            if not math.isfinite(v) or v > 0.0:
                raise InvalidParams(f"arguments must be finite and <= 0, got {v}")

    @property
    def z1(self) -> float:
        return self.z[0]


class Method(enum.Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    CONTOUR = "contour"
    ORACLE = "oracle"


@dataclass(frozen=True)
class EvalResult:
    value: float
    method: Method
    est_abs_error: float = 0.0
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.est_abs_error) and self.est_abs_error >= 0.0):
            raise ValueError(f"bad error estimate {self.est_abs_error}")

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class MLFSettings:
    """Numerical knobs shared by the evaluation routines.

    series_radius
        ``mlf_eval`` tries the power series when every ``|z_j|`` is at most this.
    cancel_limit
        The series is abandoned once a term exceeds this magnitude; the
        alternating sum would have lost too many digits.
    z_switch
        ``|z_1|`` from which ``mlf_eval`` uses the two-term expansion.
    contour_nodes
        Trapezoid nodes on the half hyperbola (``2n + 1`` in total).
    """

    series_tol: float = 1e-14
    kmax: int = 400
    series_radius: float = 8.0
    cancel_limit: float = 50.0
    z_switch: float = 1e6
    contour_nodes: int = 14

    def __post_init__(self):
        if not self.series_tol > 0:
            raise InvalidParams("series_tol must be positive")
        if self.kmax < 1:
            raise InvalidParams("kmax must be >= 1")
        if not self.z_switch > 0:
            raise InvalidParams("z_switch must be positive")
        if self.contour_nodes < 4:
            raise InvalidParams("contour_nodes must be >= 4")


DEFAULT_SETTINGS = MLFSettings()
