"""Time-dependent source terms ``f(t) = sum_k f_k(t) v_k``."""
from __future__ import annotations

import enum

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidParams
from .spectral import DiagonalOperator, fractional_norm


class SourceKind(enum.Enum):
    ZERO = "zero"
    SEPARABLE = "separable"
    SAMPLED = "sampled"


class SourceTerm:
    """Base class; ``source(t)`` returns coefficients of shape ``t.shape + (N,)``.

    ``epsilon_reg`` declares the class ``C([0, T]; D(A^eps))`` the source is
    asserted to belong to.
    """

    kind: SourceKind

    def __init__(self, n_modes: int, epsilon_reg: float = 0.5):
        if not 0.0 < epsilon_reg < 1.0:
            raise InvalidParams(f"source smoothness index must lie in (0, 1), got {epsilon_reg}")
        self.n_modes = int(n_modes)
        self.epsilon_reg = float(epsilon_reg)

    @property
    def is_zero(self) -> bool:
        return False

    def __call__(self, t) -> np.ndarray:
        raise NotImplementedError

    def check_horizon(self, T: float):
        pass

    def max_norm(self, op: DiagonalOperator, eps: float, T: float, samples: int = 201) -> float:
        """``max_t ||f(t)||_eps`` sampled on a uniform grid of [0, T]."""
        if self.is_zero:
            return 0.0
        t = np.linspace(0.0, T, samples)
        norms = fractional_norm(op, self(t), eps)
        if not np.all(np.isfinite(norms)):
            raise InvalidParams("source has non-finite fractional norm")
        return float(norms.max())

    def scaled(self, factor: float) -> SourceTerm:
        raise NotImplementedError


class ZeroSource(SourceTerm):
    kind = SourceKind.ZERO

    @property
    def is_zero(self) -> bool:
        return True

    def __call__(self, t):
        t = np.asarray(t, float)
        return np.zeros(t.shape + (self.n_modes,))

    def scaled(self, factor):
        return self


class SeparableSource(SourceTerm):
    """``f_k(t) = g_k h(t)`` with a vectorised scalar profile ``h``."""

    kind = SourceKind.SEPARABLE

    def __init__(self, g, h, epsilon_reg: float = 0.5, label: str = ""):
        g = np.asarray(g, float)
        if g.ndim != 1 or not np.all(np.isfinite(g)):
            raise InvalidParams("separable source needs a finite coefficient vector")
        super().__init__(g.size, epsilon_reg)
        self.g = g
        self.h = h
        self.label = label

    @property
    def is_zero(self) -> bool:
        return not np.any(self.g)

    def __call__(self, t):
        t = np.asarray(t, float)
        ht = np.broadcast_to(np.asarray(self.h(t), float), t.shape)
        return ht[..., None] * self.g

    def scaled(self, factor):
        return SeparableSource(factor * self.g, self.h, self.epsilon_reg, self.label)


class SampledSource(SourceTerm):
    """Coefficient vectors on a time grid, joined by monotone cubic interpolation."""

    kind = SourceKind.SAMPLED

    def __init__(self, times, values, epsilon_reg: float = 0.5):
        times = np.asarray(times, float)
        values = np.asarray(values, float)
        if times.ndim != 1 or times.size < 2:
            raise InvalidParams("sampled source needs at least two times")
        if np.any(np.diff(times) <= 0):
            raise InvalidParams("sample times must be strictly increasing")
        if times[0] != 0.0:
            raise InvalidParams("sample times must start at 0")
        if values.shape[:1] != times.shape or values.ndim != 2:
            raise InvalidParams("values must have shape (len(times), n_modes)")
        if not np.all(np.isfinite(values)):
            raise InvalidParams("sampled source values must be finite")
        super().__init__(values.shape[1], epsilon_reg)
        self.times = times
        self.values = values
        self._interp = PchipInterpolator(times, values, axis=0, extrapolate=False)

    def check_horizon(self, T):
        if T > self.times[-1] * (1 + 1e-12):
            raise InvalidParams(f"sampled source covers [0, {self.times[-1]}], needed [0, {T}]")

    def __call__(self, t):
        t = np.asarray(t, float)
        return self._interp(np.clip(t, 0.0, self.times[-1]))

    def scaled(self, factor):
        return SampledSource(self.times, factor * self.values, self.epsilon_reg)
