"""Diagonal realisation of the elliptic operator and its fractional powers.

Spectral vectors are plain 1-D float arrays of Fourier coefficients
``g_k = (g, v_k)``, ``k = 1..N``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import GridTooCoarse, InvalidParams, LengthMismatch

SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


class BasisKind(enum.Enum):
    ABSTRACT_DIAGONAL = "diagonal"
    DIRICHLET_1D = "dirichlet1d"


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    """Positive self-adjoint operator given by its ascending eigenvalues.

    For ``DIRICHLET_1D`` this is ``-d^2/dx^2`` on (0, pi) with eigenvalues
    ``k^2`` and eigenfunctions ``sqrt(2/pi) sin(kx)``.
    """

    eigenvalues: np.ndarray
    basis_kind: BasisKind = BasisKind.ABSTRACT_DIAGONAL

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float).ravel()
        if lam.size == 0:
            raise InvalidParams("operator needs at least one eigenvalue")
        if not np.all(np.isfinite(lam)) or lam[0] <= 0:
            raise InvalidParams("eigenvalues must be finite and positive")
        if np.any(np.diff(lam) < 0):
            raise InvalidParams("eigenvalues must be nondecreasing")
        if self.basis_kind is BasisKind.DIRICHLET_1D:
            k = np.arange(1, lam.size + 1, dtype=float)
            if not np.array_equal(lam, k**2):
                raise InvalidParams("Dirichlet eigenvalues must be exactly k^2")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @classmethod
    def dirichlet1d(cls, n_modes: int = 64) -> DiagonalOperator:
        if n_modes < 1:
            raise InvalidParams("n_modes must be >= 1")
        k = np.arange(1, n_modes + 1, dtype=float)
        return cls(k**2, BasisKind.DIRICHLET_1D)

    @classmethod
    def diagonal(cls, eigenvalues) -> DiagonalOperator:
        return cls(np.asarray(eigenvalues, float), BasisKind.ABSTRACT_DIAGONAL)

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.size

    def unit(self, k: int) -> np.ndarray:
        """Coefficient vector of the ``k``-th eigenfunction (1-based)."""
        if not 1 <= k <= self.n_modes:
            raise InvalidParams(f"mode {k} outside 1..{self.n_modes}")
        e = np.zeros(self.n_modes)
        e[k - 1] = 1.0
        return e

    def check(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        if g.shape[-1:] != (self.n_modes,):
            raise LengthMismatch(
                f"coefficient vector has length {g.shape[-1] if g.ndim else 0}, "
                f"operator has {self.n_modes} modes"
            )
        if not np.all(np.isfinite(g)):
            raise InvalidParams("coefficients must be finite")
        return g


def fractional_norm(op: DiagonalOperator, g, eps: float):
    """``||A^eps g|| = (sum_k lam_k^(2 eps) g_k^2)^(1/2)``.

    Works on stacks of vectors along the last axis.
    """
    g = op.check(g)
    weights = op.eigenvalues ** (2.0 * eps)
    return np.sqrt(np.sum(weights * g**2, axis=-1))


def _require_dirichlet(op: DiagonalOperator):
    if op.basis_kind is not BasisKind.DIRICHLET_1D:
        raise InvalidParams("projection needs the Dirichlet sine basis")


def uniform_grid(op: DiagonalOperator, factor: int = 4) -> np.ndarray:
    """Uniform grid on [0, pi] with ``factor * N`` intervals (even, for Simpson)."""
    n = factor * op.n_modes
    n += n % 2
    return np.linspace(0.0, np.pi, n + 1)


def project(op: DiagonalOperator, samples, x=None) -> np.ndarray:
    """Fourier-sine coefficients of grid samples by composite Simpson.

    ``samples`` are values on ``x`` (default :func:`uniform_grid`) or a
    callable evaluated there. The rule is exact for sums of ``sin(mx)``
    with ``m <= N`` on any grid of at least ``4N`` intervals.
    """
    _require_dirichlet(op)
    x = uniform_grid(op) if x is None else np.asarray(x, float)
    if x.size - 1 < 4 * op.n_modes:
        raise GridTooCoarse(
            f"{x.size - 1} grid intervals for {op.n_modes} modes; need at least {4 * op.n_modes}"
        )
    if (x.size - 1) % 2:
        raise InvalidParams("composite Simpson needs an even number of intervals")
    h = np.diff(x)
    if not np.allclose(h, h[0], rtol=1e-12, atol=0) or abs(x[0]) > 1e-14 or abs(x[-1] - np.pi) > 1e-12:
        raise InvalidParams("project needs a uniform grid spanning [0, pi]")
    y = samples(x) if callable(samples) else np.asarray(samples, float)
    if y.shape[-1] != x.size:
        raise LengthMismatch("samples do not match the grid")
    k = np.arange(1, op.n_modes + 1)
    basis = SQRT_2_OVER_PI * np.sin(np.outer(k, x))
    return simpson(y[..., None, :] * basis, x=x, axis=-1)


def synthesize(op: DiagonalOperator, g, x) -> np.ndarray:
    """Evaluate ``sum_k g_k sqrt(2/pi) sin(kx)`` on ``x``."""
    _require_dirichlet(op)
    g = op.check(g)
    x = np.asarray(x, float)
    k = np.arange(1, op.n_modes + 1)
    basis = SQRT_2_OVER_PI * np.sin(np.outer(k, x))
    return g @ basis
