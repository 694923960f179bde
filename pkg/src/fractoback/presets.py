"""Named coefficient vectors and time profiles used by experiment configs.

A data preset is a string such as ``mode:3``, ``poly`` or ``random:7``;
:func:`data_vector` turns it into coefficients for a given operator.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidParams
from .sources import SeparableSource, SourceTerm, ZeroSource
from .spectral import BasisKind, DiagonalOperator, SQRT_2_OVER_PI, project

DATA_PRESETS = {
    "zero": "all coefficients 0",
    "mode:k": "the k-th eigenfunction (unit coefficient in mode k)",
    "poly": "sine coefficients of x(pi - x), closed form (dirichlet1d only)",
    "gauss": "exp(-((x - pi/2)/0.4)^2) projected on the sine basis (dirichlet1d only)",
    "random:seed": "iid standard normal coefficients in every mode",
    "coeffs:a,b,...": "explicit leading coefficients, remaining modes 0",
}

PROFILES = {
    "const": lambda t: np.ones_like(t),
    "linear": lambda t: 1.0 + t,
    "exp": lambda t: np.exp(-t),
    "cos": lambda t: np.cos(2.0 * t),
}


def _gauss(x):
    return np.exp(-(((x - np.pi / 2) / 0.4) ** 2))


def poly_coefficients(n_modes: int) -> np.ndarray:
    """Closed-form sine coefficients of ``x(pi - x)``: ``sqrt(2/pi) 2(1-(-1)^k)/k^3``."""
    k = np.arange(1, n_modes + 1, dtype=float)
    return SQRT_2_OVER_PI * 2.0 * (1.0 - (-1.0) ** k) / k**3


def data_vector(op: DiagonalOperator, name: str) -> np.ndarray:
    """Coefficient vector of the data preset ``name``."""
    name = name.strip()
    head, _, arg = name.partition(":")
    n = op.n_modes
    if head == "zero" and not arg:
        return np.zeros(n)
    if head == "mode":
        try:
            k = int(arg)
        except ValueError:
            raise InvalidParams(f"preset {name!r}: mode index must be an integer") from None
        return op.unit(k)
    if head in ("poly", "gauss") and not arg:
        if op.basis_kind is not BasisKind.DIRICHLET_1D:
            raise InvalidParams(f"preset {name!r} needs the dirichlet1d basis")
        if head == "poly":
            return poly_coefficients(n)
        return project(op, _gauss)
    if head == "random":
        try:
            seed = int(arg)
        except ValueError:
            raise InvalidParams(f"preset {name!r}: seed must be an integer") from None
        return np.random.default_rng(seed).standard_normal(n)
    if head == "coeffs":
        try:
            vals = [float(v) for v in arg.split(",") if v.strip()]
        except ValueError:
            raise InvalidParams(f"preset {name!r}: coefficients must be numbers") from None
        if not vals or len(vals) > n:
            raise InvalidParams(f"preset {name!r}: need 1..{n} coefficients")
        out = np.zeros(n)
        out[: len(vals)] = vals
        return out
    raise InvalidParams(f"unknown data preset {name!r}; see list-presets")


def source_term(op: DiagonalOperator, data: str, profile: str = "const",
                scale: float = 1.0, epsilon_reg: float = 0.5) -> SourceTerm:
    """Separable source ``scale * g * h(t)`` with ``g`` from a data preset."""
    if data.strip() in ("", "none", "zero"):
        return ZeroSource(op.n_modes, epsilon_reg)
    if profile not in PROFILES:
        raise InvalidParams(f"unknown source profile {profile!r}; choose from {sorted(PROFILES)}")
    g = scale * data_vector(op, data)
    return SeparableSource(g, PROFILES[profile], epsilon_reg, label=f"{data}*{profile}")


def list_presets() -> str:
    lines = ["data presets (initial data, final data, source shapes):"]
    lines += [f"  {k:<16} {v}" for k, v in DATA_PRESETS.items()]
    lines.append("source profiles h(t):")
    lines += [f"  {k}" for k in PROFILES]
    return "\n".join(lines)


def preset_examples() -> list[str]:
    """A concrete instance of every data preset pattern."""
    return ["zero", "mode:1", "poly", "gauss", "random:0", "coeffs:1,0,0.5"]
