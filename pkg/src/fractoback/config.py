"""INI experiment configuration with per-field validation.

Every field has a default, so an empty file is a valid two-term
experiment. Errors name the offending ``[section] key`` and, when it came
from a file, the line.
"""
from __future__ import annotations

import configparser
import re
from pathlib import Path

import numpy as np

from .errors import ConfigError, FractobackError
from .forward import QuadratureSettings
from .mlf import FractionalOrders, MLFSettings
from .presets import PROFILES, data_vector, source_term
from .spectral import DiagonalOperator


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip().strip("[]")
    return tuple(float(v) for v in re.split(r"[,\s]+", text) if v)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


SCHEMA: dict[str, dict[str, tuple]] = {
    "operator": {
        "basis": (str, "dirichlet1d"),
        "n_modes": (int, "32"),
        "eigenvalues": (_floats, ""),
    },
    "orders": {
        "rhos": (_floats, "0.8, 0.4"),
        "weights": (_floats, "1, 1"),
        "test_mode": (_bool, "false"),
    },
    "problem": {
        "T": (float, "1.0"),
        "phi": (str, "poly"),
        "final": (str, ""),
        "times": (int, "21"),
        "t_min": (float, "0.0"),
    },
    "source": {
        "data": (str, "none"),
        "profile": (str, "const"),
        "scale": (float, "1.0"),
        "epsilon": (float, "0.5"),
    },
    "mlf": {
        "series_tol": (float, "1e-14"),
        "kmax": (int, "400"),
        "series_radius": (float, "8.0"),
        "cancel_limit": (float, "50"),
        "z_switch": (float, "1e6"),
        "contour_nodes": (int, "14"),
    },
    "quadrature": {
        "panels": (int, "20"),
        "ratio": (float, "0.3"),
        "low": (int, "10"),
        "high": (int, "16"),
        "atol": (float, "1e-10"),
        "rtol": (float, "1e-10"),
    },
    "experiment": {
        "eps": (float, "0.1"),
        "k_min": (int, "0"),  # 0: n_modes // 4
        "k_max": (int, "0"),  # 0: n_modes
        "noise": (float, "0.0"),
        "cases": (int, "50"),
        "seed": (int, "0"),
        "steps": (int, "40"),
        "levels": (int, "4"),
    },
    "output": {
        "dir": (str, "results"),
    },
}


class ExperimentConfig:
    """Typed configuration values plus builders for the solver objects."""

    def __init__(self, values: dict[str, dict], origin: dict | None = None):
        self.values = values
        self._origin = origin or {}
        self._validate()

    @classmethod
    def from_string(cls, text: str, overrides: dict | None = None, name: str = "<config>",
                    labels: dict | None = None):
        """Parse INI text; ``overrides`` maps ``"section.key"`` to raw strings.

        ``labels`` optionally names where each override came from (for
        example the command-line flag) in error messages.
        """
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text, source=name)
        except configparser.Error as exc:
            raise ConfigError(f"{name}: {exc}") from None
        return cls._from_parser(parser, _line_index(text, name), overrides or {}, labels or {})

    @classmethod
    def from_file(cls, path, overrides: dict | None = None, labels: dict | None = None):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.from_string(text, overrides, name=str(path), labels=labels)

    @classmethod
    def defaults(cls, overrides: dict | None = None, labels: dict | None = None):
        return cls.from_string("", overrides, labels=labels)

    @classmethod
    def _from_parser(cls, parser, lines, overrides, labels):
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"{lines.get((section, None), section)}: unknown section [{section}]")
            for key in parser[section]:
                if key not in SCHEMA[section]:
                    where = lines.get((section, key), f"[{section}]")
                    raise ConfigError(f"{where}: unknown field [{section}] {key}")
        origin = dict(lines)
        for dotted, raw in overrides.items():
            if raw is None:
                continue
            section, _, key = dotted.partition(".")
            if section not in SCHEMA or key not in SCHEMA[section]:
                raise ConfigError(f"override {dotted!r} is not a config field")
            if not parser.has_section(section):
                parser.add_section(section)
            parser[section][key] = str(raw)
            origin[(section, key)] = labels.get(dotted, f"override {dotted}")
        values: dict[str, dict] = {}
        for section, fields in SCHEMA.items():
            values[section] = {}
            for key, (conv, default) in fields.items():
                raw = parser.get(section, key, fallback=default)
                try:
                    values[section][key] = conv(raw) if raw != "" or conv is str else ()
                except ValueError as exc:
                    where = origin.get((section, key), "default")
                    raise ConfigError(f"{where}: [{section}] {key} = {raw!r}: {exc}") from None
        return cls(values, origin)

    def get(self, section: str, key: str):
        return self.values[section][key]

    def _fail(self, section, key, msg):
        where = self._origin.get((section, key))
        prefix = f"{where}: " if where else ""
        raise ConfigError(f"{prefix}[{section}] {key}: {msg}")

    def _validate(self):
        for section, key, build in (
            ("operator", "basis", self.operator),
            ("orders", "rhos", self.orders),
            ("mlf", "series_tol", self.mlf_settings),
            ("quadrature", "panels", self.quad_settings),
        ):
            try:
                build()
            except FractobackError as exc:
                self._fail(section, key, str(exc))
        if not self.T > 0:
            self._fail("problem", "T", "final time must be positive")
        if self.get("problem", "times") < 1:
            self._fail("problem", "times", "need at least one output time")
        t_min = self.get("problem", "t_min")
        if not 0 <= t_min < self.T:
            self._fail("problem", "t_min", "must lie in [0, T)")
        eps = self.get("experiment", "eps")
        if not 0 < eps <= 1:
            self._fail("experiment", "eps", "must lie in (0, 1]")
        if not 0 < self.get("source", "epsilon") < 1:
            self._fail("source", "epsilon", "must lie in (0, 1)")
        if self.get("source", "profile") not in PROFILES:
            self._fail("source", "profile", f"choose from {sorted(PROFILES)}")
        n = self.get("operator", "n_modes")
        e = self.values["experiment"]
        if e["k_max"] == 0:
            e["k_max"] = n
        if e["k_min"] == 0:
            e["k_min"] = max(1, min(n // 4, e["k_max"] - 1))
        k_min, k_max = e["k_min"], e["k_max"]
        if not 1 <= k_min < k_max <= n:
            self._fail("experiment", "k_max", f"need 1 <= k_min < k_max <= n_modes = {n}")
        for key, minimum in (("cases", 2), ("steps", 4), ("levels", 2)):
            if self.get("experiment", key) < minimum:
                self._fail("experiment", key, f"must be at least {minimum}")
        if self.get("experiment", "steps") % 2:
            self._fail("experiment", "steps", "must be even")
        op = self.operator()
        for section, key in (("problem", "phi"), ("problem", "final")):
            name = self.get(section, key)
            if name:
                try:
                    data_vector(op, name)
                except FractobackError as exc:
                    self._fail(section, key, str(exc))
        try:
            self.source()
        except FractobackError as exc:
            self._fail("source", "data", str(exc))

    @property
    def T(self) -> float:
        return self.get("problem", "T")

    @property
    def seed(self) -> int:
        return self.get("experiment", "seed")

    def operator(self) -> DiagonalOperator:
        basis = self.get("operator", "basis")
        eigs = self.get("operator", "eigenvalues")
        if basis == "dirichlet1d":
            if eigs:
                self._fail("operator", "eigenvalues", "only allowed with basis = diagonal")
            return DiagonalOperator.dirichlet1d(self.get("operator", "n_modes"))
        if basis == "diagonal":
            if not eigs:
                self._fail("operator", "eigenvalues", "required with basis = diagonal")
            if len(eigs) != self.get("operator", "n_modes"):
                self._fail("operator", "eigenvalues", "length must equal n_modes")
            return DiagonalOperator.diagonal(eigs)
        self._fail("operator", "basis", "must be 'dirichlet1d' or 'diagonal'")

    def orders(self) -> FractionalOrders:
        return FractionalOrders(self.get("orders", "rhos"), self.get("orders", "weights"),
                                test_mode=self.get("orders", "test_mode"))

    def mlf_settings(self) -> MLFSettings:
        return MLFSettings(**self.values["mlf"])

    def quad_settings(self) -> QuadratureSettings:
        return QuadratureSettings(**self.values["quadrature"])

    def phi(self) -> np.ndarray:
        return data_vector(self.operator(), self.get("problem", "phi"))

    def final_data(self) -> np.ndarray:
        name = self.get("problem", "final")
        if not name:
            self._fail("problem", "final", "backward runs need final data")
        return data_vector(self.operator(), name)

    def source(self):
        s = self.values["source"]
        return source_term(self.operator(), s["data"], s["profile"], s["scale"], s["epsilon"])

    def echo(self) -> dict:
        return {sec: {k: (list(v) if isinstance(v, tuple) else v) for k, v in vals.items()}
                for sec, vals in self.values.items()}


def _line_index(text: str, name: str) -> dict:
    """Map ``(section, key)`` to ``"name:line"`` for error messages."""
    out, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = re.match(r"\[(.+)\]$", s)
        if m:
            section = m.group(1).strip()
            out[(section, None)] = f"{name}:{i}"
            continue
        key = re.split(r"[=:]", s, maxsplit=1)[0].strip()
        if section is not None:
            out[(section, key)] = f"{name}:{i}"
    return out
