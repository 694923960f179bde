"""Structured experiment output: tables, fitted constants and pass flags."""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class Table:
    columns: list[str]
    rows: list[list[float]] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append([_plain(v) for v in values])

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def write_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([_fmt(v) for v in row])


@dataclass
class EvalReport:
    """Result of one experiment.

    Everything except ``timing`` and ``created`` is a deterministic function
    of the configuration and seed.
    """

    experiment: str
    config: dict = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    constants: dict[str, float] = field(default_factory=dict)
    flags: dict[str, bool] = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def merge(self, other: EvalReport, prefix: str = ""):
        for k, v in other.tables.items():
            self.tables[prefix + k] = v
        for k, v in other.constants.items():
            self.constants[prefix + k] = v
        for k, v in other.flags.items():
            self.flags[prefix + k] = v
        return self

    def summary(self) -> dict:
        return {
            "experiment": self.experiment,
            "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "config": _plain(self.config),
            "constants": {k: _plain(v) for k, v in self.constants.items()},
            "flags": {k: bool(v) for k, v in self.flags.items()},
            "passed": self.passed,
            "timing": {k: round(v, 6) for k, v in self.timing.items()},
            "tables": sorted(self.tables),
        }

    def write(self, outdir) -> list[Path]:
        """Write one CSV per table plus ``<experiment>.json``; return the paths."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, table in sorted(self.tables.items()):
            p = outdir / f"{self.experiment}_{name}.csv"
            table.write_csv(p)
            paths.append(p)
        p = outdir / f"{self.experiment}.json"
        p.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        paths.append(p)
        return paths


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _plain(v):
    """Convert numpy scalars and arrays into JSON-friendly Python objects."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v
