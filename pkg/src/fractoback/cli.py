"""Command-line entry point ``fractoback``.

Exit codes: 0 all checks passed, 1 configuration error, 2 numerical
failure, 3 a check failed, 4 output could not be written.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments as ex
from .config import ExperimentConfig
from .errors import ConfigError, FractobackError
from .mlf import MLFSettings
from .presets import list_presets

OUTDIR_ENV = "FRACTOBACK_OUTDIR"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FAILED, EXIT_IO = 0, 1, 2, 3, 4

# flag -> config field; every flag defaults to None so the config wins when unset
CONFIG_FLAGS = {
    "basis": "operator.basis",
    "n_modes": "operator.n_modes",
    "rho": "orders.rhos",
    "q": "orders.weights",
    "T": "problem.T",
    "phi": "problem.phi",
    "final": "problem.final",
    "times": "problem.times",
    "t_min": "problem.t_min",
    "source": "source.data",
    "profile": "source.profile",
    "source_scale": "source.scale",
    "source_eps": "source.epsilon",
    "eps": "experiment.eps",
    "kmin": "experiment.k_min",
    "kmax": "experiment.k_max",
    "noise": "experiment.noise",
    "cases": "experiment.cases",
    "seed": "experiment.seed",
    "steps": "experiment.steps",
    "levels": "experiment.levels",
    "z_switch": "mlf.z_switch",
    "panels": "quadrature.panels",
}

# options whose values may start with '-' (comma-separated negative numbers)
LIST_OPTIONS = ("--z", "--rho", "--q")


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI experiment file")
    p.add_argument("--out", help=f"output directory (overrides ${OUTDIR_ENV} and [output] dir)")
    g = p.add_argument_group("config overrides")
    g.add_argument("--basis", choices=["dirichlet1d", "diagonal"])
    g.add_argument("--n-modes", dest="n_modes", type=int)
    g.add_argument("--rho", help="orders, comma separated, decreasing")
    g.add_argument("--q", help="weights, comma separated, first equal to 1")
    g.add_argument("--T", type=float)
    g.add_argument("--phi", help="initial data preset")
    g.add_argument("--final", help="final data preset (backward)")
    g.add_argument("--times", type=int)
    g.add_argument("--t-min", dest="t_min", type=float)
    g.add_argument("--source", help="source shape preset, or 'none'")
    g.add_argument("--profile", help="source time profile")
    g.add_argument("--source-scale", dest="source_scale", type=float)
    g.add_argument("--source-eps", dest="source_eps", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--kmin", type=int)
    g.add_argument("--kmax", type=int)
    g.add_argument("--noise", type=float)
    g.add_argument("--cases", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--steps", type=int)
    g.add_argument("--levels", type=int)
    g.add_argument("--z-switch", dest="z_switch", type=float)
    g.add_argument("--panels", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractoback",
        description="Forward and backward problems for multi-term time-fractional diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mlf-eval", help="evaluate the multinomial Mittag-Leffler function")
    p.add_argument("--rho", required=True, help="orders rho_1 > ... > rho_M, comma separated")
    p.add_argument("--q", default=None, help="weights (default all 1)")
    p.add_argument("--beta0", type=float, required=True)
    p.add_argument("--z", required=True, help="nonpositive arguments z_1..z_M, comma separated")
    p.add_argument("--method", default="auto", choices=["auto", "series", "contour", "asymptotic", "oracle"])
    p.add_argument("--z-switch", dest="z_switch", type=float, default=None)
    p.add_argument("--out", help="also write the report here")

    for name, text in (
        ("forward", "solve the forward problem and check the smoothing estimate"),
        ("backward", "reconstruct the initial state from final data"),
        ("roundtrip", "forward, reconstruct, forward again"),
        ("illposed-demo", "amplification of high modes in the backward problem"),
        ("conditional-stability", "stability quotient under an a priori bound"),
    ):
        _add_config_flags(sub.add_parser(name, help=text))

    p = sub.add_parser("validate", help="numerical checks (residual order, oracles, ...)")
    _add_config_flags(p)
    p.add_argument("--check", action="append", choices=ex.VALIDATE_CHECKS + ("all",),
                   help="repeatable; default: residual and l1-order")

    sub.add_parser("list-presets", help="list named data presets and source profiles")
    return parser


def _join_negative_lists(argv):
    """Turn ``--z -5,-1`` into ``--z=-5,-1`` so argparse does not see an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _floats(text, field):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"flag --{field}: expected comma-separated numbers, got {text!r}") from None


def load_config(args) -> ExperimentConfig:
    overrides = {field: getattr(args, flag) for flag, field in CONFIG_FLAGS.items()
                 if getattr(args, flag, None) is not None}
    labels = {field: f"flag --{flag.replace('_', '-')}" for flag, field in CONFIG_FLAGS.items()}
    if args.config:
        return ExperimentConfig.from_file(args.config, overrides, labels)
    return ExperimentConfig.defaults(overrides, labels)


def output_dir(args, cfg: ExperimentConfig | None) -> str | None:
    if getattr(args, "out", None):
        return args.out
    if os.environ.get(OUTDIR_ENV):
        return os.environ[OUTDIR_ENV]
    return cfg.get("output", "dir") if cfg is not None else None


RUNNERS = {
    "forward": ex.run_forward,
    "backward": ex.run_backward,
    "roundtrip": ex.run_roundtrip,
    "illposed-demo": ex.run_illposed,
    "conditional-stability": ex.run_conditional,
}


def _run(args):
    if args.command == "list-presets":
        print(list_presets())
        return None, None
    if args.command == "mlf-eval":
        rhos = _floats(args.rho, "rho")
        q = _floats(args.q, "q") if args.q else None
        z = _floats(args.z, "z")
        settings = MLFSettings(z_switch=args.z_switch) if args.z_switch else MLFSettings()
        try:
            report = ex.run_mlf_eval(rhos, q, args.beta0, z, args.method, settings)
        except FractobackError as exc:
            if isinstance(exc, ValueError):
                raise ConfigError(str(exc)) from None
            raise
        row = report.tables["value"].rows[0]
        print(f"value = {row[0]!r}\nmethod = {row[1]}\nest_abs_error = {row[2]:.3e}")
        return report, args.out or os.environ.get(OUTDIR_ENV)
    cfg = load_config(args)
    if args.command == "validate":
        checks = args.check or ["residual", "l1-order"]
        if "all" in checks:
            checks = list(ex.VALIDATE_CHECKS)
        report = ex.run_validate(cfg, checks)
    else:
        report = RUNNERS[args.command](cfg)
    return report, output_dir(args, cfg)


def main(argv=None) -> int:
    argv = _join_negative_lists(sys.argv[1:] if argv is None else list(argv))
    args = build_parser().parse_args(argv)
    try:
        report, outdir = _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FractobackError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if report is None:
        return EXIT_OK
    if outdir:
        try:
            paths = report.write(outdir)
        except OSError as exc:
            print(f"cannot write output to {outdir}: {exc}", file=sys.stderr)
            return EXIT_IO
        for path in paths:
            print(f"wrote {path}")
    summary = {k: v for k, v in report.summary().items() if k in ("constants", "flags", "passed")}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
