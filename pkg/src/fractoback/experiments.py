"""Experiment pipelines and numerical checks behind the CLI subcommands.

Each function returns an :class:`EvalReport` whose flags decide the exit
status. Random families draw from ``numpy.random.default_rng(seed)`` with
the seed recorded in the report config.
"""
from __future__ import annotations

import tempfile
import time
from pathlib import Path

import numpy as np
from scipy.special import erfcx

from .backward import (
    BackwardProblemSpec,
    backward_solve,
    conditional_stability_check,
    illposedness_demo,
    roundtrip,
    two_sided_check,
)
from .caputo import TimeGrid, caputo_l1, observed_order, residual
from .config import ExperimentConfig
from .forward import forward_solve, geometric_times, smoothing_check
from .mlf import (
    EvalResult,
    FractionalOrders,
    Method,
    MLArguments,
    MLFSettings,
    MLParams,
    invert_rows,
    mlf_asymptotic,
    mlf_eval,
    mlf_oracle,
    mlf_series,
    relaxation,
    relaxation_oracle,
)
from .presets import PROFILES
from .report import EvalReport, Table, fit_loglog_slope
from .sources import SeparableSource
from .spectral import DiagonalOperator, fractional_norm


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        report = fn(*args, **kwargs)
        report.timing["wall_seconds"] = time.perf_counter() - t0
        return report

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def run_mlf_eval(rhos, weights, beta0: float, z, method: str = "auto",
                 settings: MLFSettings | None = None) -> EvalReport:
    """Evaluate ``E_{rho', beta0}(z)`` for the shifted indices of ``rhos``."""
    orders = FractionalOrders(rhos, weights)
    settings = settings or MLFSettings()
    params = MLParams.for_orders(orders, beta0)
    args = MLArguments(z)
    if method == "auto":
        res = mlf_eval(params, args, settings)
    elif method == "series":
        res = mlf_series(params, args, settings.series_tol, settings.kmax)
    elif method == "asymptotic":
        res = mlf_asymptotic(params, args, p=2)
    elif method == "contour":
        values, est = invert_rows(params.beta0, params.betas, -np.asarray(args.z)[None, :],
                                  n=settings.contour_nodes)
        res = EvalResult(float(values[0]), Method.CONTOUR, float(est[0]))
    elif method == "oracle":
        res = mlf_oracle(params, args)
    else:
        raise ValueError(f"unknown method {method!r}")
    table = Table(["value", "method", "est_abs_error"])
    table.add(res.value, res.method.value, res.est_abs_error)
    report = EvalReport("mlf_eval", config={"rhos": list(orders.rhos), "weights": list(orders.weights),
                                             "beta0": beta0, "z": list(args.z), "method": method},
                        tables={"value": table})
    report.constants.update({"value": res.value, "est_abs_error": res.est_abs_error})
    report.flags["finite"] = bool(np.isfinite(res.value))
    return report


def _output_times(cfg: ExperimentConfig) -> np.ndarray:
    n, t_min = cfg.get("problem", "times"), cfg.get("problem", "t_min")
    if t_min > 0:
        return geometric_times(cfg.T, n, t_min)
    return np.linspace(0.0, cfg.T, n)


@_timed
def run_forward(cfg: ExperimentConfig) -> EvalReport:
    """Trajectory, smoothing ratio and endpoint constant over a random family."""
    op, orders = cfg.operator(), cfg.orders()
    quad, settings = cfg.quad_settings(), cfg.mlf_settings()
    phi, f = cfg.phi(), cfg.source()
    eps = cfg.get("source", "epsilon")
    traj = forward_solve(op, orders, phi, f, _output_times(cfg), quad, settings)

    table = Table(["t", "k", "u_k", "norm1", "norm0"])
    for i, t in enumerate(traj.times):
        for k in range(op.n_modes):
            table.add(float(t), k + 1, traj.states[i, k], traj.norm1[i], traj.norm0[i])
    report = EvalReport("forward", config=cfg.echo(), tables={"trajectory": table})
    report.flags["initial_state_exact"] = bool(
        traj.times[0] != 0 or np.array_equal(traj.states[0], phi)
    )
    if np.any(phi) or not f.is_zero:
        geo = forward_solve(op, orders, phi, f, geometric_times(cfg.T, 30), quad, settings)
        report.merge(smoothing_check(geo, phi, f, orders, eps, quad, settings))
    report.merge(endpoint_constant(op, orders, cfg.T, f, eps, cfg.get("experiment", "cases"),
                                   cfg.seed, quad, settings))
    return report


def endpoint_constant(op: DiagonalOperator, orders: FractionalOrders, T: float, f, eps: float,
                      count: int, seed: int, quad=None, settings=None) -> EvalReport:
    """``sup ||u(T)||_1 / (||phi|| + max ||f||_eps)`` over random ``phi``.

    The constant is fitted on the first half of the family and checked on
    the whole; it passes when the sup grows by less than 10%.
    """
    kw = {k: v for k, v in (("quad", quad), ("settings", settings)) if v is not None}
    phis = np.random.default_rng(seed).standard_normal((count, op.n_modes))
    f_norm = f.max_norm(op, eps, T)
    ratios = np.empty(count)
    table = Table(["case", "norm1_uT", "ratio"])
    for i, phi in enumerate(phis):
        uT = forward_solve(op, orders, phi, f, [T], **kw)
        ratios[i] = uT.norm1[0] / (np.linalg.norm(phi) + f_norm)
        table.add(i, float(uT.norm1[0]), float(ratios[i]))
    half = float(ratios[: count // 2].max())
    full = float(ratios.max())
    report = EvalReport("endpoint", tables={"endpoint": table})
    report.constants.update({"endpoint_C_half": half, "endpoint_C": full})
    report.flags["endpoint_bounded"] = bool(np.isfinite(full) and full <= 1.1 * half)
    return report


@_timed
def run_backward(cfg: ExperimentConfig) -> EvalReport:
    """Reconstruct ``u(0)`` from the configured final data."""
    op, orders = cfg.operator(), cfg.orders()
    quad, settings = cfg.quad_settings(), cfg.mlf_settings()
    f = cfg.source()
    spec = BackwardProblemSpec(op, orders, cfg.T, cfg.final_data(), f)
    res = backward_solve(spec, eps=cfg.get("source", "epsilon"), quad=quad, settings=settings)
    again = forward_solve(op, orders, res.phi_hat, f, [cfg.T], quad, settings).final
    scale = np.linalg.norm(spec.Phi) or 1.0
    hit_err = float(np.linalg.norm(again - spec.Phi) / scale)

    table = Table(["k", "lambda_k", "D_k", "inv_D_k", "Phi_k", "phi_hat_k"])
    for k in range(op.n_modes):
        table.add(k + 1, op.eigenvalues[k], res.denominators[k], res.amplification[k],
                  spec.Phi[k], res.phi_hat[k])
    D = res.denominators
    report = EvalReport("backward", config=cfg.echo(), tables={"modes": table})
    report.constants.update(res.diagnostics)
    report.constants["final_data_rel_error"] = hit_err
    report.flags["denominators_in_range"] = bool(np.all((D > 0) & (D <= 1)))
    report.flags["amplification_nondecreasing"] = bool(np.all(np.diff(res.amplification) >= 0))
    report.flags["final_data_ok"] = hit_err <= 1e-8
    return report


@_timed
def run_roundtrip(cfg: ExperimentConfig) -> EvalReport:
    report = roundtrip(cfg.operator(), cfg.orders(), cfg.phi(), cfg.source(), cfg.T,
                       cfg.quad_settings(), cfg.mlf_settings())
    report.config = cfg.echo()
    return report


@_timed
def run_illposed(cfg: ExperimentConfig) -> EvalReport:
    e = cfg.values["experiment"]
    report = illposedness_demo(cfg.operator(), cfg.orders(), cfg.T, e["eps"],
                               (e["k_min"], e["k_max"]), e["noise"], settings=cfg.mlf_settings())
    report.config = cfg.echo()
    return report


def stability_family(op: DiagonalOperator, count: int, seed: int, eps: float,
                     source_scale: float = 0.1, epsilon_reg: float = 0.5):
    """``count`` cases ``(phi, f, B0)`` with ``B0 = ||phi||_eps``.

    Sources are ``source_scale * g * exp(-t)`` with ``g_k ~ N(0,1) / k^2``.
    """
    rng = np.random.default_rng(seed)
    k = np.arange(1, op.n_modes + 1, dtype=float)
    cases = []
    for _ in range(count):
        phi = rng.standard_normal(op.n_modes)
        g = source_scale * rng.standard_normal(op.n_modes) / k**2
        f = SeparableSource(g, PROFILES["exp"], epsilon_reg, label="random*exp")
        cases.append((phi, f, float(fractional_norm(op, phi, eps))))
    return cases


@_timed
def run_conditional(cfg: ExperimentConfig) -> EvalReport:
    op = cfg.operator()
    e = cfg.values["experiment"]
    cases = stability_family(op, 2 * e["cases"], e["seed"], e["eps"],
                             cfg.get("source", "scale") * 0.1, cfg.get("source", "epsilon"))
    report = conditional_stability_check(op, cfg.orders(), cfg.T, e["eps"], cases,
                                         quad=cfg.quad_settings(), settings=cfg.mlf_settings())
    report.config = cfg.echo()
    return report


# numerical checks ----------------------------------------------------------

def check_single_term(rhos=(0.3, 0.5, 0.8), n_points: int = 41, reference=None,
                      settings: MLFSettings | None = None) -> EvalReport:
    """``M = 1`` evaluation against a classical reference on ``z in [-10, 0]``.

    ``reference(rho, beta, z)`` defaults to the multiprecision Talbot
    inversion. The ``rho = 1/2`` case is also compared with
    ``exp(z^2) erfc(-z) = erfcx(-z)`` on ``[-4, 0]``.
    """
    settings = settings or MLFSettings()
    if reference is None:
        def reference(rho, beta, z):
            return mlf_oracle(MLParams(beta, (rho,)), MLArguments((z,)), nodes=40).value
    table = Table(["rho", "z", "value", "reference", "rel_error"])
    worst = 0.0
    for rho in rhos:
        for z in np.linspace(-10.0, 0.0, n_points):
            v = mlf_eval(MLParams(1.0, (rho,)), MLArguments((z,)), settings).value
            ref = reference(rho, 1.0, float(z))
            err = abs(v - ref) / abs(ref)
            worst = max(worst, err)
            table.add(rho, float(z), v, ref, err)
    worst_erfc = 0.0
    for z in np.linspace(-4.0, 0.0, n_points):
        v = mlf_eval(MLParams(1.0, (0.5,)), MLArguments((z,)), settings).value
        worst_erfc = max(worst_erfc, abs(v - erfcx(-z)) / erfcx(-z))
    report = EvalReport("single_term", tables={"values": table})
    report.constants.update({"max_rel_error": worst, "max_rel_error_erfc": worst_erfc})
    report.flags["single_term_1e-10"] = worst <= 1e-10
    report.flags["erfc_1e-8"] = worst_erfc <= 1e-8
    return report


def check_asymptotic(rhos=(0.8, 0.4), weights=(1.0, 1.0), z_rest: float = -1.0,
                     z_points=None, reference=None) -> EvalReport:
    """Two-term expansion of ``E_{rho', rho_1 + 1}`` against a reference.

    Passes if the relative error at ``|z_1| = 1e3`` is at most ``1e-4`` and
    the fitted log-log slope over ``[1e2, 1e4]`` is ``-3 +- 0.3``.
    """
    orders = FractionalOrders(rhos, weights)
    params = MLParams.for_orders(orders, orders.rho1 + 1.0)
    if reference is None:
        def reference(args):
            return mlf_oracle(params, args, nodes=48).value
    zs = np.geomspace(1e2, 1e4, 9) if z_points is None else np.asarray(z_points, float)
    zs = np.union1d(zs, [1e3])
    table = Table(["abs_z1", "asymptotic", "reference", "abs_error", "rel_error"])
    abs_errs, rel_errs = [], []
    for a in zs:
        args = MLArguments((-float(a),) + (z_rest,) * (orders.M - 1))
        v = mlf_asymptotic(params, args, p=2).value
        ref = reference(args)
        abs_errs.append(abs(v - ref))
        rel_errs.append(abs_errs[-1] / abs(ref))
        table.add(float(a), v, ref, abs_errs[-1], rel_errs[-1])
    err_1e3 = rel_errs[int(np.argmin(np.abs(zs - 1e3)))]
    slope = fit_loglog_slope(zs, abs_errs)
    report = EvalReport("asymptotic", tables={"errors": table})
    report.constants.update({"rel_error_at_1e3": err_1e3, "abs_error_slope": slope})
    report.flags["rel_error_1e-4"] = err_1e3 <= 1e-4
    report.flags["slope_minus_3"] = abs(slope + 3.0) <= 0.3
    return report


ORACLE_CASES = (
    ((0.5,), (1.0,)),
    ((0.8, 0.4), (1.0, 1.0)),
    ((0.7, 0.5, 0.1), (1.0, 2.0, 0.5)),
)


def check_oracle_grid(cases=ORACLE_CASES, size: int = 10, rtol: float = 1e-8,
                      settings: MLFSettings | None = None) -> EvalReport:
    """Relaxation against Laplace inversion on a ``size x size`` grid.

    ``t`` runs over ``[0.1, 1]`` and ``lam`` is chosen so that
    ``lam t^rho_1`` covers ``[1e-2, 1e6]``.
    """
    settings = settings or MLFSettings()
    table = Table(["M", "lambda", "t", "x", "value", "oracle", "rel_error"])
    worst = 0.0
    for rhos, weights in cases:
        orders = FractionalOrders(rhos, weights)
        ts = np.geomspace(0.1, 1.0, size)
        lams = np.geomspace(1e-2 / 0.1**orders.rho1, 1e6, size)
        vals = relaxation(orders, lams[:, None], ts[None, :], settings=settings)
        for i, lam in enumerate(lams):
            for j, t in enumerate(ts):
                ref = relaxation_oracle(orders, float(lam), float(t))
                err = abs(vals[i, j] - ref) / abs(ref)
                worst = max(worst, err)
                table.add(orders.M, float(lam), float(t), float(lam * t**orders.rho1),
                          float(vals[i, j]), ref, err)
    report = EvalReport("oracle", tables={"grid": table})
    report.constants["max_rel_error"] = worst
    report.flags["oracle_agreement"] = worst <= rtol
    return report


def check_classical_limit(n_modes: int = 16, T: float = 1.0, seed: int = 0,
                          tol: float = 1e-8) -> EvalReport:
    """``rho_1 = 1``: heat semigroup for the initial state, Duhamel for a constant source."""
    op = DiagonalOperator.dirichlet1d(n_modes)
    orders = FractionalOrders((1.0,), test_mode=True)
    lam = op.eigenvalues
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal(n_modes)
    times = np.linspace(0.0, T, 11)
    traj = forward_solve(op, orders, phi, None, times)
    exact = phi * np.exp(-np.outer(times, lam))
    err_h = float(np.max(np.abs(traj.states - exact)) / np.max(np.abs(phi)))

    g = rng.standard_normal(n_modes)
    f = SeparableSource(g, PROFILES["const"])
    traj_f = forward_solve(op, orders, np.zeros(n_modes), f, times[1:])
    exact_f = g / lam * -np.expm1(-np.outer(times[1:], lam))
    err_s = float(np.max(np.abs(traj_f.states - exact_f) / np.abs(exact_f)))

    table = Table(["case", "max_error"])
    table.add("semigroup", err_h)
    table.add("duhamel", err_s)
    report = EvalReport("classical_limit", tables={"errors": table})
    report.constants.update({"semigroup_error": err_h, "duhamel_rel_error": err_s})
    report.flags["semigroup_1e-8"] = err_h <= tol
    report.flags["duhamel_1e-8"] = err_s <= tol
    return report


def check_residual(op: DiagonalOperator, orders: FractionalOrders, phi, f, T: float,
                   steps: int = 40, levels: int = 4, quad=None, settings=None) -> EvalReport:
    """Equation residual of forward solutions under ``h``-halving.

    The L1 history runs from ``t = 0``; the max residual is taken over
    ``t >= T/20``. Passes if the fitted order is at least ``2 - rho_1 - 0.2``.
    """
    kw = {k: v for k, v in (("quad", quad), ("settings", settings)) if v is not None}
    grid = TimeGrid(0.0, T, steps)
    hs, errs = [], []
    table = Table(["h", "max_residual"])
    for _ in range(levels):
        traj = forward_solve(op, orders, phi, f, grid.nodes, **kw)
        r = residual(op, orders, traj, f)
        mask = grid.nodes[1:] >= T / 20 * (1 - 1e-12)
        hs.append(grid.h)
        errs.append(float(np.max(np.abs(r[mask]))))
        table.add(grid.h, errs[-1])
        grid = grid.refined()
    order = observed_order(hs, errs)
    target = 2.0 - orders.rho1 - 0.2
    report = EvalReport("residual", tables={"convergence": table})
    report.constants.update({"observed_order": order, "required_order": target})
    report.flags["residual_order"] = order >= target
    return report


def check_l1_order(rhos=(0.3, 0.5, 0.9), steps=(40, 80, 160, 320), tol: float = 0.15) -> EvalReport:
    """L1 scheme on ``t^2``; the fitted order must be within ``tol`` of ``2 - rho``."""
    from math import gamma

    table = Table(["rho", "h", "max_error"])
    report = EvalReport("l1_order", tables={"errors": table})
    for rho in rhos:
        hs, errs = [], []
        for n in steps:
            g = TimeGrid(0.0, 1.0, n)
            t = g.nodes
            d = caputo_l1(t**2, rho, g)
            e = float(np.max(np.abs(d - 2 * t[1:] ** (2 - rho) / gamma(3 - rho))))
            hs.append(g.h)
            errs.append(e)
            table.add(rho, g.h, e)
        p = observed_order(hs, errs)
        report.constants[f"order_rho_{rho:g}"] = p
        report.flags[f"order_rho_{rho:g}"] = abs(p - (2 - rho)) <= tol
    return report


def check_determinism(runner, cfg: ExperimentConfig) -> EvalReport:
    """Run ``runner(cfg)`` twice and compare the CSV files byte for byte."""
    with tempfile.TemporaryDirectory() as tmp:
        contents = []
        for rep in ("a", "b"):
            out = Path(tmp) / rep
            paths = runner(cfg).write(out)
            contents.append({p.name: p.read_bytes() for p in paths if p.suffix == ".csv"})
    same = contents[0] == contents[1] and bool(contents[0])
    table = Table(["file", "identical"])
    for name in sorted(contents[0]):
        table.add(name, int(contents[0][name] == contents[1].get(name)))
    report = EvalReport("determinism", tables={"files": table})
    report.flags["csv_identical"] = same
    return report


def run_validate(cfg: ExperimentConfig, checks) -> EvalReport:
    """Run the named checks and merge them into one report."""
    op, orders = cfg.operator(), cfg.orders()
    quad, settings = cfg.quad_settings(), cfg.mlf_settings()
    e = cfg.values["experiment"]
    registry = {
        "single-term": lambda: check_single_term(settings=settings),
        "asymptotic": lambda: check_asymptotic(),
        "oracle": lambda: check_oracle_grid(settings=settings),
        "classical-limit": lambda: check_classical_limit(seed=e["seed"]),
        "residual": lambda: check_residual(op, orders, cfg.phi(), cfg.source(), cfg.T,
                                           e["steps"], e["levels"], quad, settings),
        "l1-order": lambda: check_l1_order(),
        "roundtrip": lambda: run_roundtrip(cfg),
        "illposed": lambda: run_illposed(cfg),
        "two-sided": lambda: two_sided_check(orders, cfg.T, op.n_modes, 2 * e["cases"],
                                             e["seed"], settings=settings),
        "conditional": lambda: run_conditional(cfg),
        "determinism": lambda: check_determinism(run_roundtrip, cfg),
    }
    unknown = [c for c in checks if c not in registry]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; choose from {sorted(registry)}")
    t0 = time.perf_counter()
    report = EvalReport("validate", config=cfg.echo())
    for name in checks:
        t1 = time.perf_counter()
        sub = registry[name]()
        report.merge(sub, prefix=f"{name}.")
        report.timing[name] = time.perf_counter() - t1
    report.timing["wall_seconds"] = time.perf_counter() - t0
    return report


VALIDATE_CHECKS = ("single-term", "asymptotic", "oracle", "classical-limit", "residual",
                   "l1-order", "roundtrip", "illposed", "two-sided", "conditional",
                   "determinism")

__all__ = [
    "Method", "VALIDATE_CHECKS", "check_asymptotic", "check_classical_limit",
    "check_determinism", "check_l1_order", "check_oracle_grid", "check_residual",
    "check_single_term", "endpoint_constant", "run_backward", "run_conditional",
    "run_forward", "run_illposed", "run_mlf_eval", "run_roundtrip", "run_validate",
    "stability_family",
]
