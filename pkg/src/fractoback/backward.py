"""Backward problem: recover ``u(0)`` from the final state ``u(T)``.

Each mode is divided by the denominator ``D_k = omega(T; lam_k)``; no
regularisation is applied. A source is handled by splitting ``u = v + w``
where ``v`` starts from 0 with the source and ``w`` is homogeneous with
final data ``Phi - v(T)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, PrioriViolation
from .forward import DEFAULT_QUAD, QuadratureSettings, forward_solve
from .mlf import DEFAULT_SETTINGS, FractionalOrders, MLFSettings, relaxation
from .report import EvalReport, Table, fit_loglog_slope
from .sources import SourceTerm, ZeroSource
from .spectral import DiagonalOperator, fractional_norm


def denominator(orders: FractionalOrders, lam, T: float,
                settings: MLFSettings = DEFAULT_SETTINGS):
    """``D(lam) = omega(T; lam)``, positive and at most 1."""
    if not T > 0:
        raise InvalidParams("final time T must be positive")
    return relaxation(orders, lam, T, settings=settings)


@dataclass
class BackwardProblemSpec:
    """Final data ``Phi`` at time ``T``.

    ``Phi`` is expected in ``D(A)``; for a truncated vector this is always
    finite, so ``allow_rough`` only suppresses the non-finite check used by
    deliberately ill-posed demos.
    """

    op: DiagonalOperator
    orders: FractionalOrders
    T: float
    Phi: np.ndarray
    f: SourceTerm | None = None
    allow_rough: bool = False

    def __post_init__(self):
        if not (self.T > 0 and np.isfinite(self.T)):
            raise InvalidParams("final time T must be positive and finite")
        self.Phi = self.op.check(self.Phi)
        if self.Phi.ndim != 1:
            raise InvalidParams("final data must be a single coefficient vector")
        if self.f is None:
            self.f = ZeroSource(self.op.n_modes)
        if self.f.n_modes != self.op.n_modes:
            raise InvalidParams(f"source has {self.f.n_modes} modes, operator {self.op.n_modes}")
        if not self.allow_rough and not np.isfinite(self.norm1):
            raise InvalidParams("final data is not in D(A)")

    @property
    def norm1(self) -> float:
        return float(fractional_norm(self.op, self.Phi, 1.0))


@dataclass
class ReconstructionResult:
    phi_hat: np.ndarray
    denominators: np.ndarray
    amplification: np.ndarray
    source_part: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def backward_solve_homogeneous(spec: BackwardProblemSpec,
                               settings: MLFSettings = DEFAULT_SETTINGS) -> ReconstructionResult:
    """``phi_k = Phi_k / D_k`` for a problem without source."""
    if not spec.f.is_zero:
        raise InvalidParams("homogeneous reconstruction needs a zero source")
    D = np.atleast_1d(denominator(spec.orders, spec.op.eigenvalues, spec.T, settings))
    phi_hat = spec.Phi / D
    return ReconstructionResult(
        phi_hat=phi_hat,
        denominators=D,
        amplification=1.0 / D,
        source_part=np.zeros_like(phi_hat),
        diagnostics={"norm_phi_hat": float(np.linalg.norm(phi_hat)), "norm1_Phi": spec.norm1},
    )


def backward_solve(spec: BackwardProblemSpec, eps: float | None = None,
                   quad: QuadratureSettings = DEFAULT_QUAD,
                   settings: MLFSettings = DEFAULT_SETTINGS) -> ReconstructionResult:
    """Reconstruct ``u(0)`` with a source by the ``v + w`` splitting.

    ``eps`` is the smoothness index used for ``max_t ||f(t)||_eps`` in the
    reported stability ratio (default: the source's declared index).
    """
    if spec.f.is_zero:
        v_T = np.zeros(spec.op.n_modes)
    else:
        v = forward_solve(spec.op, spec.orders, np.zeros(spec.op.n_modes), spec.f,
                          [spec.T], quad, settings)
        v_T = v.final
    w_spec = BackwardProblemSpec(spec.op, spec.orders, spec.T, spec.Phi - v_T,
                                 allow_rough=spec.allow_rough)
    res = backward_solve_homogeneous(w_spec, settings)
    res.source_part = v_T
    eps = spec.f.epsilon_reg if eps is None else eps
    f_norm = spec.f.max_norm(spec.op, eps, spec.T)
    denom = spec.norm1 + f_norm
    res.diagnostics.update({
        "norm1_Phi": spec.norm1,
        "source_norm_eps": f_norm,
        "stability_ratio": float(np.linalg.norm(res.phi_hat) / denom) if denom > 0 else 0.0,
    })
    return res


def roundtrip(op: DiagonalOperator, orders: FractionalOrders, phi, f: SourceTerm | None,
              T: float, quad: QuadratureSettings = DEFAULT_QUAD,
              settings: MLFSettings = DEFAULT_SETTINGS) -> EvalReport:
    """Forward to ``Phi = u(T)``, reconstruct, and forward the reconstruction again."""
    phi = op.check(phi)
    Phi = forward_solve(op, orders, phi, f, [T], quad, settings).final
    spec = BackwardProblemSpec(op, orders, T, Phi, f)
    res = backward_solve(spec, quad=quad, settings=settings)
    again = forward_solve(op, orders, res.phi_hat, f, [T], quad, settings).final
    rec_err = float(np.linalg.norm(res.phi_hat - phi) / np.linalg.norm(phi))
    hit_err = float(np.linalg.norm(again - Phi) / np.linalg.norm(Phi))

    table = Table(["k", "lambda_k", "D_k", "inv_D_k", "Phi_k", "phi_k", "phi_hat_k"])
    for k in range(op.n_modes):
        table.add(k + 1, op.eigenvalues[k], res.denominators[k], res.amplification[k],
                  Phi[k], phi[k], res.phi_hat[k])
    report = EvalReport("roundtrip", tables={"modes": table})
    report.constants.update({
        "reconstruction_rel_error": rec_err,
        "final_data_rel_error": hit_err,
        "stability_ratio": res.diagnostics["stability_ratio"],
    })
    report.flags["reconstruction_ok"] = rec_err <= 1e-6
    report.flags["final_data_ok"] = hit_err <= 1e-8
    return report


def illposedness_demo(op: DiagonalOperator, orders: FractionalOrders, T: float, eps: float,
                      k_range=(8, 32), noise: float = 0.0, slope_tol: float = 0.05,
                      settings: MLFSettings = DEFAULT_SETTINGS) -> EvalReport:
    """Final data ``lam_k^(eps-1) e_k`` shrinks in ``H`` while ``u(0)`` grows.

    ``noise`` adds ``noise * e_k`` to each final state and records the
    resulting reconstruction error ``noise / D_k``.
    """
    if not eps > 0:
        raise InvalidParams("eps must be positive")
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    if not 1 <= k_lo < k_hi <= op.n_modes:
        raise InvalidParams(f"k range {k_lo}..{k_hi} must lie within 1..{op.n_modes}")
    ks = np.arange(k_lo, k_hi + 1)
    lam = op.eigenvalues[ks - 1]
    Phi = np.zeros((ks.size, op.n_modes))
    Phi[np.arange(ks.size), ks - 1] = lam ** (eps - 1.0)
    D = np.empty(ks.size)
    u0_norm = np.empty(ks.size)
    for i in range(ks.size):
        res = backward_solve_homogeneous(BackwardProblemSpec(op, orders, T, Phi[i]), settings)
        D[i] = res.denominators[ks[i] - 1]
        u0_norm[i] = np.linalg.norm(res.phi_hat)
    Phi_norm = fractional_norm(op, Phi, 0.0)
    Phi_norm1 = fractional_norm(op, Phi, 1.0)
    amp = 1.0 / D

    cols = ["k", "lambda_k", "norm_Phi", "norm1_Phi", "norm_u0", "inv_D_k"]
    if noise:
        cols.append("noise_error")
    table = Table(cols)
    for i, k in enumerate(ks):
        row = [int(k), lam[i], Phi_norm[i], Phi_norm1[i], u0_norm[i], amp[i]]
        if noise:
            row.append(abs(noise) * amp[i])
        table.add(*row)

    slope = fit_loglog_slope(lam, amp)
    report = EvalReport("illposed", tables={"modes": table})
    report.constants["slope_inv_D_vs_lambda"] = slope
    report.constants["leading_constant"] = float(np.mean(lam * D))
    report.flags["norm_Phi_decreasing"] = bool(np.all(np.diff(Phi_norm) < 0))
    report.flags["norm_u0_increasing"] = bool(np.all(np.diff(u0_norm) > 0))
    report.flags["norm1_Phi_increasing"] = bool(np.all(np.diff(Phi_norm1) > 0))
    report.flags["slope_near_one"] = abs(slope - 1.0) <= slope_tol
    return report


def random_family(n_modes: int, count: int, seed: int, decay: float = 0.0) -> np.ndarray:
    """``count`` coefficient vectors with iid normal entries times ``k^-decay``."""
    rng = np.random.default_rng(seed)
    k = np.arange(1, n_modes + 1, dtype=float)
    return rng.standard_normal((count, n_modes)) * k**-decay


def two_sided_ratios(op: DiagonalOperator, orders: FractionalOrders, T: float, phis,
                     settings: MLFSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """``||u(T)||_1 / ||u(0)||`` for each homogeneous initial state in ``phis``."""
    phis = op.check(phis)
    D = np.atleast_1d(denominator(orders, op.eigenvalues, T, settings))
    return fractional_norm(op, phis * D, 1.0) / fractional_norm(op, phis, 0.0)


def two_sided_check(orders: FractionalOrders, T: float, n_modes: int = 32, count: int = 100,
                    seed: int = 0, rel_change: float = 0.1,
                    settings: MLFSettings = DEFAULT_SETTINGS) -> EvalReport:
    """Ratio interval over a random family at ``N`` and ``2N`` Dirichlet modes.

    The same seed generates both families, so the first ``N`` entries of
    every ``2N``-mode vector differ from the ``N``-mode draw; each level is
    an independent sample of its own class.
    """
    table = Table(["n_modes", "case", "ratio"])
    bounds = {}
    for n in (n_modes, 2 * n_modes):
        op = DiagonalOperator.dirichlet1d(n)
        r = two_sided_ratios(op, orders, T, random_family(n, count, seed), settings)
        for i, v in enumerate(r):
            table.add(n, i, float(v))
        bounds[n] = (float(r.min()), float(r.max()))
    (lo1, hi1), (lo2, hi2) = bounds[n_modes], bounds[2 * n_modes]
    report = EvalReport("two_sided", tables={"ratios": table})
    report.constants.update({
        "c1_N": lo1, "c2_N": hi1, "c1_2N": lo2, "c2_2N": hi2,
        "c1_change": abs(lo2 - lo1) / lo1, "c2_change": abs(hi2 - hi1) / hi1,
    })
    report.flags["ratios_positive"] = lo1 > 0 and lo2 > 0
    report.flags["interval_stable"] = (report.constants["c1_change"] < rel_change
                                       and report.constants["c2_change"] < rel_change)
    return report


@dataclass(frozen=True)
class PrioriBound:
    """A priori bound ``||u(0)||_eps <= B0``."""

    epsilon: float
    B0: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidParams("a priori smoothness index must be positive")
        if not self.B0 > 0:
            raise InvalidParams("a priori radius B0 must be positive")

    def check(self, op: DiagonalOperator, phi, rtol: float = 1e-12):
        n = float(fractional_norm(op, phi, self.epsilon))
        if n > self.B0 * (1 + rtol):
            raise PrioriViolation(f"||phi||_{self.epsilon:g} = {n:.6g} exceeds B0 = {self.B0:.6g}")
        return n


def stability_quotient(op: DiagonalOperator, orders: FractionalOrders, T: float, phi,
                       f: SourceTerm | None, bound: PrioriBound,
                       quad: QuadratureSettings = DEFAULT_QUAD,
                       settings: MLFSettings = DEFAULT_SETTINGS) -> float:
    """``||phi|| / ([||Phi|| + max ||f||]^(e/(1+e)) B0^(1/(1+e)))`` with ``Phi = u(T)``."""
    bound.check(op, phi)
    f = ZeroSource(op.n_modes) if f is None else f
    Phi = forward_solve(op, orders, phi, f, [T], quad, settings).final
    e = bound.epsilon
    data = float(np.linalg.norm(Phi)) + f.max_norm(op, 0.0, T)
    num = float(np.linalg.norm(phi))
    if num == 0:
        return 0.0
    return num / (data ** (e / (1 + e)) * bound.B0 ** (1 / (1 + e)))


def conditional_stability_check(op: DiagonalOperator, orders: FractionalOrders, T: float,
                                eps: float, cases, scales=None, growth_tol: float = 0.1,
                                homogeneity_tol: float = 1e-8,
                                quad: QuadratureSettings = DEFAULT_QUAD,
                                settings: MLFSettings = DEFAULT_SETTINGS) -> EvalReport:
    """Quotient of the conditional stability estimate over a family of cases.

    ``cases`` is a sequence of ``(phi, f, B0)``. The first half of the
    family gives ``sup Q`` for comparison with the whole family. Every case
    is also rescaled by each factor in ``scales`` (``phi``, ``f`` and ``B0``
    together), under which ``Q`` is exactly invariant.
    """
    cases = list(cases)
    if len(cases) < 2:
        raise InvalidParams("conditional stability check needs at least two cases")
    scales = np.geomspace(1e-3, 1e3, 7) if scales is None else np.asarray(scales, float)
    table = Table(["case", "scale", "Q"])
    Q = np.empty(len(cases))
    worst_var = 0.0
    for i, (phi, f, B0) in enumerate(cases):
        f = ZeroSource(op.n_modes) if f is None else f
        q0 = stability_quotient(op, orders, T, phi, f, PrioriBound(eps, B0), quad, settings)
        Q[i] = q0
        table.add(i, 1.0, q0)
        for s in scales:
            if s == 1.0:
                continue
            qs = stability_quotient(op, orders, T, s * np.asarray(phi), f.scaled(s),
                                    PrioriBound(eps, s * B0), quad, settings)
            table.add(i, float(s), qs)
            worst_var = max(worst_var, abs(qs - q0) / q0 if q0 else abs(qs))
    half = Q[: len(Q) // 2]
    sup_half, sup_all = float(half.max()), float(Q.max())
    report = EvalReport("conditional_stability", tables={"quotients": table})
    report.constants.update({
        "sup_Q_half": sup_half,
        "sup_Q_full": sup_all,
        "sup_growth": sup_all / sup_half - 1.0,
        "scaling_variation": float(worst_var),
    })
    report.flags["Q_finite"] = bool(np.all(np.isfinite(Q)))
    report.flags["scaling_invariant"] = bool(worst_var <= homogeneity_tol)
    report.flags["sup_stable"] = sup_all <= (1 + growth_tol) * sup_half
    return report
