"""Multinomial Mittag-Leffler function and the kernels built on it."""
from .asymptotic import asymptotic_coefficients, mlf_asymptotic, relaxation_leading
from .contour import invert_rows
from .evaluate import eval_rows, mlf_eval
from .kernels import kernel_in_s, propagator, relaxation
from .oracle import mlf_oracle, propagator_oracle, relaxation_oracle, talbot
from .series import mlf_series
from .types import (
    DEFAULT_SETTINGS,
    EvalResult,
    FractionalOrders,
    Method,
    MLArguments,
    MLFSettings,
    MLParams,
)

__all__ = [
    "DEFAULT_SETTINGS", "EvalResult", "FractionalOrders", "Method", "MLArguments",
    "MLFSettings", "MLParams", "asymptotic_coefficients", "eval_rows", "invert_rows",
    "kernel_in_s", "mlf_asymptotic", "mlf_eval", "mlf_oracle", "mlf_series",
    "propagator", "propagator_oracle", "relaxation", "relaxation_leading",
    "relaxation_oracle", "talbot",
]
