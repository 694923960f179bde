"""Forward and backward problems for multi-term time-fractional diffusion."""
from ._core import BACKEND
from .backward import (
    BackwardProblemSpec,
    PrioriBound,
    ReconstructionResult,
    backward_solve,
    backward_solve_homogeneous,
    conditional_stability_check,
    denominator,
    illposedness_demo,
    roundtrip,
    two_sided_check,
)
from .caputo import TimeGrid, caputo_l1, residual
from .config import ExperimentConfig
from .errors import (
    ConfigError,
    ContourFailure,
    FractobackError,
    GridMismatch,
    GridTooCoarse,
    InvalidOrder,
    InvalidParams,
    LengthMismatch,
    NoConvergence,
    PrioriViolation,
    QuadratureFailure,
    SmallArgument,
)
from .forward import QuadratureSettings, TrajectoryResult, convolve_source, forward_solve, smoothing_check
from .mlf import (
    EvalResult,
    FractionalOrders,
    Method,
    MLArguments,
    MLFSettings,
    MLParams,
    mlf_asymptotic,
    mlf_eval,
    mlf_oracle,
    mlf_series,
    propagator,
    relaxation,
    relaxation_oracle,
)
from .report import EvalReport, Table
from .sources import SampledSource, SeparableSource, SourceKind, ZeroSource
from .spectral import BasisKind, DiagonalOperator, fractional_norm, project, synthesize

__version__ = "0.1.0"
