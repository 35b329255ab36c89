"""Fast source-separation metrics.

bss_eval computes SDR/SIR/SAR between multichannel references and
estimates by reducing each metric to a cosine ratio obtained from a few
structured linear solves; si_sdr is the single-tap special case. See the
submodules for the solver, correlation, and oracle layers.
"""

from .errors import (
    BreakdownError,
    EmptyInputError,
    FastSdrError,
    FilterTooLongError,
    LengthMismatchError,
    LevinsonBreakdownError,
    NonPositivePreconditionerError,
    SingularGramError,
    SingularSystemError,
    SizeCapError,
    SolverError,
    SolverFailureError,
    ValidationError,
    ZeroSignalError,
)
from .metrics import BssEvalResult, CosineMetrics, Diagnostics, bss_eval, db_map, si_sdr
from .signals import EvalConfig, MultichannelSignal, as_signal, normalize_unit_norm

__version__ = "0.1.0"

__all__ = [
    "BreakdownError",
    "BssEvalResult",
    "CosineMetrics",
    "Diagnostics",
    "EmptyInputError",
    "EvalConfig",
    "FastSdrError",
    "FilterTooLongError",
    "LengthMismatchError",
    "LevinsonBreakdownError",
    "MultichannelSignal",
    "NonPositivePreconditionerError",
    "SingularGramError",
    "SingularSystemError",
    "SizeCapError",
    "SolverError",
    "SolverFailureError",
    "ValidationError",
    "ZeroSignalError",
    "as_signal",
    "bss_eval",
    "db_map",
    "normalize_unit_norm",
    "si_sdr",
    "__version__",
]
