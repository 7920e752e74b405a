"""Exact operator calculus for weighted shifts on truncated generalized Fock spaces."""
from .coeffs import (CoeffTable, dunkl_example_entry, entry_formula, gamma_closed,
                     gamma_recurrence, lambda_closed, lambda_recurrence, stirling)
from .diagring import DiagonalOp, c_sum, d_zero, diag_shift, partial_trace
from .opcalc import (OperatorWord, ShiftOp, TruncMatrix, apply, commutator, dunkl_apply,
                     parse_word, standard_ops, to_matrix, weighted_adjoint)
from .scalar import EXACT, FLOAT, EngineMode, format_scalar, gamma_fn, parse_mode
from .suite import DEFAULT_CONFIG, run_suite
from .verify import ConfigError, VerifyReport, run_identity
from .weights import WeightSequence, inner_product, kernel_eval, parse_family

__all__ = [
    "CoeffTable", "ConfigError", "DEFAULT_CONFIG", "DiagonalOp", "EXACT", "EngineMode", "FLOAT",
    "OperatorWord", "ShiftOp", "TruncMatrix", "VerifyReport", "WeightSequence", "apply",
    "c_sum", "commutator", "d_zero", "diag_shift", "dunkl_apply", "dunkl_example_entry",
    "entry_formula", "format_scalar", "gamma_closed", "gamma_fn", "gamma_recurrence",
    "inner_product", "kernel_eval", "lambda_closed", "lambda_recurrence", "parse_family",
    "parse_mode", "parse_word", "partial_trace", "run_identity", "run_suite", "standard_ops",
    "stirling", "to_matrix", "weighted_adjoint",
]
