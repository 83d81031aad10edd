"""Numerics for the partial theta function theta(q, z) = sum q**(j(j+1)/2) z**j."""
from .core import (
    DEFAULT_PRECISION, EvalResult, Precision, check_q, diffeq_residual,
    evaluate, evaluate_dq, evaluate_dz, functional_residual, truncation_order,
)
from .errors import DomainError, NumericalError, PartialThetaError

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRECISION", "EvalResult", "Precision", "check_q", "diffeq_residual",
    "evaluate", "evaluate_dq", "evaluate_dz", "functional_residual", "truncation_order",
    "DomainError", "NumericalError", "PartialThetaError",
]
