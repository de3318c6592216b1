"""Certified entropy-rate bounds for binary hidden Markov processes."""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND
from .bounds import BoundsRow, ConvergenceReport, PathState, run
from .errors import CapacityError, InsufficientDataError, LengthError, ParameterError
from .model import ContractionInfo, ModelParams, contraction, validate

__all__ = [
    "BACKEND",
    "BoundsRow",
    "CapacityError",
    "ContractionInfo",
    "ConvergenceReport",
    "InsufficientDataError",
    "LengthError",
    "ModelParams",
    "ParameterError",
    "PathState",
    "contraction",
    "run",
    "validate",
]
