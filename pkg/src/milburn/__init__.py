"""Intrinsic (Milburn) decoherence of a displaced harmonic oscillator.

``fock`` holds the truncated Fock-space primitives, ``closed_form`` the
exact first moments, ``evolution`` the numerical engines and ``harness``
the config-driven runner behind the ``milburn`` command.
"""

from .errors import (
    ConfigError,
    DimensionMismatch,
    MilburnError,
    NotHermitian,
    ParseError,
    PlanOverflow,
    StepSizeUnderflow,
    TruncationError,
    UnknownMethod,
    ValidationError,
)
from .fock import OscillatorParams, SqueezeParameter, TruncationPolicy
from .states import CoherentSpec, FockSpec, SqueezedSpec

__version__ = "0.1.0"

__all__ = [
    "CoherentSpec",
    "ConfigError",
    "DimensionMismatch",
    "FockSpec",
    "MilburnError",
    "NotHermitian",
    "OscillatorParams",
    "ParseError",
    "PlanOverflow",
    "SqueezeParameter",
    "SqueezedSpec",
    "StepSizeUnderflow",
    "TruncationError",
    "TruncationPolicy",
    "UnknownMethod",
    "ValidationError",
]
