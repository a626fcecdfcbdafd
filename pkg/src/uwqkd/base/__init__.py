"""Base utilities shared by the physics and harness modules."""

from uwqkd.base.errors import (
    CalibrationError,
    ConfigError,
    EmptyEnsembleError,
    EnvelopeError,
    MieError,
    QuadratureError,
    UndefinedQBERError,
    UnreachableTargetError,
    UwqkdError,
)
from uwqkd.base.streams import photon_generator, stream_key

__all__ = [
    "CalibrationError",
    "ConfigError",
    "EmptyEnsembleError",
    "EnvelopeError",
    "MieError",
    "QuadratureError",
    "UndefinedQBERError",
    "UnreachableTargetError",
    "UwqkdError",
    "photon_generator",
    "stream_key",
]
