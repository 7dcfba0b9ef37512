"""Disaggregated GSNR estimation with coherent SPM accumulation."""
from .core import Amplifier, ChannelConfig, Constellation, FiberSpan, Route
from .errors import (
    ConfigError,
    ConvergenceBudgetError,
    DomainError,
    InvalidParameterError,
    ModeUnsupportedError,
    NonPerturbativeError,
    SpanLedgerError,
)

__version__ = "0.1.0"

__all__ = [
    "Amplifier",
    "ChannelConfig",
    "Constellation",
    "FiberSpan",
    "Route",
    "ConfigError",
    "ConvergenceBudgetError",
    "DomainError",
    "InvalidParameterError",
    "ModeUnsupportedError",
    "NonPerturbativeError",
    "SpanLedgerError",
]
