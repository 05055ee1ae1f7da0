"""Quantum reservoir computing for weekly price forecasting."""

from qrc.errors import (
    AlignmentError,
    CapacityError,
    ConfigurationError,
    ContractError,
    DomainError,
    FormatError,
)

__all__ = [
    "AlignmentError",
    "CapacityError",
    "ConfigurationError",
    "ContractError",
    "DomainError",
    "FormatError",
]
