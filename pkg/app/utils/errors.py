"""
Exception hierarchy

Regime errors mean the parameters sit outside the range where the layered
construction is proven to exist; numerical failures mean a solver did not deliver.
The CLI maps the two families to exit codes 2 and 3.
"""
from __future__ import annotations

from typing import Any


class LayerModelError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 1

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        payload: dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        if self.details:
            payload["details"] = self.details
        return payload


class RegimeError(LayerModelError, ValueError):
    """Raised when parameters fall outside a regime the analysis covers."""

    exit_code = 2


class DomainError(RegimeError):
    """Raised when an argument lies outside an evaluator's domain"""
    pass


class ConfigurationError(LayerModelError, ValueError):
    """Raised for unknown config keys, conflicting flags or missing required options."""

    exit_code = 2


class NumericalFailure(LayerModelError, RuntimeError):
    """Raised when a solver fails to converge or to bracket a root."""

    exit_code = 3


class NewtonDivergence(NumericalFailure):
    """Raised when Newton continuation in eps stalls.

    ``last_converged_eps`` is the smallest eps that still converged, an empirical
    stand-in for the existence bound eps0.
    """

    def __init__(self, message: str, last_converged_eps: float | None = None, **details: Any) -> None:
        super().__init__(message, last_converged_eps=last_converged_eps, **details)
        self.last_converged_eps = last_converged_eps


class ConsistencyError(NumericalFailure):
    """Raised when an inequality that must hold analytically fails numerically"""
    pass


__all__ = [
    "LayerModelError",
    "RegimeError",
    "DomainError",
    "ConfigurationError",
    "NumericalFailure",
    "NewtonDivergence",
    "ConsistencyError",
]
