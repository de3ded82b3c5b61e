"""Exception hierarchy shared by all modules."""

from __future__ import annotations

__all__ = [
    "SeplsdError",
    "DomainError",
    "DegenerateError",
    "SelectionError",
    "GridError",
    "NoRootError",
    "AmbiguityError",
    "MassError",
    "SimulationSizeError",
]


class SeplsdError(Exception):
    """Base class. ``payload`` carries a JSON-serialisable diagnostic."""

    def __init__(self, message: str, **payload):
        super().__init__(message)
        self.payload = payload


class DomainError(SeplsdError, ValueError):
    """Argument outside the domain where a transform is defined."""


class DegenerateError(SeplsdError):
    """Polynomial with every coefficient below the trim threshold."""


class SelectionError(SeplsdError):
    """No candidate root passed the physical-root filters."""


class GridError(SeplsdError):
    """Evaluation grid does not bracket the support."""


class NoRootError(SeplsdError):
    """Spike level below the phase transition; no outlier exists."""


class AmbiguityError(SeplsdError):
    """More than one candidate survived the inverse-relation filters."""


class MassError(SeplsdError):
    """Density does not integrate to one within tolerance."""


class SimulationSizeError(SeplsdError, MemoryError):
    """Requested matrix exceeds the configured element cap."""
