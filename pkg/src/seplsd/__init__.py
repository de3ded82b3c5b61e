"""Limiting spectral distributions of separable sample covariance matrices.

Free-probability transforms of the base laws (Marchenko-Pastur, shifted
semicircle, exponential Toeplitz), a degree-8 polynomial engine for the
separable model's Cauchy transform, the spiked-model outlier map and its
shrinkage inverse, and Monte Carlo tooling to check all of it.
"""

from .errors import (
    AmbiguityError,
    DegenerateError,
    DomainError,
    GridError,
    MassError,
    NoRootError,
    SelectionError,
    SeplsdError,
    SimulationSizeError,
)
from .lsd import DensityCurve, GridSpec, InversionConfig, cauchy_c, lsd_density, toeplitz_lsd_density
from .spiked import SpikeResult, SpikeSpec, critical_theta, forward_map, g_inverse, shrink
from .transforms import (
    ExponentialToeplitz,
    MarchenkoPastur,
    ModelParams,
    ShiftedSemicircle,
    SupportInterval,
    cauchy,
    m_transform,
    n_composed,
    n_transform,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityError",
    "DegenerateError",
    "DensityCurve",
    "DomainError",
    "ExponentialToeplitz",
    "GridError",
    "GridSpec",
    "InversionConfig",
    "MarchenkoPastur",
    "MassError",
    "ModelParams",
    "NoRootError",
    "SelectionError",
    "SeplsdError",
    "ShiftedSemicircle",
    "SimulationSizeError",
    "SpikeResult",
    "SpikeSpec",
    "SupportInterval",
    "cauchy",
    "cauchy_c",
    "critical_theta",
    "forward_map",
    "g_inverse",
    "lsd_density",
    "m_transform",
    "n_composed",
    "n_transform",
    "shrink",
    "toeplitz_lsd_density",
]
