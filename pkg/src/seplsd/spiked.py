"""Spiked separable model: outlier location and its inverse (nonlinear shrinkage).

A rank-r perturbation ``P = sum theta_i u_i u_i^T`` added to the separable
covariance ``C`` produces outliers at ``eta_i = G^{-1}(1/theta_i)`` whenever
``theta_i > 1/G(a+)``, where ``a`` is the right edge of the LSD support;
otherwise the eigenvalue sticks to ``a``.  The inverse map
``theta_hat = 1/G(lambda)`` recovers the spike from an observed outlier.
``G^{-1}`` is a root of a quartic whose coefficients are polynomial in ``G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _io
from .errors import AmbiguityError, DomainError, NoRootError
from .lsd import DensityCurve, InversionConfig, _roots_batch, lsd_density, solve_cauchy_grid, unsquared_residual
from .transforms import ModelParams

__all__ = [
    "QuarticCoefficients",
    "SpikeSpec",
    "SpikeResult",
    "q_coefficients",
    "support_edge",
    "g_real",
    "critical_theta",
    "g_inverse",
    "forward_map",
    "shrink",
    "wigner_spike_map",
    "wigner_spike_shrink",
    "write_forward_csv",
    "write_shrink_csv",
]

EDGE_DELTA = 1e-6
REAL_OFFSET = 1e-9
LOW_CONFIDENCE_BAND = 1e-3


@dataclass(frozen=True)
class QuarticCoefficients:
    """q0..q4 (ascending powers of the unknown ``G^{-1}``) at ``z = G``."""

    z: complex
    q: np.ndarray

    def __getitem__(self, i: int) -> complex:
        return complex(self.q[i])


@dataclass(frozen=True)
class SpikeSpec:
    thetas: tuple[float, ...]

    def __post_init__(self) -> None:
        thetas = tuple(float(t) for t in self.thetas)
        object.__setattr__(self, "thetas", thetas)
        if any(not math.isfinite(t) or t < 0 for t in thetas):
            raise DomainError("spike levels must be finite and nonnegative")
        if any(a < b for a, b in zip(thetas, thetas[1:])):
            raise DomainError("spike levels must be sorted in descending order")

    @property
    def rank(self) -> int:
        return len(self.thetas)


@dataclass(frozen=True)
class SpikeResult:
    theta: float | None
    eta: float | None
    detectable: bool
    theta_hat: float | None
    critical_theta: float
    support_edge: float
    low_confidence: bool = False


def q_coefficients(params: ModelParams, z: complex) -> QuarticCoefficients:
    z = complex(z)
    c, a, b, g = params.c, params.alpha, params.beta, params.gamma
    b2, b4 = b * b, b**4
    c2, c3, c4 = c * c, c**3, c**4
    q = np.empty(5, dtype=complex)
    q[4] = b4 * z**8
    q[3] = 2 * b2 * z**5 / c2 - 4 * b2 * g * g * z**5 / c2 + 2 * a * b2 * g * z**6 / c - 4 * b4 * z**7
    q[2] = (
        z**2 / c4
        - 2 * a * g * z**3 / c3
        + a * a * z**4 / c2
        - 6 * b2 * z**4 / c2
        + 12 * b2 * g * g * z**4 / c2
        - 6 * a * b2 * g * z**5 / c
        + 6 * b4 * z**6
        - 2 * b4 * z**6 / c2
    )
    q[1] = (
        -2 * z / c4
        + 4 * a * g * z**2 / c3
        - 2 * b2 * z**3 / c4
        - 2 * a * a * z**3 / c2
        + 6 * b2 * z**3 / c2
        - 12 * b2 * g * g * z**3 / c2
        - 2 * a * b2 * g * z**4 / c3
        + 6 * a * b2 * g * z**4 / c
        - 4 * b4 * z**5
        + 4 * b4 * z**5 / c2
    )
    q[0] = (
        1 / c4
        - 2 * a * g * z / c3
        - a * a * z**2 / c4
        + 2 * b2 * z**2 / c4
        + a * a * z**2 / c2
        - 2 * b2 * z**2 / c2
        + 4 * b2 * g * g * z**2 / c2
        + 2 * a * b2 * g * z**3 / c3
        - 2 * a * b2 * g * z**3 / c
        + b4 * z**4
        + b4 * z**4 / c4
        - 2 * b4 * z**4 / c2
    )
    return QuarticCoefficients(z, q)


def _curve(params: ModelParams, curve: DensityCurve | None) -> DensityCurve:
    return curve if curve is not None else lsd_density(params, InversionConfig())


def support_edge(params: ModelParams, curve: DensityCurve | None = None) -> float:
    return float(_curve(params, curve).support.hi)


def g_real(params: ModelParams, x) -> np.ndarray | float:
    """``G_C`` on the real axis right of the support (real part at ``x + 1e-9 i``).

    The offset grows with ``|x|`` beyond 1 so that ``Im G ~ -y/x^2`` stays
    above round-off for far outliers.
    """
    arr = np.asarray(x, dtype=float)
    flat = arr.ravel()
    sol = solve_cauchy_grid(params, flat + 1j * REAL_OFFSET * np.maximum(1.0, np.abs(flat)))
    g = sol.g.real
    return float(g[0]) if arr.ndim == 0 else g.reshape(arr.shape)


def critical_theta(params: ModelParams, curve: DensityCurve | None = None) -> float:
    """Phase-transition level ``1/G(a+)``, with ``a+`` taken as ``a + 1e-6``."""
    return 1.0 / g_real(params, support_edge(params, curve) + EDGE_DELTA)


def g_inverse(
    params: ModelParams,
    w: float,
    *,
    curve: DensityCurve | None = None,
    residual_tol: float = 1e-8,
) -> float:
    """Real ``x`` right of the support with ``G_C(x) = w``.

    Besides reality, ``x > a`` and the residual test, a candidate must lie on
    the physical branch ``0 < x w - 1 <= M(a+)``: right of a support inside
    [0, inf) the M-transform is positive, and the remaining real solutions of
    the unsquared relation sit past the turning point of ``N_C``.
    """
    edge = support_edge(params, curve)
    m_edge = (edge + EDGE_DELTA) * g_real(params, edge + EDGE_DELTA) - 1.0
    w = complex(w)
    # Solve for u = x w: the outlier sits near 1/w, and the rescaled
    # coefficients stay balanced for large spikes.
    q = q_coefficients(params, w).q
    scale = 1.0 / abs(w)
    roots = _roots_batch((q * scale ** np.arange(5))[None, :])[0] * scale
    roots = roots[np.isfinite(roots)]
    real = roots[np.abs(roots.imag) <= 1e-8 * np.maximum(1.0, np.abs(roots))].real
    beyond = real[real > edge]
    if beyond.size == 0:
        raise NoRootError(
            f"no real root of the inverse quartic exceeds the support edge {edge}",
            w=[w.real, w.imag],
            roots=[[r.real, r.imag] for r in roots],
            support_edge=edge,
        )
    # Roles swap: the candidate is the argument, w is the transform value.
    res = np.array([unsquared_residual(params, x, w.real) for x in beyond])
    m = beyond * w.real - 1.0
    on_branch = (m > 0.0) & (m <= m_edge * (1.0 + 1e-9))
    keep = beyond[(res <= residual_tol) & on_branch]
    if keep.size == 0:
        raise NoRootError(
            "no real root beyond the edge satisfies the unsquared inverse relation",
            w=[w.real, w.imag],
            candidates=beyond.tolist(),
            residuals=res.tolist(),
            support_edge=edge,
        )
    if keep.size > 1:
        raise AmbiguityError(
            "several real roots satisfy the inverse relation",
            w=[w.real, w.imag],
            candidates=keep.tolist(),
        )
    return float(keep[0])


def forward_map(
    params: ModelParams,
    spec: SpikeSpec,
    *,
    curve: DensityCurve | None = None,
) -> list[SpikeResult]:
    """Predicted outlier locations for each spike level in ``spec``."""
    curve = _curve(params, curve)
    edge = support_edge(params, curve)
    crit = critical_theta(params, curve)
    out = []
    for theta in spec.thetas:
        if theta > crit:
            eta = g_inverse(params, 1.0 / theta, curve=curve)
            out.append(SpikeResult(theta, eta, True, None, crit, edge))
        else:
            out.append(SpikeResult(theta, edge, False, None, crit, edge))
    return out


def shrink(
    params: ModelParams,
    lambdas: Sequence[float],
    *,
    curve: DensityCurve | None = None,
) -> list[SpikeResult]:
    """Nonlinear shrinkage ``theta_hat = 1/G_C(lambda)`` for observed outliers."""
    lambdas = [float(v) for v in lambdas]
    if any(a < b for a, b in zip(lambdas, lambdas[1:])):
        raise DomainError("lambdas must be sorted in descending order")
    curve = _curve(params, curve)
    edge = support_edge(params, curve)
    crit = critical_theta(params, curve)
    above = [v for v in lambdas if v > edge]
    g = np.atleast_1d(g_real(params, np.array(above))) if above else np.empty(0)
    lookup = dict(zip(above, g))
    out = []
    for lam in lambdas:
        if lam > edge:
            low = lam <= edge * (1.0 + LOW_CONFIDENCE_BAND)
            out.append(SpikeResult(None, lam, True, float(1.0 / lookup[lam]), crit, edge, low))
        else:
            out.append(SpikeResult(None, lam, False, None, crit, edge))
    return out


def wigner_spike_map(theta: float, sigma: float) -> float:
    """Outlier location for a rank-one spike on a Wigner matrix of scale sigma."""
    if theta < 0 or sigma <= 0:
        raise DomainError("need theta >= 0 and sigma > 0")
    return theta + sigma * sigma / theta if theta > sigma else 2.0 * sigma


def wigner_spike_shrink(eta: float, sigma: float) -> float | None:
    """Inverse of :func:`wigner_spike_map`; ``None`` when ``eta <= 2 sigma``."""
    if sigma <= 0:
        raise DomainError("need sigma > 0")
    if eta <= 2.0 * sigma:
        return None
    return 0.5 * (eta + math.sqrt(eta * eta - 4.0 * sigma * sigma))


def write_forward_csv(path: str | Path, results: Sequence[SpikeResult]) -> Path:
    return _io.write_csv(path, ["theta", "eta", "detectable"], [(r.theta, r.eta, r.detectable) for r in results])


def write_shrink_csv(path: str | Path, results: Sequence[SpikeResult]) -> Path:
    rows = [(r.eta, r.theta_hat, r.detectable) for r in results]
    return _io.write_csv(path, ["lambda", "theta_hat", "recoverable"], rows)
