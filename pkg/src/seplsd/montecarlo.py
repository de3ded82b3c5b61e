"""Finite-size simulation of the ensembles: Wigner, spatial and temporal
covariances, the separable sample covariance, its spiked version and the
heterogeneous / homogeneous AR(1) processes.

Randomness: every matrix draws from its own PCG64 stream, keyed by
``SeedSequence(seed, spawn_key=(trial, stream))``, so trials and matrices
can be regenerated independently.  Normals use numpy's ziggurat sampler.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import lfilter

from . import _io
from .errors import DomainError, SimulationSizeError
from .spiked import SpikeSpec
from .transforms import ModelParams

__all__ = [
    "RNG_NAME",
    "GAUSSIAN_METHOD",
    "MAX_ELEMENTS",
    "SimSpec",
    "EsdSample",
    "HeterogeneousARParams",
    "rng_for",
    "sample_wigner",
    "sample_sigma_s",
    "sample_sigma_t",
    "sample_covariance",
    "sample_spiked",
    "draw_ar_params",
    "sample_ar1",
    "sample_toeplitz_esd",
    "vec_covariance_deviation",
]

log = logging.getLogger(__name__)

RNG_NAME = "numpy.random.PCG64"
GAUSSIAN_METHOD = "ziggurat"
MAX_ELEMENTS = 200_000_000

# Stream indices within a trial.
STREAM_WIGNER = 0
STREAM_DATA = 1
STREAM_FRAME = 2
STREAM_RATES = 3
STREAM_AR_NOISE = 4


def rng_for(seed: int, trial: int = 0, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial, stream))))


@dataclass(frozen=True)
class SimSpec:
    n: int
    t: int
    params: ModelParams
    seed: int = 42
    trials: int = 1

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"n must be at least 2, got {self.n}")
        if self.t < self.n + 1:
            raise DomainError(f"t must exceed n, got n={self.n}, t={self.t}")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if abs(self.params.c - self.n / self.t) > 1e-9:
            raise DomainError(f"params.c = {self.params.c} disagrees with n/t = {self.n / self.t}")

    @classmethod
    def from_dims(cls, n: int, t: int, alpha: float = 1.0, beta: float = 0.5, r: float = 0.5, **kw) -> "SimSpec":
        return cls(n, t, ModelParams(n / t, alpha, beta, r), **kw)

    def as_dict(self) -> dict:
        return {"n": self.n, "t": self.t, "params": self.params.as_dict(), "seed": self.seed, "trials": self.trials}


@dataclass
class EsdSample:
    eigenvalues: np.ndarray
    n: int
    t: int | None
    seed: int
    ensemble: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.eigenvalues = np.sort(np.asarray(self.eigenvalues, dtype=float))

    def to_csv(self, path: str | Path) -> Path:
        return _io.write_csv(path, ["index", "eigenvalue"], enumerate(self.eigenvalues))

    def manifest(self) -> dict:
        return {
            "ensemble": self.ensemble,
            "n": self.n,
            "t": self.t,
            "seed": self.seed,
            "rng": RNG_NAME,
            "gaussian": GAUSSIAN_METHOD,
            **self.meta,
        }

    def to_json(self, path: str | Path) -> Path:
        return _io.write_json(path, self.manifest())


@dataclass(frozen=True)
class HeterogeneousARParams:
    rates: np.ndarray

    @property
    def noise_var(self) -> np.ndarray:
        return 1.0 - self.rates**2

    @property
    def mean_rate(self) -> float:
        return float(np.mean(self.rates))

    @property
    def mean_noise_var(self) -> float:
        return 1.0 - self.mean_rate**2


def _guard(n: int, t: int, cap: int) -> None:
    if n * t > cap:
        raise SimulationSizeError(f"n*t = {n * t} exceeds the element cap {cap}", n=n, t=t, cap=cap)


def _wigner(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n))
    v = (a + a.T) / math.sqrt(2.0 * n)
    v[np.diag_indices(n)] = np.diag(a) / math.sqrt(n)
    return v


def sample_wigner(n: int, seed: int, *, trial: int = 0) -> np.ndarray:
    """Symmetric Gaussian matrix, entry variance 1/n; spectrum fills [-2, 2]."""
    if n < 2:
        raise DomainError("n must be at least 2")
    return _wigner(n, rng_for(seed, trial, STREAM_WIGNER))


def sample_sigma_s(n: int, alpha: float, beta: float, seed: int, *, trial: int = 0) -> tuple[np.ndarray, np.ndarray, int]:
    """``alpha I + beta V`` with negative eigenvalues clamped to zero.

    Returns ``(sigma, sqrt_sigma, clamped_count)``.
    """
    if alpha < 0 or beta < 0:
        raise DomainError("alpha and beta must be nonnegative")
    if beta == 0:
        return alpha * np.eye(n), math.sqrt(alpha) * np.eye(n), 0
    s = alpha * np.eye(n) + beta * sample_wigner(n, seed, trial=trial)
    w, q = np.linalg.eigh(s)
    clamped = int(np.count_nonzero(w < 0))
    if clamped:
        log.info("clamped %d negative eigenvalues of the spatial covariance", clamped)
    w = np.clip(w, 0.0, None)
    sigma = (q * w) @ q.T
    root = (q * np.sqrt(w)) @ q.T
    return 0.5 * (sigma + sigma.T), 0.5 * (root + root.T), clamped


def sample_sigma_t(t: int, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Toeplitz ``r**|a-b|`` and its lower Cholesky factor."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"r must lie in [0, 1), got {r}")
    sigma = toeplitz(r ** np.arange(t, dtype=float))
    if r == 0:
        return sigma, np.eye(t)
    return sigma, np.linalg.cholesky(sigma)


def _ar_filter(w: np.ndarray, r: float) -> np.ndarray:
    """Apply the Cholesky factor of ``r**|a-b|`` to every row of ``w``.

    Row-wise this is the stationary AR(1) recursion ``y_0 = x_0``,
    ``y_k = r y_{k-1} + sqrt(1 - r^2) x_k``; no T x T matrix is formed.
    """
    if r == 0:
        return w
    s = math.sqrt(1.0 - r * r)
    # Filter state adds (1 - s) x_0 to the first output so that y_0 = x_0.
    zi = ((1.0 - s) * w[:, 0])[:, None]
    y, _ = lfilter([s], [1.0, -r], w, axis=1, zi=zi)
    return y


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(0.5 * (m + m.T))


def _covariance_matrix(spec: SimSpec, trial: int, cap: int) -> tuple[np.ndarray, dict]:
    n, t, p = spec.n, spec.t, spec.params
    _guard(n, t, cap)
    _, root, clamped = sample_sigma_s(n, p.alpha, p.beta, spec.seed, trial=trial)
    w = rng_for(spec.seed, trial, STREAM_DATA).standard_normal((n, t))
    y = _ar_filter(w, p.r)
    x = root @ y if p.beta > 0 else math.sqrt(p.alpha) * y
    c = (x @ x.T) / t
    return 0.5 * (c + c.T), {"clamped": clamped, "trial": trial, "spec": spec.as_dict()}


def sample_covariance(spec: SimSpec, *, trial: int = 0, cap: int = MAX_ELEMENTS) -> EsdSample:
    """Eigenvalues of ``(1/t) S^(1/2) W R W^T S^(1/2)`` for one trial."""
    c, meta = _covariance_matrix(spec, trial, cap)
    return EsdSample(_eigvalsh(c), spec.n, spec.t, spec.seed, "separable", meta)


def sample_spiked(spec: SimSpec, spike: SpikeSpec, seed: int | None = None, *, trial: int = 0, cap: int = MAX_ELEMENTS) -> EsdSample:
    """Eigenvalues of ``sum theta_i phi_i phi_i^T + C`` with a random orthonormal frame."""
    if seed is not None and seed != spec.seed:
        spec = SimSpec(spec.n, spec.t, spec.params, seed, spec.trials)
    if spike.rank > max(1, spec.n // 100):
        raise DomainError(f"spike rank {spike.rank} exceeds n/100 = {spec.n // 100}")
    c, meta = _covariance_matrix(spec, trial, cap)
    if spike.rank:
        g = rng_for(spec.seed, trial, STREAM_FRAME).standard_normal((spec.n, spike.rank))
        q, _ = np.linalg.qr(g)
        c = c + (q * np.asarray(spike.thetas)) @ q.T
    meta["thetas"] = list(spike.thetas)
    return EsdSample(_eigvalsh(c), spec.n, spec.t, spec.seed, "spiked", meta)


def draw_ar_params(n: int, seed: int, *, trial: int = 0) -> HeterogeneousARParams:
    # Generator.random samples [0, 1), so a rate of exactly 1 never occurs.
    return HeterogeneousARParams(rng_for(seed, trial, STREAM_RATES).random(n))


def sample_ar1(n: int, t: int, mode: str, seed: int, *, trial: int = 0, cap: int = MAX_ELEMENTS) -> EsdSample:
    """Eigenvalues of ``(1/t) U U^T`` for N independent stationary AR(1) rows.

    Both modes share the rate draw and the innovation stream; ``homogeneous``
    replaces every rate by the mean rate.
    """
    if n < 2 or t < 2:
        raise DomainError("n and t must be at least 2")
    if mode not in ("heterogeneous", "homogeneous"):
        raise DomainError(f"mode must be heterogeneous or homogeneous, got {mode!r}")
    _guard(n, t, cap)
    ar = draw_ar_params(n, seed, trial=trial)
    rates = ar.rates if mode == "heterogeneous" else np.full(n, ar.mean_rate)
    sigma = np.sqrt(1.0 - rates**2)
    xi = rng_for(seed, trial, STREAM_AR_NOISE).standard_normal((n, t))
    u = np.empty((n, t))
    u[:, 0] = xi[:, 0]
    for k in range(1, t):
        u[:, k] = rates * u[:, k - 1] + sigma * xi[:, k]
    meta = {"mode": mode, "mean_rate": ar.mean_rate, "trial": trial}
    return EsdSample(_eigvalsh(u @ u.T / t), n, t, seed, f"ar1-{mode}", meta)


def sample_toeplitz_esd(t: int, r: float) -> EsdSample:
    """Spectrum of the finite ``t x t`` Toeplitz matrix (deterministic)."""
    sigma, _ = sample_sigma_t(t, r)
    return EsdSample(_eigvalsh(sigma), t, t, 0, "toeplitz", {"r": r})


def vec_covariance_deviation(n: int, t: int, params: ModelParams, draws: int, seed: int) -> float:
    """Max entry gap between the empirical covariance of ``vec(U)`` and ``R kron S``.

    ``U = S^(1/2) W L^T`` with ``L L^T = R``; draws are vectorised in one block.
    """
    sigma_s, root, _ = sample_sigma_s(n, params.alpha, params.beta, seed)
    sigma_t, chol = sample_sigma_t(t, params.r)
    w = rng_for(seed, 0, STREAM_DATA).standard_normal((draws, n, t))
    u = root @ w @ chol.T
    vec = u.transpose(0, 2, 1).reshape(draws, n * t)
    emp = vec.T @ vec / draws
    return float(np.max(np.abs(emp - np.kron(sigma_t, sigma_s))))
