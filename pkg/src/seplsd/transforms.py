"""Closed-form Cauchy, M- and N-transforms of the three base spectral models.

The base models are the Marchenko-Pastur law, the shifted semicircle (spectrum
of ``alpha*I + beta*V`` for a Wigner ``V``) and the exponential-decay Toeplitz
matrix ``r**|a-b|``.  Their N-transforms combine through the free
multiplication law into the N-transform of the separable sample covariance
matrix, see :func:`n_composed`.

Every function accepts a scalar or an array and returns the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import integrate

from .errors import DomainError

__all__ = [
    "ModelParams",
    "SupportInterval",
    "TransformValue",
    "MarchenkoPastur",
    "ShiftedSemicircle",
    "ExponentialToeplitz",
    "BaseModel",
    "principal_sqrt",
    "lower_sqrt",
    "support",
    "density",
    "cdf",
    "cauchy",
    "m_transform",
    "n_transform",
    "n_composed",
    "n_composed_factored",
    "evaluate",
]

# Imaginary offset used for real arguments: G(x) is taken as G(x + i0+).
REAL_AXIS_GUARD = 1e-300


@dataclass(frozen=True)
class ModelParams:
    """Parameters (c, alpha, beta, r) of the separable covariance model."""

    c: float
    alpha: float
    beta: float
    r: float
    gamma: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("c", "alpha", "beta", "r"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not 0.0 < self.c < 1.0:
            raise DomainError(f"c must lie in (0, 1), got {self.c}")
        if self.alpha < 0.0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta < 0.0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if self.alpha == 0.0 and self.beta == 0.0:
            raise DomainError("alpha and beta cannot both vanish")
        if not 0.0 <= self.r < 1.0:
            raise DomainError(f"r must lie in [0, 1), got {self.r}")
        r2 = self.r * self.r
        object.__setattr__(self, "gamma", (1.0 + r2) / (1.0 - r2))

    def as_dict(self) -> dict:
        return {"c": self.c, "alpha": self.alpha, "beta": self.beta, "r": self.r, "gamma": self.gamma}


@dataclass(frozen=True)
class SupportInterval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise DomainError(f"support lower edge {self.lo} exceeds upper edge {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray | bool:
        x = np.asarray(x)
        return (x >= self.lo) & (x <= self.hi)


@dataclass(frozen=True)
class TransformValue:
    z: complex
    value: complex


@dataclass(frozen=True)
class MarchenkoPastur:
    c: float

    def __post_init__(self) -> None:
        if not 0.0 < self.c < 1.0:
            raise DomainError(f"c must lie in (0, 1), got {self.c}")


@dataclass(frozen=True)
class ShiftedSemicircle:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha < 0.0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta <= 0.0:
            # beta = 0 is a point mass at alpha; the composed pipeline handles it as a limit.
            raise DomainError(f"beta must be > 0 for the semicircle model, got {self.beta}")


@dataclass(frozen=True)
class ExponentialToeplitz:
    r: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r < 1.0:
            raise DomainError(f"r must lie in [0, 1), got {self.r}")

    @property
    def gamma(self) -> float:
        r2 = self.r * self.r
        return (1.0 + r2) / (1.0 - r2)


BaseModel = Union[MarchenkoPastur, ShiftedSemicircle, ExponentialToeplitz]


def _as_complex(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _finish(value: np.ndarray, scalar: bool):
    return complex(value) if scalar else value


def principal_sqrt(z):
    """Square root with the argument taken in [0, 2*pi).

    The result always lies in the closed upper half-plane; the branch cut is
    the positive real axis approached from below.
    """
    arr, scalar = _as_complex(z)
    theta = np.arctan2(arr.imag, arr.real)
    theta = np.where(theta < 0.0, theta + 2.0 * np.pi, theta)
    out = np.sqrt(np.abs(arr)) * np.exp(0.5j * theta)
    return _finish(out, scalar)


def lower_sqrt(z):
    """Square root with the argument taken in (-pi, 0].

    Mirror image of :func:`principal_sqrt`: the result lies in the closed
    lower half-plane and positive reals map to positive reals.  This is the
    sheet on which the semicircle N-transform inverts the M-transform for
    arguments coming from the upper half-plane.
    """
    arr, scalar = _as_complex(z)
    out = np.conj(principal_sqrt(np.conj(arr)))
    return _finish(out, scalar)


def support(model: BaseModel) -> SupportInterval:
    match model:
        case MarchenkoPastur(c=c):
            s = math.sqrt(c)
            return SupportInterval((1.0 - s) ** 2, (1.0 + s) ** 2)
        case ShiftedSemicircle(alpha=alpha, beta=beta):
            return SupportInterval(alpha - 2.0 * beta, alpha + 2.0 * beta)
        case ExponentialToeplitz(r=r):
            return SupportInterval((1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r))
    raise TypeError(f"unknown base model {model!r}")


def density(model: BaseModel, x):
    """Analytic limiting density of a base model, zero off the support."""
    xs = np.asarray(x, dtype=float)
    sup = support(model)
    a, b = sup.lo, sup.hi
    inside = (xs > a) & (xs < b)
    out = np.zeros_like(xs)
    xi = xs[inside]
    match model:
        case MarchenkoPastur(c=c):
            out[inside] = np.sqrt((xi - a) * (b - xi)) / (2.0 * np.pi * c * xi)
        case ShiftedSemicircle(alpha=alpha, beta=beta):
            out[inside] = np.sqrt(4.0 * beta**2 - (xi - alpha) ** 2) / (2.0 * np.pi * beta**2)
        case ExponentialToeplitz(r=r):
            if r == 0.0:
                raise DomainError("r = 0 gives a point mass at 1, which has no density")
            out[inside] = 1.0 / (np.pi * xi * np.sqrt((xi - a) * (b - xi)))
    return float(out) if xs.ndim == 0 else out


def _mp_cdf_scalar(c: float, x: float) -> float:
    sup = support(MarchenkoPastur(c))
    if x <= sup.lo:
        return 0.0
    if x >= sup.hi:
        return 1.0
    val, _ = integrate.quad(lambda t: float(density(MarchenkoPastur(c), t)), sup.lo, x, limit=200)
    return min(max(val, 0.0), 1.0)


def cdf(model: BaseModel, x):
    """Analytic distribution function of a base model.

    Closed forms for the semicircle and Toeplitz laws; adaptive quadrature of
    the density for Marchenko-Pastur.
    """
    xs = np.asarray(x, dtype=float)
    sup = support(model)
    match model:
        case MarchenkoPastur(c=c):
            out = np.vectorize(lambda t: _mp_cdf_scalar(c, float(t)), otypes=[float])(xs)
        case ShiftedSemicircle(alpha=alpha, beta=beta):
            u = np.clip((xs - alpha) / beta, -2.0, 2.0)
            out = 0.5 + u * np.sqrt(4.0 - u * u) / (4.0 * np.pi) + np.arcsin(u / 2.0) / np.pi
        case ExponentialToeplitz(r=r):
            if r == 0.0:
                out = (xs >= 1.0).astype(float)
            else:
                with np.errstate(divide="ignore"):
                    u = (1.0 + r * r - (1.0 - r * r) / np.where(xs > 0, xs, np.nan)) / (2.0 * r)
                u = np.clip(np.nan_to_num(u, nan=-1.0), -1.0, 1.0)
                out = 1.0 - np.arccos(u) / np.pi
                out = np.where(xs <= sup.lo, 0.0, np.where(xs >= sup.hi, 1.0, out))
        case _:
            raise TypeError(f"unknown base model {model!r}")
    out = np.clip(out, 0.0, 1.0)
    return float(out) if xs.ndim == 0 else out


def _checked_argument(model: BaseModel, z) -> tuple[np.ndarray, bool]:
    arr, scalar = _as_complex(z)
    if np.any(arr.imag < 0.0):
        raise DomainError("transforms are evaluated on the closed upper half-plane", z=str(z))
    sup = support(model)
    real = arr.imag == 0.0
    bad = real & (arr.real >= sup.lo) & (arr.real <= sup.hi)
    if np.any(bad):
        first = complex(arr[bad].flat[0])
        raise DomainError(
            f"real argument {first.real} lies in the support [{sup.lo}, {sup.hi}]",
            z=first.real,
            support=[sup.lo, sup.hi],
        )
    if not isinstance(model, ShiftedSemicircle) and np.any(arr == 0):
        raise DomainError("transform undefined at z = 0 for this model", z=0.0)
    return np.where(real, arr + 1j * REAL_AXIS_GUARD, arr), scalar


def _toeplitz_m(r: float, z: np.ndarray) -> np.ndarray:
    b = (1.0 + r) / (1.0 - r)
    a = (1.0 - r) / (1.0 + r)
    # Two separate radicals, not the root of their product: this fixes the cut.
    return 1.0 / (principal_sqrt(z - b) * principal_sqrt(z - a))


def _minus_root(u: np.ndarray, root: np.ndarray, den: float | np.ndarray, k: float | np.ndarray) -> np.ndarray:
    """``(u - root) / den`` where ``u^2 - root^2 = k den`` holds identically.

    Switches to the conjugate form ``k / (u + root)`` when ``u`` and ``root``
    nearly cancel (large ``|z|``); both expressions are algebraically equal.
    """
    plus = u + root
    minus = u - root
    with np.errstate(all="ignore"):
        stable = k / plus
    return np.where(np.abs(plus) >= np.abs(minus), stable, minus / den)


def cauchy(model: BaseModel, z):
    """Cauchy transform ``G(z) = int dmu(t) / (z - t)`` in closed form."""
    zz, scalar = _checked_argument(model, z)
    match model:
        case MarchenkoPastur(c=c):
            sup = support(model)
            root = principal_sqrt((zz - sup.lo) * (zz - sup.hi))
            out = _minus_root(zz + c - 1.0, root, 2.0 * c * zz, 2.0)
        case ShiftedSemicircle(alpha=alpha, beta=beta):
            root = principal_sqrt((zz - alpha) ** 2 - 4.0 * beta**2)
            out = _minus_root(zz - alpha, root, 2.0 * beta**2, 2.0)
        case ExponentialToeplitz(r=r):
            out = (_toeplitz_m(r, zz) + 1.0) / zz
        case _:
            raise TypeError(f"unknown base model {model!r}")
    return _finish(out, scalar)


def m_transform(model: BaseModel, z):
    """M-transform ``M(z) = z G(z) - 1``."""
    zz, scalar = _checked_argument(model, z)
    match model:
        case MarchenkoPastur(c=c):
            sup = support(model)
            root = principal_sqrt((zz - sup.lo) * (zz - sup.hi))
            out = _minus_root(zz - c - 1.0, root, 2.0 * c, 2.0)
        case ShiftedSemicircle(alpha=alpha, beta=beta):
            root = principal_sqrt((zz - alpha) ** 2 - 4.0 * beta**2)
            out = zz * _minus_root(zz - alpha, root, 2.0 * beta**2, 2.0) - 1.0
        case ExponentialToeplitz(r=r):
            out = _toeplitz_m(r, zz)
        case _:
            raise TypeError(f"unknown base model {model!r}")
    return _finish(out, scalar)


def _semicircle_n(alpha: float, beta: float, w: np.ndarray) -> np.ndarray:
    return (w + 1.0) * (alpha + lower_sqrt(alpha**2 + 4.0 * beta**2 * w)) / (2.0 * w)


def _toeplitz_n(gamma: float, w: np.ndarray) -> np.ndarray:
    return gamma + principal_sqrt(gamma**2 + 1.0 / (w * w) - 1.0)


def n_transform(model: BaseModel, w):
    """N-transform, the functional inverse of the M-transform.

    Valid on the image of the upper half-plane under :func:`m_transform`.
    """
    ww, scalar = _as_complex(w)
    if np.any(ww == 0):
        raise DomainError("N-transform is singular at w = 0", w=0.0)
    match model:
        case MarchenkoPastur(c=c):
            out = (1.0 + ww) * (1.0 + c * ww) / ww
        case ShiftedSemicircle(alpha=alpha, beta=beta):
            out = _semicircle_n(alpha, beta, ww)
        case ExponentialToeplitz():
            out = _toeplitz_n(model.gamma, ww)
        case _:
            raise TypeError(f"unknown base model {model!r}")
    return _finish(out, scalar)


def _check_composed_argument(params: ModelParams, w) -> tuple[np.ndarray, bool]:
    ww, scalar = _as_complex(w)
    for pole, label in ((0.0, "0"), (-1.0, "-1"), (-1.0 / params.c, "-1/c")):
        if np.any(ww == pole):
            raise DomainError(f"composed N-transform is singular at w = {label}", w=pole)
    return ww, scalar


def n_composed(params: ModelParams, w):
    """N-transform of the separable sample covariance matrix, collapsed form.

    ``(c/2) (w+1) (gamma + sqrt(gamma^2 - 1 + 1/(c w)^2)) (alpha + sqrt(alpha^2 + 4 beta^2 w))``
    """
    ww, scalar = _check_composed_argument(params, w)
    c, alpha, beta, gamma = params.c, params.alpha, params.beta, params.gamma
    out = (
        0.5
        * c
        * (ww + 1.0)
        * (gamma + principal_sqrt(gamma**2 - 1.0 + 1.0 / (c * c * ww * ww)))
        * (alpha + lower_sqrt(alpha**2 + 4.0 * beta**2 * ww))
    )
    return _finish(out, scalar)


def n_composed_factored(params: ModelParams, w):
    """Same quantity assembled factor by factor through the free multiplication law."""
    ww, scalar = _check_composed_argument(params, w)
    c = params.c
    n_mp = n_transform(MarchenkoPastur(c), ww)
    n_t = _toeplitz_n(params.gamma, c * ww)
    if params.beta > 0.0:
        n_s = n_transform(ShiftedSemicircle(params.alpha, params.beta), ww)
    else:
        # Point mass at alpha: M(z) = alpha / (z - alpha), N(w) = alpha (1 + w) / w.
        n_s = params.alpha * (1.0 + ww) / ww
    out = (ww / (1.0 + ww)) * (c * ww / (1.0 + c * ww)) * n_mp * n_t * n_s
    return _finish(out, scalar)


def evaluate(kind: str, model: BaseModel, z) -> TransformValue:
    """Evaluate one transform at one point; ``kind`` is ``G``, ``M`` or ``N``."""
    fn = {"G": cauchy, "M": m_transform, "N": n_transform}.get(kind.upper())
    if fn is None:
        raise ValueError(f"unknown transform kind {kind!r}; expected G, M or N")
    return TransformValue(complex(z), complex(fn(model, z)))
