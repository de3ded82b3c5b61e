"""Limiting spectral density of the separable sample covariance matrix.

``C = (1/T) S^(1/2) W R W^T S^(1/2)`` with ``S = alpha I + beta V`` (Wigner ``V``)
and ``R[a, b] = r**|a-b|``.  Its Cauchy transform ``G`` solves

    1 = (c/2) G (gamma + sqrt(gamma^2 - 1 + 1/(c^2 (zG-1)^2))) (alpha + sqrt(alpha^2 + 4 beta^2 (zG-1)))

which, after clearing both radicals, is a degree-8 polynomial in ``G``.  For
each grid point all eight roots are computed, the physical one is selected
(lower half-plane, small residual on the equation above, continuity) and the
density is recovered by Stieltjes inversion ``-Im G(x + iy) / pi`` with
Richardson extrapolation ``y -> 0``.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _io
from .errors import DegenerateError, DomainError, GridError, SelectionError
from .transforms import ModelParams, SupportInterval, density as base_density, lower_sqrt, principal_sqrt, support
from .transforms import ExponentialToeplitz

__all__ = [
    "GridSpec",
    "InversionConfig",
    "Degree8Coefficients",
    "DensityCurve",
    "CauchyGridSolution",
    "p_coefficients",
    "unsquared_residual",
    "solve_roots",
    "select_root",
    "solve_cauchy_grid",
    "cauchy_c",
    "auto_bracket",
    "invert_cauchy",
    "lsd_density",
    "toeplitz_lsd_density",
]

TRIM = 1e-14


@dataclass(frozen=True)
class GridSpec:
    """Real abscissa grid: ``count`` points on [lo, hi].

    ``kind`` is ``uniform`` (endpoints included), ``open`` (cell midpoints,
    never touching lo or hi) or ``chebyshev`` (open grid clustered at both
    ends, suited to inverse-square-root edge singularities).
    """

    lo: float
    hi: float
    count: int = 2001
    kind: str = "uniform"

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise GridError(f"grid needs hi > lo, got [{self.lo}, {self.hi}]")
        if self.count < 2:
            raise GridError(f"grid needs at least 2 points, got {self.count}")
        if self.kind not in ("uniform", "open", "chebyshev"):
            raise GridError(f"unknown grid kind {self.kind!r}")

    def points(self) -> np.ndarray:
        if self.kind == "uniform":
            return np.linspace(self.lo, self.hi, self.count)
        k = np.arange(self.count) + 0.5
        if self.kind == "open":
            return self.lo + (self.hi - self.lo) * k / self.count
        theta = np.pi * k / self.count
        return self.lo + 0.5 * (self.hi - self.lo) * (1.0 - np.cos(theta))

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "count": self.count, "kind": self.kind}


@dataclass(frozen=True)
class InversionConfig:
    epsilon_schedule: tuple[float, ...] = (1e-3, 1e-4, 1e-5)
    grid: GridSpec | None = None
    density_floor: float = 1e-8
    residual_tol: float = 1e-8
    anchors: int = 64
    threads: int | None = None
    refine_edges: bool = True

    def __post_init__(self) -> None:
        sched = tuple(float(y) for y in self.epsilon_schedule)
        object.__setattr__(self, "epsilon_schedule", sched)
        if not sched or any(y <= 0 for y in sched):
            raise DomainError("epsilon_schedule must be a nonempty list of positive offsets")
        if any(a <= b for a, b in zip(sched, sched[1:])):
            raise DomainError("epsilon_schedule must be strictly decreasing")
        if self.density_floor <= 0 or self.residual_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.anchors < 2:
            raise DomainError("need at least two continuation anchors")

    def as_dict(self) -> dict:
        return {
            "epsilon_schedule": list(self.epsilon_schedule),
            "grid": None if self.grid is None else self.grid.as_dict(),
            "density_floor": self.density_floor,
            "residual_tol": self.residual_tol,
            "anchors": self.anchors,
            "refine_edges": self.refine_edges,
        }


@dataclass(frozen=True)
class Degree8Coefficients:
    """Coefficients p0..p8 (ascending powers of G) at one point z."""

    z: complex
    p: np.ndarray

    def __getitem__(self, i: int) -> complex:
        return complex(self.p[i])


@dataclass
class DensityCurve:
    xs: np.ndarray
    density: np.ndarray
    support: SupportInterval
    mass: float
    meta: dict = field(default_factory=dict)

    def to_csv(self, path: str | Path) -> Path:
        return _io.write_csv(path, ["x", "density"], zip(self.xs, self.density))

    def to_json(self, path: str | Path) -> Path:
        return _io.write_json(path, self.as_dict())

    def as_dict(self) -> dict:
        return {
            "params": self.meta.get("params"),
            "grid": self.meta.get("grid"),
            "xs": self.xs,
            "density": self.density,
            "support": {"lo": self.support.lo, "hi": self.support.hi},
            "mass": self.mass,
        }


@dataclass
class CauchyGridSolution:
    zs: np.ndarray
    g: np.ndarray
    residual: np.ndarray
    all_roots: np.ndarray
    survivors: np.ndarray


def _p_matrix(params: ModelParams, z, *, printed: bool = False) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    c, a, b, g = params.c, params.alpha, params.beta, params.gamma
    b2, b4 = b * b, b**4
    c2, c3, c4 = c * c, c**3, c**4
    z2, z3, z4 = z * z, z**3, z**4
    p = np.empty(z.shape + (9,), dtype=complex)
    p[..., 8] = b4 * z4
    p[..., 7] = -4 * b4 * z3
    # The printed coefficient carries b^4 z^2 where elimination gives 6 b^4 z^2.
    p6_lead = 1.0 if printed else 6.0
    p[..., 6] = p6_lead * b4 * z2 - 2 * b4 * z2 / c2 + 2 * a * b2 * g * z3 / c
    p[..., 5] = (
        -4 * b4 * z + 4 * b4 * z / c2 - 6 * a * b2 * g * z2 / c + 2 * b2 * z3 / c2 - 4 * b2 * g * g * z3 / c2
    )
    p[..., 4] = (
        b4
        + b4 / c4
        - 2 * b4 / c2
        - 2 * a * b2 * g * z / c3
        + 6 * a * b2 * g * z / c
        + a * a * z2 / c2
        - 6 * b2 * z2 / c2
        + 12 * b2 * g * g * z2 / c2
    )
    p[..., 3] = (
        2 * a * b2 * g / c3
        - 2 * a * b2 * g / c
        - 2 * b2 * z / c4
        - 2 * a * a * z / c2
        + 6 * b2 * z / c2
        - 12 * b2 * g * g * z / c2
        - 2 * a * g * z2 / c3
    )
    p[..., 2] = (
        -a * a / c4 + 2 * b2 / c4 + a * a / c2 - 2 * b2 / c2 + 4 * b2 * g * g / c2 + 4 * a * g * z / c3 + z2 / c4
    )
    p[..., 1] = -2 * a * g / c3 - 2 * z / c4
    p[..., 0] = 1.0 / c4
    return p


def p_coefficients(params: ModelParams, z: complex, *, printed: bool = False) -> Degree8Coefficients:
    """Coefficients of the degree-8 polynomial satisfied by ``G_C(z)``.

    ``printed=True`` returns the coefficient block exactly as published,
    including its p6 misprint; the default is the corrected block whose roots
    actually satisfy the unsquared equation.
    """
    return Degree8Coefficients(complex(z), _p_matrix(params, complex(z), printed=printed))


def unsquared_residual(params: ModelParams, z, g):
    """``|(c/2) g (gamma + S1) (alpha + S2) - 1|`` with ``M = z g - 1``.

    ``S1 = sqrt(gamma^2 - 1 + 1/(c M)^2)`` uses the [0, 2pi) argument
    convention; ``S2 = sqrt(alpha^2 + 4 beta^2 M)`` uses the lower-half-plane
    sheet (see :func:`seplsd.transforms.lower_sqrt`).  Non-finite values map
    to ``inf``.
    """
    z = np.asarray(z, dtype=complex)
    g = np.asarray(g, dtype=complex)
    c, a, b, gam = params.c, params.alpha, params.beta, params.gamma
    with np.errstate(all="ignore"):
        m = z * g - 1.0
        s1 = principal_sqrt(gam * gam - 1.0 + 1.0 / (c * c * m * m))
        s2 = lower_sqrt(a * a + 4.0 * b * b * m)
        res = np.abs(0.5 * c * g * (gam + s1) * (a + s2) - 1.0)
    res = np.where(np.isfinite(res), res, np.inf)
    return float(res) if res.ndim == 0 else res


def _horner(coeffs: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of ascending-coefficient polynomials, row-wise."""
    val = np.zeros_like(x)
    der = np.zeros_like(x)
    for k in range(coeffs.shape[-1] - 1, -1, -1):
        der = der * x + val
        val = val * x + coeffs[..., k : k + 1]
    return val, der


def _roots_batch(P: np.ndarray) -> np.ndarray:
    """Roots of each row of ascending coefficients, NaN-padded to width 8."""
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    n, width = P.shape
    deg_max = width - 1
    out = np.full((n, deg_max), np.nan + 0j)
    mag = np.abs(P)
    scale = mag.max(axis=1)
    if np.any(~(scale > 0)):
        raise DegenerateError("every polynomial coefficient vanishes", rows=np.flatnonzero(~(scale > 0)).tolist())
    keep = mag >= TRIM * scale[:, None]
    degree = deg_max - np.argmax(keep[:, ::-1], axis=1)
    for d in np.unique(degree):
        if d == 0:
            continue
        rows = np.flatnonzero(degree == d)
        coeffs = P[rows, : d + 1]
        comp = np.zeros((rows.size, d, d), dtype=complex)
        comp[:, 0, :] = -coeffs[:, d - 1 :: -1] / coeffs[:, d : d + 1]
        if d > 1:
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
        roots = np.linalg.eigvals(comp)
        # Two guarded Newton steps tighten the companion-matrix roots.
        for _ in range(2):
            val, der = _horner(coeffs, roots)
            with np.errstate(all="ignore"):
                step = np.where(der != 0, val / der, 0.0)
                cand = roots - step
                cval, _ = _horner(coeffs, cand)
            better = np.isfinite(cand) & (np.abs(cval) < np.abs(val))
            roots = np.where(better, cand, roots)
        out[rows, :d] = roots
    return out


def solve_roots(coeffs) -> np.ndarray:
    """All roots of ``sum p_i G^i`` with negligible leading terms trimmed."""
    p = coeffs.p if isinstance(coeffs, Degree8Coefficients) else np.asarray(coeffs, dtype=complex)
    roots = _roots_batch(p[None, :])[0]
    return roots[np.isfinite(roots)]


def _unsquared_newton(params: ModelParams, z: np.ndarray, g: np.ndarray) -> np.ndarray:
    """One Newton step on the unsquared equation (simple root even where the
    degree-8 polynomial has a near-double root)."""
    c, a, b, gam = params.c, params.alpha, params.beta, params.gamma
    with np.errstate(all="ignore"):
        m = z * g - 1.0
        s1 = principal_sqrt(gam * gam - 1.0 + 1.0 / (c * c * m * m))
        s2 = lower_sqrt(a * a + 4.0 * b * b * m)
        A, B = gam + s1, a + s2
        dA = -z / (c * c * m**3 * s1)
        dB = 2.0 * b * b * z / s2
        f = 0.5 * c * g * A * B - 1.0
        df = 0.5 * c * (A * B + g * dA * B + g * A * dB)
        return g - f / df


def _filter_mask(params: ModelParams, zs: np.ndarray, roots: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    res = unsquared_residual(params, zs[:, None], roots)
    near = (res > tol) & (res < 1e-4)
    if near.any():
        rows, cols = np.nonzero(near)
        z = zs[rows]
        g = roots[rows, cols]
        r = res[rows, cols]
        for _ in range(3):
            cand = _unsquared_newton(params, z, g)
            cres = unsquared_residual(params, z, cand)
            better = np.isfinite(cand) & (cres < r)
            g = np.where(better, cand, g)
            r = np.where(better, cres, r)
        roots[rows, cols] = g
        res[rows, cols] = r
    res = np.where(np.isfinite(roots), res, np.inf)
    mask = (roots.imag < 0.0) & (res <= tol)
    # Any Cauchy transform of a probability measure obeys |G|^2 <= -Im G / Im z
    # (Cauchy-Schwarz).  Used as a tie-breaker only: it removes the near-real
    # roots that survive the residual test when a radical degenerates (r = 0).
    with np.errstate(all="ignore"):
        admissible = np.abs(roots) ** 2 <= (-roots.imag / zs.imag[:, None]) * (1.0 + 1e-6) + 1e-12
    strict = mask & admissible
    use = strict.any(axis=1, keepdims=True)
    return np.where(use, strict, mask), res


def select_root(
    roots: Sequence[complex],
    z: complex,
    params: ModelParams,
    prev: complex | None = None,
    residual_tol: float = 1e-8,
) -> complex:
    """Pick the physical root: Im < 0, small unsquared residual, then continuity."""
    z = complex(z)
    if not z.imag > 0:
        raise DomainError("root selection needs Im(z) > 0", z=[z.real, z.imag])
    roots = np.asarray(roots, dtype=complex)
    mask, res = _filter_mask(params, np.array([z]), roots[None, :], residual_tol)
    mask, res = mask[0], res[0]
    if not mask.any():
        raise SelectionError(
            f"no root passed the physical filters at z = {z}",
            z=[z.real, z.imag],
            roots=[[r.real, r.imag] for r in roots],
            residuals=res.tolist(),
        )
    cands = roots[mask]
    target = prev if prev is not None else 1.0 / z
    return complex(cands[np.argmin(np.abs(cands - target))])


def _solve_chunk(params: ModelParams, zs: np.ndarray, prev: np.ndarray | None, tol: float):
    roots = _roots_batch(_p_matrix(params, zs))
    mask, res = _filter_mask(params, zs, roots, tol)
    count = mask.sum(axis=1)
    if np.any(count == 0):
        k = int(np.flatnonzero(count == 0)[0])
        raise SelectionError(
            f"no root passed the physical filters at x = {zs[k].real}",
            x=zs[k].real,
            y=zs[k].imag,
            roots=[[r.real, r.imag] for r in roots[k] if np.isfinite(r)],
            residuals=[float(v) for v in res[k] if np.isfinite(v)],
        )
    target = prev if prev is not None else 1.0 / zs
    dist = np.where(mask, np.abs(roots - target[:, None]), np.inf)
    pick = np.argmin(dist, axis=1)
    rows = np.arange(zs.size)
    return roots[rows, pick], res[rows, pick], roots, count


def solve_cauchy_grid(
    params: ModelParams,
    zs,
    *,
    prev=None,
    residual_tol: float = 1e-8,
    threads: int | None = None,
    chunk: int = 4096,
) -> CauchyGridSolution:
    """Selected root of the degree-8 polynomial at every point of ``zs``.

    ``prev`` (same shape as ``zs``) supplies continuation seeds used only to
    break ties between several admissible roots.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    if np.any(~(zs.imag > 0)):
        raise DomainError("grid points need Im(z) > 0")
    prev_arr = None if prev is None else np.asarray(prev, dtype=complex).ravel()
    bounds = [(i, min(i + chunk, zs.size)) for i in range(0, zs.size, chunk)]

    def work(span):
        i, j = span
        return _solve_chunk(params, zs[i:j], None if prev_arr is None else prev_arr[i:j], residual_tol)

    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(span) for span in bounds]
    g = np.concatenate([p[0] for p in parts]) if parts else np.empty(0, complex)
    res = np.concatenate([p[1] for p in parts]) if parts else np.empty(0)
    roots = np.concatenate([p[2] for p in parts]) if parts else np.empty((0, 8), complex)
    count = np.concatenate([p[3] for p in parts]) if parts else np.empty(0, int)
    return CauchyGridSolution(zs, g, res, roots, count)


def cauchy_c(params: ModelParams, z, *, prev=None, residual_tol: float = 1e-8):
    """Cauchy transform of the separable-model LSD at ``z`` (Im z > 0)."""
    arr = np.asarray(z, dtype=complex)
    sol = solve_cauchy_grid(params, arr.ravel(), prev=prev, residual_tol=residual_tol)
    return complex(sol.g[0]) if arr.ndim == 0 else sol.g.reshape(arr.shape)


def auto_bracket(params: ModelParams) -> tuple[float, float]:
    hi = 4.0 * (params.alpha + 2.0 * params.beta) * (1.0 + params.r) / (1.0 - params.r) * (1.0 + math.sqrt(params.c)) ** 2
    return 0.0, hi


def _richardson(ys: Sequence[float], values: np.ndarray) -> np.ndarray:
    """Polynomial extrapolation of ``values[k]`` (taken at ``ys[k]``) to y = 0."""
    ys = np.asarray(ys, dtype=float)
    out = np.zeros(values.shape[1:])
    for i, yi in enumerate(ys):
        w = 1.0
        for j, yj in enumerate(ys):
            if j != i:
                w *= yj / (yj - yi)
        out = out + w * values[i]
    return out


def _stieltjes(g_fn: Callable, xs: np.ndarray, ys: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    raw = np.stack([-np.imag(g_fn(xs + 1j * y)) / np.pi for y in ys])
    return _richardson(ys, raw), raw


def _outside(g_fn: Callable, x: float, y_hi: float = 1e-9, y_lo: float = 1e-10) -> bool:
    """True when ``-Im G(x + iy)`` scales linearly with ``y`` (x off the support)."""
    g1, g2 = g_fn(np.array([x + 1j * y_hi, x + 1j * y_lo]))
    return abs(g1.imag) > math.sqrt(y_hi / y_lo) * abs(g2.imag)


def _bisect_edge(g_fn: Callable, inside: float, outside: float, iters: int = 60) -> float:
    for _ in range(iters):
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if _outside(g_fn, mid):
            outside = mid
        else:
            inside = mid
    return 0.5 * (inside + outside)


def _refine_support(g_fn: Callable, xs: np.ndarray, dens: np.ndarray, floor: float) -> tuple[float, float]:
    above = np.flatnonzero(dens >= floor)
    i0, i1 = int(above[0]), int(above[-1])
    lo, hi = float(xs[i0]), float(xs[i1])
    peak = int(np.argmax(dens))
    try:
        if i1 + 1 < xs.size and _outside(g_fn, float(xs[i1 + 1])):
            k = i1
            while k > peak and _outside(g_fn, float(xs[k])):
                k -= 1
            hi = _bisect_edge(g_fn, float(xs[k]), float(xs[k + 1]))
        if i0 > 0 and _outside(g_fn, float(xs[i0 - 1])):
            k = i0
            while k < peak and _outside(g_fn, float(xs[k])):
                k += 1
            lo = _bisect_edge(g_fn, float(xs[k]), float(xs[k - 1]))
    except SelectionError:
        pass
    return lo, hi


def invert_cauchy(
    g_fn: Callable,
    xs,
    cfg: InversionConfig | None = None,
    *,
    meta: dict | None = None,
) -> DensityCurve:
    """Stieltjes inversion of an arbitrary Cauchy transform on the grid ``xs``.

    ``g_fn`` maps an array of upper-half-plane points to ``G`` values.
    """
    cfg = cfg or InversionConfig()
    xs = np.asarray(xs, dtype=float)
    dens, raw = _stieltjes(g_fn, xs, cfg.epsilon_schedule)
    dens = np.clip(dens, 0.0, None)
    if not np.any(dens >= cfg.density_floor):
        raise GridError("density is below the floor on the whole grid; support not bracketed")
    if cfg.refine_edges:
        lo, hi = _refine_support(g_fn, xs, dens, cfg.density_floor)
    else:
        above = np.flatnonzero(dens >= cfg.density_floor)
        lo, hi = float(xs[above[0]]), float(xs[above[-1]])
    dens = np.where((xs < lo) | (xs > hi), 0.0, dens)
    mass = float(np.trapezoid(dens, xs))
    info = dict(meta or {})
    info.setdefault("grid", {"lo": float(xs[0]), "hi": float(xs[-1]), "count": int(xs.size)})
    info["epsilon_schedule"] = list(cfg.epsilon_schedule)
    info["density_last_epsilon"] = raw[-1]
    return DensityCurve(xs, dens, SupportInterval(lo, hi), mass, info)


def _anchor_pass(params: ModelParams, xs: np.ndarray, y: float, tol: float) -> np.ndarray:
    """Sequential continuation along a coarse grid; returns one root per point."""
    out = np.empty(xs.size, dtype=complex)
    prev = None
    for k, x in enumerate(xs):
        z = complex(x, y)
        out[k] = select_root(solve_roots(p_coefficients(params, z)), z, params, prev=prev, residual_tol=tol)
        prev = out[k]
    return out


def _engine_g_fn(params: ModelParams, cfg: InversionConfig, anchor_x: np.ndarray, anchor_g: np.ndarray) -> Callable:
    def g_fn(zs):
        zs = np.asarray(zs, dtype=complex)
        idx = np.clip(np.searchsorted(anchor_x, zs.real), 0, anchor_x.size - 1)
        seeds = anchor_g[idx]
        return solve_cauchy_grid(params, zs, prev=seeds, residual_tol=cfg.residual_tol, threads=cfg.threads).g

    return g_fn


@functools.lru_cache(maxsize=32)
def _lsd_density_cached(params: ModelParams, cfg: InversionConfig) -> DensityCurve:
    y0 = cfg.epsilon_schedule[0]
    if cfg.grid is None:
        lo, hi = auto_bracket(params)
        coarse = np.linspace(lo, hi, cfg.anchors)
    else:
        coarse = np.linspace(cfg.grid.lo, cfg.grid.hi, cfg.anchors)
    anchor_g = _anchor_pass(params, coarse, y0, cfg.residual_tol)
    g_fn = _engine_g_fn(params, cfg, coarse, anchor_g)

    if cfg.grid is None:
        coarse_dens = np.clip(_stieltjes(g_fn, coarse, cfg.epsilon_schedule)[0], 0.0, None)
        above = np.flatnonzero(coarse_dens >= cfg.density_floor)
        if above.size == 0:
            raise GridError("auto-bracket coarse pass found no mass", bracket=[float(coarse[0]), float(coarse[-1])])
        i0 = max(int(above[0]) - 1, 0)
        i1 = min(int(above[-1]) + 1, coarse.size - 1)
        grid = GridSpec(float(coarse[i0]), float(coarse[i1]), 2001)
    else:
        grid = cfg.grid

    meta = {"params": params.as_dict(), "grid": grid.as_dict(), "anchors": cfg.anchors}
    curve = invert_cauchy(g_fn, grid.points(), cfg, meta=meta)
    if curve.mass < 0.9:
        raise GridError(f"density mass {curve.mass:.4f} < 0.9: grid does not bracket the support", mass=curve.mass)
    for arr in (curve.xs, curve.density):
        arr.flags.writeable = False
    return curve


def lsd_density(params: ModelParams, cfg: InversionConfig | None = None) -> DensityCurve:
    """Density of the separable-model LSD on a grid, with detected support.

    Without an explicit grid, a 64-point continuation pass over the
    auto-bracket locates the support and the 2001-point grid spans it.
    Results are cached per ``(params, cfg)``; the returned arrays are read-only.
    """
    return _lsd_density_cached(params, cfg or InversionConfig())


def toeplitz_lsd_density(r: float, grid: GridSpec | None = None) -> DensityCurve:
    """Analytic LSD of the exponential-decay Toeplitz matrix ``r**|a-b|``.

    Sampled on an open grid so the integrable edge singularities are never
    evaluated; by default the grid is clustered at both edges.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    model = ExponentialToeplitz(r)
    sup = support(model)
    if grid is None:
        grid = GridSpec(sup.lo, sup.hi, 2001, "chebyshev")
    elif grid.kind == "uniform":
        grid = GridSpec(grid.lo, grid.hi, grid.count, "open")
    xs = grid.points()
    dens = np.asarray(base_density(model, xs), dtype=float)
    mass = float(np.trapezoid(dens, xs))
    meta = {"params": {"r": r}, "grid": grid.as_dict()}
    return DensityCurve(xs, dens, sup, mass, meta)
