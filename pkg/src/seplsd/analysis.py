"""CDF construction, Kolmogorov-Smirnov distances and the shrinkage experiment."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import _io
from .errors import MassError
from .lsd import DensityCurve
from .montecarlo import EsdSample, SimSpec, sample_spiked
from .spiked import SpikeSpec, critical_theta, shrink
from .transforms import BaseModel, cdf as model_cdf

__all__ = [
    "CdfCurve",
    "ErrorTable",
    "esd_cdf",
    "density_cdf",
    "model_cdf_curve",
    "ks_distance",
    "ks_esd_vs_function",
    "ks_report",
    "shrinkage_experiment",
]

log = logging.getLogger(__name__)

QUANTILES = ("min", "q25", "median", "q75", "max")


@dataclass(frozen=True)
class CdfCurve:
    """A CDF sampled at ``xs``.

    ``kind="step"`` is right-continuous and constant between abscissae;
    ``kind="linear"`` interpolates linearly.  Both read 0 left of ``xs[0]``
    and 1 right of ``xs[-1]``.
    """

    xs: np.ndarray
    F: np.ndarray
    kind: str = "linear"

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        F = np.asarray(self.F, dtype=float)
        if xs.ndim != 1 or xs.shape != F.shape or xs.size == 0:
            raise ValueError("xs and F must be equal-length nonempty vectors")
        if np.any(np.diff(xs) < 0):
            raise ValueError("xs must be ascending")
        if np.any(np.diff(F) < -1e-12) or F[0] < -1e-12 or F[-1] > 1 + 1e-12:
            raise ValueError("F must be nondecreasing within [0, 1]")
        if self.kind not in ("step", "linear"):
            raise ValueError(f"unknown CDF kind {self.kind!r}")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "F", np.clip(F, 0.0, 1.0))

    def __call__(self, x, *, left: bool = False) -> np.ndarray:
        """Evaluate the CDF, or its left limit when ``left`` is set."""
        x = np.asarray(x, dtype=float)
        if self.kind == "step":
            idx = np.searchsorted(self.xs, x, side="left" if left else "right")
            vals = np.concatenate(([0.0], self.F))
            return vals[idx]
        out = np.interp(x, self.xs, self.F, left=0.0, right=1.0)
        if left:
            out = np.where(x == self.xs[0], 0.0, out)
        else:
            out = np.where(x == self.xs[-1], self.F[-1], out)
        return out


@dataclass
class ErrorTable:
    thetas: tuple[float, ...]
    errors: np.ndarray
    recoverable: tuple[bool, ...]
    meta: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return int(self.errors.shape[1])

    def summary(self) -> list[dict]:
        rows = []
        for i, theta in enumerate(self.thetas):
            col = self.errors[i]
            q = np.nanquantile(col, [0.0, 0.25, 0.5, 0.75, 1.0]) if np.any(np.isfinite(col)) else [np.nan] * 5
            row = {"theta": theta, "recoverable": self.recoverable[i]}
            row.update(dict(zip(QUANTILES, (float(v) for v in q))))
            row["median_abs"] = float(np.nanmedian(np.abs(col))) if np.any(np.isfinite(col)) else float("nan")
            rows.append(row)
        return rows

    def to_csv(self, path: str | Path) -> Path:
        rows = ((theta, k, self.errors[i, k]) for i, theta in enumerate(self.thetas) for k in range(self.trials))
        return _io.write_csv(path, ["theta", "trial", "rel_error"], rows)

    def to_json(self, path: str | Path) -> Path:
        return _io.write_json(path, {"summary": self.summary(), **self.meta})


def esd_cdf(sample: EsdSample | np.ndarray) -> CdfCurve:
    ev = np.sort(np.asarray(getattr(sample, "eigenvalues", sample), dtype=float))
    if ev.size == 0:
        raise ValueError("empty eigenvalue list")
    xs, counts = np.unique(ev, return_counts=True)
    return CdfCurve(xs, np.cumsum(counts) / ev.size, "step")


def density_cdf(curve: DensityCurve) -> CdfCurve:
    """Cumulative trapezoid integral of a density curve, normalised by its mass."""
    F = cumulative_trapezoid(curve.density, curve.xs, initial=0.0)
    mass = float(F[-1])
    if not 0.99 <= mass <= 1.01:
        raise MassError(f"density mass {mass:.5f} is outside [0.99, 1.01]", mass=mass)
    return CdfCurve(curve.xs, np.clip(F / mass, 0.0, 1.0), "linear")


def model_cdf_curve(model: BaseModel, xs) -> CdfCurve:
    xs = np.asarray(xs, dtype=float)
    return CdfCurve(xs, np.asarray(model_cdf(model, xs), dtype=float), "linear")


def ks_distance(a: CdfCurve, b: CdfCurve) -> float:
    """Sup-distance on the union grid, including left limits at every abscissa.

    Between consecutive union points each curve is constant or linear, so
    the supremum is attained at those points (or as a left limit there).
    """
    grid = np.union1d(a.xs, b.xs)
    right = np.abs(a(grid) - b(grid))
    left = np.abs(a(grid, left=True) - b(grid, left=True))
    return float(max(right.max(), left.max()))


def ks_esd_vs_function(sample: EsdSample | np.ndarray, F: Callable) -> float:
    """Exact KS distance between an ESD and a continuous CDF ``F``."""
    ev = np.sort(np.asarray(getattr(sample, "eigenvalues", sample), dtype=float))
    n = ev.size
    vals = np.asarray(F(ev), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(hi - vals), np.max(vals - lo)))


def ks_report(sample: EsdSample, ks: float) -> dict:
    return {"ensemble": sample.ensemble, "n": sample.n, "t": sample.t, "seed": sample.seed, "ks": ks}


def shrinkage_experiment(
    spec: SimSpec,
    spike: SpikeSpec,
    trials: int,
    *,
    curve: DensityCurve | None = None,
    threads: int | None = None,
) -> ErrorTable:
    """Relative errors ``(theta_hat - theta)/theta`` of the shrinkage estimator.

    Trial ``k`` uses the RNG streams of trial index ``k``; spikes at or below
    the transition are flagged and still reported.
    """
    params = spec.params
    crit = critical_theta(params, curve)
    recoverable = tuple(theta > crit for theta in spike.thetas)
    if not all(recoverable):
        log.warning("spike levels at or below the transition %.6g are flagged", crit)
    r = spike.rank

    def one(k: int) -> np.ndarray:
        sample = sample_spiked(spec, spike, trial=k)
        top = sample.eigenvalues[::-1][:r]
        res = shrink(params, top, curve=curve)
        hats = np.array([np.nan if x.theta_hat is None else x.theta_hat for x in res])
        return (hats - np.asarray(spike.thetas)) / np.asarray(spike.thetas)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(one, range(trials)))
    else:
        cols = [one(k) for k in range(trials)]
    errors = np.column_stack(cols) if cols else np.empty((r, 0))
    meta = {"spec": spec.as_dict(), "critical_theta": crit, "trials": trials}
    return ErrorTable(spike.thetas, errors, recoverable, meta)
