"""Acceptance checks shared by the test suite and ``seplsd validate``.

Each check runs one criterion at its stated size and tolerance and returns a
:class:`CheckResult`; nothing is relaxed when a check fails.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import density_cdf, ks_distance, ks_esd_vs_function, esd_cdf, shrinkage_experiment
from .lsd import GridSpec, InversionConfig, _lsd_density_cached, invert_cauchy, lsd_density
from .montecarlo import SimSpec, sample_ar1, sample_covariance, sample_spiked, sample_toeplitz_esd, vec_covariance_deviation
from .spiked import SpikeSpec, critical_theta, forward_map, shrink, wigner_spike_map, wigner_spike_shrink
from .transforms import (
    ExponentialToeplitz,
    MarchenkoPastur,
    ModelParams,
    ShiftedSemicircle,
    cauchy,
    cdf,
    density,
    m_transform,
    n_transform,
    support,
)

__all__ = ["CheckResult", "DEFAULT_PARAMS", "CHECKS", "run_check", "run_suite", "SHRINKAGE_MULTIPLIERS"]

DEFAULT_PARAMS = ModelParams(0.5, 1.0, 0.5, 0.5)
EDGE_BAND = 0.05
# Rank-10 spike levels for the shrinkage experiment, as multiples of the transition.
SHRINKAGE_MULTIPLIERS = (11.0, 10.0, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0)


@dataclass
class CheckResult:
    key: str
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.key} {self.name}: measured={self.measured:.6g} threshold={self.threshold:.6g} ({self.seconds:.2f}s)"

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "threshold": self.threshold,
            "detail": self.detail,
            "seconds": self.seconds,
        }


def _base_models():
    return [
        MarchenkoPastur(0.5),
        MarchenkoPastur(0.1),
        ShiftedSemicircle(1.0, 0.5),
        ShiftedSemicircle(0.0, 1.0),
        ShiftedSemicircle(3.0, 0.2),
        ExponentialToeplitz(0.5),
        ExponentialToeplitz(0.9),
    ]


def check_transform_identities() -> CheckResult:
    rng = np.random.default_rng(0)
    z = rng.uniform(-5, 20, 200) + 1j * rng.uniform(0.1, 10, 200)
    start = time.perf_counter()
    worst = {}
    for model in _base_models():
        w = m_transform(model, z)
        worst[repr(model)] = float(np.max(np.abs(m_transform(model, n_transform(model, w)) - w)))
    elapsed = time.perf_counter() - start
    err = max(worst.values())
    return CheckResult("AC01", "transform identities M(N(w)) = w", err <= 1e-9 and elapsed < 1.0, err, 1e-9,
                       {"per_model": worst, "runtime_s": elapsed, "runtime_limit_s": 1.0})


def check_closed_form_inversion() -> CheckResult:
    worst_density, worst_support = 0.0, 0.0
    per = {}
    for model in _base_models():
        s = support(model)
        pad = 0.25 * s.width
        xs = np.linspace(s.lo - pad, s.hi + pad, 2001)
        if not isinstance(model, ShiftedSemicircle):
            xs = xs[xs > 0]
        curve = invert_cauchy(lambda z, m=model: cauchy(m, z), xs)
        band = (xs > s.lo + EDGE_BAND) & (xs < s.hi - EDGE_BAND)
        d_err = float(np.max(np.abs(curve.density[band] - density(model, xs[band]))))
        s_err = max(abs(curve.support.lo - s.lo), abs(curve.support.hi - s.hi))
        per[repr(model)] = {"density_linf": d_err, "support_err": s_err}
        worst_density = max(worst_density, d_err)
        worst_support = max(worst_support, s_err)
    ok = worst_density <= 1e-3 and worst_support <= 1e-2
    return CheckResult("AC02", "closed-form Stieltjes inversion", ok, worst_density, 1e-3,
                       {"per_model": per, "support_err": worst_support, "support_tol": 1e-2})


def check_mp_reduction() -> CheckResult:
    params = ModelParams(0.5, 1.0, 0.0, 0.0)
    _lsd_density_cached.cache_clear()
    start = time.perf_counter()
    curve = lsd_density(params)
    elapsed = time.perf_counter() - start
    mp = MarchenkoPastur(0.5)
    err = float(np.max(np.abs(curve.density - density(mp, curve.xs))))
    ok = err <= 1e-2 and 0.997 <= curve.mass <= 1.003 and elapsed < 10.0
    return CheckResult("AC03", "MP reduction of the degree-8 engine", ok, err, 1e-2,
                       {"mass": curve.mass, "runtime_s": elapsed, "grid_points": int(curve.xs.size)})


def check_separable_ks(seeds=range(42, 47)) -> CheckResult:
    params = DEFAULT_PARAMS
    F = density_cdf(lsd_density(params))
    per, times = {}, {}
    for seed in seeds:
        start = time.perf_counter()
        sample = sample_covariance(SimSpec(1000, 2000, params, seed=seed))
        per[seed] = ks_distance(esd_cdf(sample), F)
        times[seed] = time.perf_counter() - start
    worst = max(per.values())
    ok = worst <= 0.05 and max(times.values()) < 120.0
    return CheckResult("AC04", "separable ESD vs LSD, 5 seeds", ok, worst, 0.05, {"ks": per, "runtime_s": times})


def check_toeplitz_esd() -> CheckResult:
    r = 0.5
    sample = sample_toeplitz_esd(2000, r)
    model = ExponentialToeplitz(r)
    ks = ks_esd_vs_function(sample, lambda x: cdf(model, x))
    lo, hi = float(sample.eigenvalues[0]), float(sample.eigenvalues[-1])
    inside = lo >= 1 / 3 - 0.05 and hi <= 3 + 0.05
    return CheckResult("AC05", "Toeplitz ESD vs LSD", ks <= 0.05 and inside, ks, 0.05, {"min_eig": lo, "max_eig": hi})


def check_mean_field(seed: int = 42, n: int = 2000, t: int = 4000) -> CheckResult:
    het = sample_ar1(n, t, "heterogeneous", seed)
    hom = sample_ar1(n, t, "homogeneous", seed)
    ks = ks_distance(esd_cdf(het), esd_cdf(hom))
    detail = {
        "seed": seed,
        "mean_rate": het.meta["mean_rate"],
        "het_max_eig": float(het.eigenvalues[-1]),
        "hom_max_eig": float(hom.eigenvalues[-1]),
    }
    return CheckResult("AC06", "heterogeneous vs homogeneous AR(1)", ks <= 0.05, ks, 0.05, detail)


def check_wigner_spike() -> CheckResult:
    eta = wigner_spike_map(2.0, 1.0)
    theta = wigner_spike_shrink(2.5, 1.0)
    err = max(abs(eta - 2.5), abs(theta - 2.0))
    plateau = all(wigner_spike_map(th, 1.0) == 2.0 for th in (0.0, 0.25, 0.5, 1.0))
    below = wigner_spike_shrink(2.0, 1.0) is None
    return CheckResult("AC07", "Wigner spike closed forms", err <= 1e-12 and plateau and below, err, 1e-12,
                       {"eta": eta, "theta_hat": theta, "plateau": plateau})


def check_spike_round_trip() -> CheckResult:
    params = DEFAULT_PARAMS
    crit = critical_theta(params)
    errs = {}
    for k in (1.1, 2.0, 5.0, 10.0):
        theta = k * crit
        eta = forward_map(params, SpikeSpec((theta,)))[0].eta
        hat = shrink(params, [eta])[0].theta_hat
        errs[k] = abs(hat - theta) / theta
    worst = max(errs.values())
    return CheckResult("AC08", "spike round trip shrink(forward(theta))", worst <= 1e-4, worst, 1e-4,
                       {"critical_theta": crit, "rel_err": errs})


def check_spiked_simulation(seeds=range(10)) -> CheckResult:
    params = DEFAULT_PARAMS
    crit = critical_theta(params)
    theta = 5.0 * crit
    eta = forward_map(params, SpikeSpec((theta,)))[0].eta
    errs = []
    for seed in seeds:
        sample = sample_spiked(SimSpec(1000, 2000, params, seed=seed), SpikeSpec((theta,)))
        errs.append(abs(sample.eigenvalues[-1] - eta) / eta)
    mean = float(np.mean(errs))
    return CheckResult("AC09", "spiked top eigenvalue vs prediction", mean <= 0.02, mean, 0.02,
                       {"eta_pred": eta, "theta": theta, "rel_errs": errs})


def check_shrinkage_experiment(trials: int = 100) -> CheckResult:
    params = DEFAULT_PARAMS
    crit = critical_theta(params)
    spike = SpikeSpec(tuple(k * crit for k in SHRINKAGE_MULTIPLIERS))
    table = shrinkage_experiment(SimSpec(1000, 2000, params, seed=42), spike, trials)
    medians = [row["median_abs"] for row in table.summary()]
    worst = float(max(medians))
    return CheckResult("AC10", "shrinkage experiment median |rel error|", worst <= 0.05 and all(table.recoverable), worst,
                       0.05, {"median_abs": medians, "thetas": list(spike.thetas), "trials": trials})


def check_kronecker() -> CheckResult:
    dev = vec_covariance_deviation(3, 4, ModelParams(0.75, 1.0, 0.5, 0.5), 100_000, 42)
    return CheckResult("AC11", "vec(U) covariance equals R kron S", dev <= 0.05, dev, 0.05)


def check_m_half_plane() -> CheckResult:
    ys = np.logspace(-2, 2, 41)
    worst_re, worst_im = -math.inf, -math.inf
    for model in (MarchenkoPastur(0.5), ShiftedSemicircle(1.0, 0.5), ExponentialToeplitz(0.5)):
        m = m_transform(model, 1j * ys)
        worst_re = max(worst_re, float(np.max(m.real)))
        if not isinstance(model, ShiftedSemicircle):
            worst_im = max(worst_im, float(np.max(m.imag)))
    ok = worst_re < 0 and worst_im < 0
    return CheckResult("AC12", "M-transform half-plane signs on the imaginary axis", ok, worst_re, 0.0,
                       {"max_re": worst_re, "max_im_mp_toeplitz": worst_im})


# Extended checks (full suite only).


def check_mass_suite() -> CheckResult:
    masses = {}
    for p in (DEFAULT_PARAMS, ModelParams(0.5, 1.0, 0.5, 0.0), ModelParams(0.5, 1.0, 0.0, 0.5),
              ModelParams(0.25, 1.0, 0.5, 0.5), ModelParams(0.5, 1.0, 0.5, 0.7)):
        masses[repr(p)] = lsd_density(p).mass
    worst = max(abs(m - 1.0) for m in masses.values())
    return CheckResult("EXT1", "LSD mass conservation", worst <= 3e-3, worst, 3e-3, {"mass": masses})


def check_epsilon_robustness() -> CheckResult:
    p = DEFAULT_PARAMS
    base = lsd_density(p)
    grid = GridSpec(float(base.xs[0]), float(base.xs[-1]), 2001)
    a = lsd_density(p, InversionConfig(epsilon_schedule=(1e-4,), grid=grid))
    b = lsd_density(p, InversionConfig(epsilon_schedule=(1e-5,), grid=grid))
    band = (a.xs > base.support.lo + EDGE_BAND) & (a.xs < base.support.hi - EDGE_BAND)
    err = float(np.max(np.abs(a.density[band] - b.density[band])))
    return CheckResult("EXT2", "density stable between y=1e-4 and y=1e-5", err <= 5e-3, err, 5e-3)


def check_mean_field_seeds() -> CheckResult:
    ks = {s: check_mean_field(seed=s).measured for s in range(5)}
    worst = max(ks.values())
    return CheckResult("EXT3", "heterogeneous vs homogeneous AR(1), 5 seeds", worst <= 0.05, worst, 0.05, {"ks": ks})


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "AC01": check_transform_identities,
    "AC02": check_closed_form_inversion,
    "AC03": check_mp_reduction,
    "AC04": check_separable_ks,
    "AC05": check_toeplitz_esd,
    "AC06": check_mean_field,
    "AC07": check_wigner_spike,
    "AC08": check_spike_round_trip,
    "AC09": check_spiked_simulation,
    "AC10": check_shrinkage_experiment,
    "AC11": check_kronecker,
    "AC12": check_m_half_plane,
}

EXTENDED: dict[str, Callable[[], CheckResult]] = {
    "EXT1": check_mass_suite,
    "EXT2": check_epsilon_robustness,
    "EXT3": check_mean_field_seeds,
}


def run_check(key: str) -> CheckResult:
    fn = CHECKS.get(key) or EXTENDED[key]
    start = time.perf_counter()
    result = fn()
    result.seconds = time.perf_counter() - start
    return result


def run_suite(suite: str = "quick", only=None, on_result: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    """``quick`` runs every acceptance criterion; ``full`` adds the extended checks."""
    if suite not in ("quick", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    keys = list(CHECKS) + (list(EXTENDED) if suite == "full" else [])
    if only:
        keys = [k for k in keys if k in set(only)]
    results = []
    for key in keys:
        res = run_check(key)
        if on_result:
            on_result(res)
        results.append(res)
    return results
