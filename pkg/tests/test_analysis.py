import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seplsd.analysis import (
    CdfCurve,
    ErrorTable,
    density_cdf,
    esd_cdf,
    ks_distance,
    ks_esd_vs_function,
    model_cdf_curve,
    shrinkage_experiment,
)
from seplsd.errors import MassError
from seplsd.lsd import DensityCurve
from seplsd.montecarlo import SimSpec
from seplsd.spiked import SpikeSpec, critical_theta
from seplsd.transforms import MarchenkoPastur, ShiftedSemicircle, SupportInterval, cdf, density

samples = st.lists(st.floats(-10, 10), min_size=1, max_size=30)


def test_esd_cdf_steps():
    F = esd_cdf(np.array([1.0, 2.0, 3.0]))
    assert F(2.0) == pytest.approx(2 / 3)
    assert F(2.0, left=True) == pytest.approx(1 / 3)
    assert F(0.0) == 0.0 and F(5.0) == 1.0
    assert esd_cdf(np.array([1.0, 1.0]))(1.0) == 1.0


def test_ks_disjoint_point_masses():
    assert ks_distance(esd_cdf(np.array([1.0])), esd_cdf(np.array([2.0]))) == 1.0


def test_ks_identical_is_zero():
    ev = np.array([0.5, 1.0, 4.0])
    assert ks_distance(esd_cdf(ev), esd_cdf(ev)) == 0.0


@given(a=samples, b=samples)
def test_ks_symmetric_and_bounded(a, b):
    fa, fb = esd_cdf(np.array(a)), esd_cdf(np.array(b))
    d = ks_distance(fa, fb)
    assert d == ks_distance(fb, fa)
    assert 0.0 <= d <= 1.0


@given(a=samples, b=samples, c=samples)
def test_ks_triangle_inequality(a, b, c):
    fa, fb, fc = (esd_cdf(np.array(v)) for v in (a, b, c))
    assert ks_distance(fa, fc) <= ks_distance(fa, fb) + ks_distance(fb, fc) + 1e-12


@settings(max_examples=50)
@given(a=samples, b=samples)
def test_ks_matches_brute_force(a, b):
    fa, fb = esd_cdf(np.array(a)), esd_cdf(np.array(b))
    pts = np.union1d(a, b)
    probe = np.concatenate([pts, pts - 1e-9, pts + 1e-9])
    assert ks_distance(fa, fb) == pytest.approx(np.max(np.abs(fa(probe) - fb(probe))), abs=1e-12)


def test_ks_esd_vs_function_matches_union_grid():
    ev = np.array([0.2, 0.5, 0.9])
    model = ShiftedSemicircle(0.5, 0.25)
    xs = np.linspace(0.0, 1.0, 100001)
    grid = ks_distance(esd_cdf(ev), model_cdf_curve(model, xs))
    exact = ks_esd_vs_function(ev, lambda x: cdf(model, x))
    assert exact == pytest.approx(grid, abs=1e-4)


def test_cdf_curve_validation():
    with pytest.raises(ValueError):
        CdfCurve(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        CdfCurve(np.array([0.0, 1.0]), np.array([0.5, 0.2]))
    with pytest.raises(ValueError):
        CdfCurve(np.array([0.0]), np.array([0.5]), "spline")


def _curve(xs, dens):
    return DensityCurve(xs, dens, SupportInterval(float(xs[0]), float(xs[-1])), float(np.trapezoid(dens, xs)))


def test_density_cdf_semicircle_median():
    model = ShiftedSemicircle(0.0, 1.0)
    xs = np.linspace(-2, 2, 4001)
    F = density_cdf(_curve(xs, density(model, xs)))
    assert F(0.0) == pytest.approx(0.5, abs=1e-9)
    assert F(-3.0) == 0.0 and F(3.0) == 1.0


def test_density_cdf_mass_error():
    xs = np.linspace(0, 1, 101)
    with pytest.raises(MassError) as info:
        density_cdf(_curve(xs, 0.5 * np.ones_like(xs)))
    assert info.value.payload["mass"] == pytest.approx(0.5)


def test_mp_esd_ks_against_law():
    from seplsd.montecarlo import sample_covariance
    from seplsd.transforms import ModelParams

    ev = sample_covariance(SimSpec(400, 800, ModelParams(0.5, 1.0, 0.0, 0.0), seed=1))
    assert ks_esd_vs_function(ev, lambda x: cdf(MarchenkoPastur(0.5), x)) <= 0.02


def test_error_table_summary():
    errors = np.array([[0.1, -0.2, 0.3, 0.0], [np.nan, np.nan, np.nan, np.nan]])
    table = ErrorTable((3.0, 1.0), errors, (True, False))
    row, flagged = table.summary()
    assert row["median"] == pytest.approx(0.05) and row["min"] == -0.2 and row["max"] == 0.3
    assert row["median_abs"] == pytest.approx(0.15)
    assert np.isnan(flagged["median"]) and flagged["recoverable"] is False
    single = ErrorTable((2.0,), np.array([[0.4]]), (True,)).summary()[0]
    assert all(single[k] == 0.4 for k in ("min", "q25", "median", "q75", "max"))


@given(st.permutations([0.3, -0.1, 0.2, 0.05, -0.4]))
def test_error_table_permutation_invariant(perm):
    base = ErrorTable((2.0,), np.array([[0.3, -0.1, 0.2, 0.05, -0.4]]), (True,)).summary()
    assert ErrorTable((2.0,), np.array([perm]), (True,)).summary() == base


def test_error_table_csv(tmp_path):
    table = ErrorTable((2.0,), np.array([[0.1, -0.1]]), (True,))
    lines = table.to_csv(tmp_path / "e.csv").read_text().splitlines()
    assert lines == ["theta,trial,rel_error", "2.0,0,0.1", "2.0,1,-0.1"]


def test_shrinkage_experiment_flags_subcritical():
    spec = SimSpec.from_dims(200, 400, seed=3)
    crit = critical_theta(spec.params)
    table = shrinkage_experiment(spec, SpikeSpec((4 * crit, 0.5 * crit)), 2)
    assert table.recoverable == (True, False)
    assert table.errors.shape == (2, 2)
    assert np.all(np.abs(table.errors[0]) < 0.2)
    again = shrinkage_experiment(spec, SpikeSpec((4 * crit, 0.5 * crit)), 2, threads=2)
    assert np.array_equal(table.errors, again.errors, equal_nan=True)
