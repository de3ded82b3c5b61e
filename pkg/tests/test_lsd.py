import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seplsd.errors import DegenerateError, DomainError, GridError, SelectionError
from seplsd.lsd import (
    GridSpec,
    InversionConfig,
    auto_bracket,
    cauchy_c,
    invert_cauchy,
    lsd_density,
    p_coefficients,
    select_root,
    solve_cauchy_grid,
    solve_roots,
    toeplitz_lsd_density,
    unsquared_residual,
)
from seplsd.transforms import ExponentialToeplitz, MarchenkoPastur, ModelParams, cauchy, density, m_transform, n_composed

DEFAULT = ModelParams(0.5, 1.0, 0.5, 0.5)


def poly_value(p, g):
    return sum(complex(p[i]) * g**i for i in range(9))


def test_p_coefficients_rederived_symbolically():
    sp = pytest.importorskip("sympy")
    G = sp.Symbol("G")
    c, a, b, r = sp.Rational(1, 2), sp.Integer(1), sp.Rational(1, 2), sp.Rational(1, 2)
    gam = (1 + r**2) / (1 - r**2)
    z = sp.Rational(3, 2) + sp.I / 7
    m = z * G - 1
    # Eliminate both radicals from 2/(cG) = (gamma + S1)(alpha + S2).
    P, X = 2 / (c * G), 1 / (c**2 * m**2)
    lhs = (P**2 - 2 * gam * a * P + (1 - X) * (2 * a**2 + 4 * b**2 * m)) ** 2 - (a**2 + 4 * b**2 * m) * 4 * (
        gam * P - a * (1 - X)
    ) ** 2
    num = sp.numer(sp.together(sp.expand(lhs)))
    quotient, rem = sp.div(sp.Poly(sp.expand(num), G), sp.Poly(sp.expand(m**4), G))
    assert rem.is_zero
    derived = [complex(v) for v in quotient.all_coeffs()[::-1]]
    params = ModelParams(0.5, 1.0, 0.5, 0.5)
    ours = p_coefficients(params, complex(z)).p
    ratio = derived[8] / ours[8]
    assert np.allclose(np.array(derived), ratio * ours, rtol=1e-12)
    printed = p_coefficients(params, complex(z), printed=True).p
    assert not np.allclose(np.array(derived), ratio * printed, rtol=1e-6)


def test_p_coefficients_constant_terms():
    p = p_coefficients(DEFAULT, 0.0)
    assert p[0] == pytest.approx(16.0)
    assert p[8] == 0 and p[7] == 0
    z = 0.25
    assert p_coefficients(DEFAULT, z)[8] == pytest.approx(0.0625 * z**4)


def test_true_cauchy_value_is_a_root_of_corrected_polynomial_only():
    z = complex(2.0, 0.05)
    g = cauchy_c(DEFAULT, z)
    scale = np.max(np.abs(p_coefficients(DEFAULT, z).p))
    assert abs(poly_value(p_coefficients(DEFAULT, z).p, g)) <= 1e-10 * scale
    assert abs(poly_value(p_coefficients(DEFAULT, z, printed=True).p, g)) > 1e-4 * scale
    assert unsquared_residual(DEFAULT, z, g) <= 1e-10


def test_selected_root_satisfies_n_transform_identity():
    for z in [complex(1.0, 0.1), complex(3.0, 0.01), complex(6.0, 0.5), complex(-1.0, 2.0)]:
        g = cauchy_c(DEFAULT, z)
        m = z * g - 1
        assert abs(n_composed(DEFAULT, m) - z) <= 1e-8 * abs(z)


def test_cauchy_c_matches_simulated_resolvent():
    from seplsd.montecarlo import SimSpec, sample_covariance

    ev = sample_covariance(SimSpec(1000, 2000, DEFAULT, seed=7)).eigenvalues
    for z in [complex(1.0, 0.5), complex(3.0, 0.5), complex(5.0, 0.5)]:
        empirical = np.mean(1.0 / (z - ev))
        assert abs(cauchy_c(DEFAULT, z) - empirical) <= 5e-3


def test_solve_roots_factored_quadratic():
    roots = solve_roots([6.0, -5.0, 1.0, 0, 0, 0, 0, 0, 0])
    assert sorted(roots.real) == pytest.approx([2.0, 3.0])
    with pytest.raises(DegenerateError):
        solve_roots(np.zeros(9))


@settings(max_examples=40, deadline=None)
@given(x=st.floats(-2, 8), y=st.floats(1e-3, 5))
def test_solve_roots_residual_bound(x, y):
    p = p_coefficients(DEFAULT, complex(x, y)).p
    roots = solve_roots(p)
    scale = np.max(np.abs(p)) * np.maximum(1.0, np.abs(roots)) ** 8
    assert np.all(np.abs([poly_value(p, r) for r in roots]) <= 1e-8 * scale)


def test_trim_reduces_to_mp_degree():
    params = ModelParams(0.5, 1.0, 0.0, 0.0)
    z = complex(1.3, 0.2)
    roots = solve_roots(p_coefficients(params, z))
    assert roots.size == 4
    g = select_root(roots, z, params)
    assert abs(g - cauchy(MarchenkoPastur(0.5), z)) <= 1e-10


def test_select_root_large_z_asymptotics():
    z = 1e3j
    g = select_root(solve_roots(p_coefficients(DEFAULT, z)), z, DEFAULT)
    assert abs(g * z - 1) <= 0.01


def test_select_root_errors():
    with pytest.raises(DomainError):
        select_root([1.0], 1.0, DEFAULT)
    with pytest.raises(SelectionError) as info:
        select_root([1.0 + 1j, 2.0 + 0.5j], complex(1, 1), DEFAULT)
    assert len(info.value.payload["roots"]) == 2


def test_mp_reduction_matches_closed_form_on_grid():
    params = ModelParams(0.5, 1.0, 0.0, 0.0)
    zs = np.linspace(0.01, 4, 200) + 1e-3j
    sol = solve_cauchy_grid(params, zs)
    assert np.max(np.abs(sol.g - cauchy(MarchenkoPastur(0.5), zs))) <= 1e-6


def test_filters_leave_single_root_almost_everywhere():
    curve = lsd_density(DEFAULT)
    sol = solve_cauchy_grid(DEFAULT, curve.xs + 1e-4j)
    assert np.mean(sol.survivors == 1) >= 0.99


def test_mp_reduction_density_and_mass():
    curve = lsd_density(ModelParams(0.5, 1.0, 0.0, 0.0))
    assert np.max(np.abs(curve.density - density(MarchenkoPastur(0.5), curve.xs))) <= 1e-2
    assert 0.997 <= curve.mass <= 1.003


@pytest.mark.parametrize(
    "params",
    [DEFAULT, ModelParams(0.5, 1.0, 0.5, 0.0), ModelParams(0.5, 1.0, 0.0, 0.5), ModelParams(0.25, 1.0, 0.5, 0.5), ModelParams(0.5, 1.0, 0.5, 0.7)],
    ids=repr,
)
def test_mass_conservation(params):
    assert 0.997 <= lsd_density(params).mass <= 1.003


def test_default_curve_shape():
    curve = lsd_density(DEFAULT)
    assert curve.xs.size == 2001
    assert curve.support.lo == pytest.approx(0.0, abs=1e-9)
    assert 4.6 < curve.support.hi < 4.8
    assert np.all(curve.density >= 0)
    assert np.all(curve.density[curve.xs > curve.support.hi] == 0)
    with pytest.raises(ValueError):
        curve.density[0] = 1.0


def test_epsilon_robustness_away_from_edges():
    base = lsd_density(DEFAULT)
    grid = GridSpec(float(base.xs[0]), float(base.xs[-1]), 2001)
    a = lsd_density(DEFAULT, InversionConfig(epsilon_schedule=(1e-4,), grid=grid))
    b = lsd_density(DEFAULT, InversionConfig(epsilon_schedule=(1e-5,), grid=grid))
    band = (a.xs > base.support.lo + 0.05) & (a.xs < base.support.hi - 0.05)
    assert np.max(np.abs(a.density[band] - b.density[band])) <= 5e-3


def test_grid_not_bracketing_support():
    with pytest.raises(GridError):
        lsd_density(DEFAULT, InversionConfig(grid=GridSpec(10.0, 20.0, 50)))
    with pytest.raises(GridError):
        lsd_density(DEFAULT, InversionConfig(grid=GridSpec(1.0, 2.0, 200)))


def test_auto_bracket_value():
    lo, hi = auto_bracket(DEFAULT)
    assert lo == 0.0
    assert hi == pytest.approx(4 * 2.0 * 3.0 * (1 + np.sqrt(0.5)) ** 2)


def test_inversion_config_validation():
    with pytest.raises(DomainError):
        InversionConfig(epsilon_schedule=(1e-4, 1e-3))
    with pytest.raises(DomainError):
        InversionConfig(epsilon_schedule=(0.0,))
    with pytest.raises(DomainError):
        InversionConfig(density_floor=0.0)
    with pytest.raises(GridError):
        GridSpec(1.0, 1.0, 10)
    with pytest.raises(GridError):
        GridSpec(0.0, 1.0, 1)


def test_invert_closed_form_semicircle():
    xs = np.linspace(-0.5, 2.5, 1501)
    from seplsd.transforms import ShiftedSemicircle

    model = ShiftedSemicircle(1.0, 0.5)
    curve = invert_cauchy(lambda z: cauchy(model, z), xs)
    assert curve.support.lo == pytest.approx(0.0, abs=1e-6)
    assert curve.support.hi == pytest.approx(2.0, abs=1e-6)
    assert curve.mass == pytest.approx(1.0, abs=2e-3)


def test_toeplitz_lsd_density():
    curve = toeplitz_lsd_density(0.5)
    assert curve.xs[0] > 1 / 3 and curve.xs[-1] < 3
    assert curve.mass == pytest.approx(1.0, abs=2e-2)
    assert np.allclose(curve.density, density(ExponentialToeplitz(0.5), curve.xs))
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            toeplitz_lsd_density(bad)


def test_density_curve_io(tmp_path):
    curve = lsd_density(ModelParams(0.5, 1.0, 0.0, 0.0))
    path = curve.to_csv(tmp_path / "lsd.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "x,density" and len(lines) == curve.xs.size + 1
    assert float(lines[1].split(",")[0]) == curve.xs[0]
    import json

    payload = json.loads(curve.to_json(tmp_path / "lsd.json").read_text())
    assert payload["mass"] == curve.mass and len(payload["density"]) == curve.xs.size


def test_cauchy_c_herglotz():
    zs = np.linspace(-1, 8, 50) + 0.3j
    g = cauchy_c(DEFAULT, zs)
    assert np.all(g.imag < 0)
    # M-transform of the separable law on the imaginary axis has negative real part.
    y = np.logspace(-1, 2, 10)
    m = 1j * y * cauchy_c(DEFAULT, 1j * y) - 1
    assert np.all(m.real < 0)


def test_mp_m_transform_consistency():
    params = ModelParams(0.5, 1.0, 0.0, 0.0)
    z = complex(1.5, 0.4)
    assert abs(z * cauchy_c(params, z) - 1 - m_transform(MarchenkoPastur(0.5), z)) <= 1e-10
