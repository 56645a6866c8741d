"""Momentum-transfer distributions: densities, closed forms and quadrature."""

import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from recoilfringe import (Delta, DisplacedGaussian, Exponential, GeneralGaussian, HalfGaussian,
                          Mandel, Tabulated, Uniform, analytic_visibility_phase, evaluate_pdf,
                          make_distribution, numeric_visibility_phase, sweep_curve)
from recoilfringe.distributions import (characteristic_integral, gaussian_integral,
                                        half_gaussian_form, normalization, unwrap_phase,
                                        wrap_phase)
from recoilfringe.errors import (ConfigurationError, ContractViolation, CSVParseError,
                                 DomainError, NumericError, UnsupportedVariantError)

K_I = 2 * math.pi / 589e-9
LAM_I = 589e-9


def all_dists():
    return [Mandel(K_I), HalfGaussian(K_I, 0.7), HalfGaussian(K_I, 0.7, 2.0),
            DisplacedGaussian(K_I, 0.7), GeneralGaussian(K_I, 0.4, 0.9), Exponential(K_I, 1.0),
            Uniform(K_I), Uniform(K_I, 0.0, 1.0), Uniform(K_I, 1.0, 2.0), Uniform(K_I, 0.3, 1.2)]


def quad_integral(dist, theta):
    # independent oracle: scipy's QUADPACK on the scaled density
    f = dist.pdf_scaled
    lo, hi = 0.0, 2.0
    if isinstance(dist, Uniform):
        lo, hi = dist.k1_over_ki, dist.k2_over_ki
    re = quad(lambda u: float(f(u)) * math.cos(theta * u), lo, hi, limit=400, epsabs=1e-14,
              epsrel=1e-13)[0]
    im = quad(lambda u: float(f(u)) * math.sin(theta * u), lo, hi, limit=400, epsabs=1e-14,
              epsrel=1e-13)[0]
    return complex(re, im)


# densities

def test_mandel_density_values():
    m = Mandel(K_I)
    assert m.pdf_scaled(0.0) == pytest.approx(0.75)
    assert m.pdf_scaled(1.0) == pytest.approx(0.375)
    assert m.pdf_scaled(2.0) == pytest.approx(0.75)
    # dimensional density carries 1/k_i
    assert evaluate_pdf(m, K_I) == pytest.approx(0.375 / K_I)


@pytest.mark.parametrize("dist", all_dists(), ids=lambda d: "%s" % (d,))
def test_normalised_on_support(dist):
    assert normalization(dist) == pytest.approx(1.0, abs=1e-10)


def test_gaussian_prefactor_matches_quadrature():
    g = GeneralGaussian(K_I, 0.7, 1.5)
    mass = quad(lambda u: math.exp(-((u - 1.5) / 0.7) ** 2), 0, 2, epsabs=1e-15)[0]
    assert g.gamma == pytest.approx(1 / mass, rel=1e-13)


def test_half_gaussian_nearly_vanishes_at_far_end():
    g = HalfGaussian(K_I, 0.7)
    assert g.pdf_scaled(2.0) / g.pdf_scaled(0.0) < 1e-3


def test_exponential_prefactor():
    e = Exponential(K_I, 1.0)
    assert e.prefactor == pytest.approx(1 / (1 - math.exp(-2)), rel=1e-15)
    assert e.pdf_scaled(2.0) == pytest.approx(e.prefactor)


def test_mirror_densities():
    u = np.linspace(0, 2, 41)
    a, b = HalfGaussian(K_I, 0.7, 0.0), HalfGaussian(K_I, 0.7, 2.0)
    assert np.allclose(a.pdf_scaled(u), b.pdf_scaled(2 - u), rtol=1e-14)


def test_pdf_outside_support_rejected():
    with pytest.raises(DomainError):
        evaluate_pdf(Mandel(K_I), -0.1 * K_I)
    with pytest.raises(DomainError):
        evaluate_pdf(Mandel(K_I), 2.1 * K_I)


def test_delta_has_no_density():
    with pytest.raises(UnsupportedVariantError):
        Delta(K_I, 1.0).pdf_scaled(1.0)


@pytest.mark.parametrize("bad", [
    lambda: Mandel(-1.0), lambda: GeneralGaussian(K_I, 0.0, 1.0),
    lambda: GeneralGaussian(K_I, 0.7, 2.5), lambda: HalfGaussian(K_I, 0.7, 1.0),
    lambda: Exponential(K_I, 0.0), lambda: Uniform(K_I, 1.0, 1.0), lambda: Uniform(K_I, 0.0, 2.5),
    lambda: Delta(K_I, 3.0),
])
def test_invalid_parameters(bad):
    with pytest.raises(ConfigurationError):
        bad()


# closed forms against independent quadrature

@pytest.mark.parametrize("dist", all_dists(), ids=lambda d: "%s" % (d,))
@pytest.mark.parametrize("x", [0.0, 0.13, 0.437, 0.9, 1.5, 2.0])
def test_closed_form_matches_quadpack(dist, x):
    theta = K_I * x * LAM_I
    ref = quad_integral(dist, theta)
    got = analytic_visibility_phase(dist, x * LAM_I).integral
    assert abs(got - ref) < 1e-10


def test_exponential_against_hand_antiderivative():
    # int_0^2 A exp(eps(u-2)) exp(i theta u) du = A e^{-2 eps} (e^{2(eps+i theta)} - 1)/(eps + i theta)
    eps = 1.0
    A = eps / (1 - math.exp(-2 * eps))
    for x in np.linspace(0, 2, 21):
        theta = 2 * math.pi * x
        s = complex(eps, theta)
        ref = A * math.exp(-2 * eps) * (cmath.exp(2 * s) - 1) / s
        vp = analytic_visibility_phase(Exponential(K_I, eps), x * LAM_I)
        assert vp.visibility == pytest.approx(abs(ref), rel=1e-12)
        assert wrap_phase(vp.phase_rad - cmath.phase(ref)) == pytest.approx(0, abs=1e-12)


def test_uniform_visibility_is_signed_sinc():
    vp = analytic_visibility_phase(Uniform(K_I), 0.75 * LAM_I)
    # sinc(theta) with theta = 1.5 pi is negative
    assert vp.signed_visibility == pytest.approx(math.sin(1.5 * math.pi) / (1.5 * math.pi))
    assert vp.visibility == pytest.approx(abs(vp.signed_visibility))


def test_mandel_small_argument_series_continuous():
    # the series branch and the trigonometric branch meet smoothly at theta = 0.5
    lo = analytic_visibility_phase(Mandel(K_I), (0.5 - 1e-9) / K_I).visibility
    hi = analytic_visibility_phase(Mandel(K_I), (0.5 + 1e-9) / K_I).visibility
    assert abs(lo - hi) < 1e-9


def test_mandel_first_zero_before_half_wavelength():
    # contrast falls to zero for 0 < d_p/lambda_i < 0.5
    x = np.linspace(0.3, 0.5, 2001)
    v = [analytic_visibility_phase(Mandel(K_I), xi * LAM_I).signed_visibility for xi in x]
    crossing = x[np.flatnonzero(np.diff(np.sign(v)))[0]]
    assert 0.43 < crossing < 0.44


def test_mandel_first_zero_bisection_oracle():
    from scipy.optimize import brentq

    def v(t):  # (3/8) int_{-1}^{1}(1+s^2) cos(t s) ds by quadrature
        return 0.375 * quad(lambda s: (1 + s * s) * math.cos(t * s), -1, 1)[0]

    t0 = brentq(v, 2.0, 3.2)
    assert t0 / (2 * math.pi) == pytest.approx(0.437, abs=0.01)
    sv = analytic_visibility_phase(Mandel(K_I), t0 / K_I).signed_visibility
    assert abs(sv) < 1e-12


# general Gaussian consistency

@pytest.mark.parametrize("x", np.linspace(0, 2, 17))
def test_general_gaussian_reduces_to_end_point_forms(x):
    theta = 2 * math.pi * x
    I0 = gaussian_integral(0.7, 0.0, theta)
    v, ph = half_gaussian_form(0.7, theta)
    assert abs(I0) == pytest.approx(v, abs=1e-12)
    if v > 1e-6:
        assert wrap_phase(cmath.phase(I0) - ph) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("eta", [0.0, 0.4, 1.0, 1.5])
def test_gaussian_mirror_properties(eta):
    for x in np.linspace(0.05, 2, 12):
        theta = 2 * math.pi * x
        a = gaussian_integral(0.7, eta, theta)
        b = gaussian_integral(0.7, 2 - eta, theta)
        assert abs(a) == pytest.approx(abs(b), abs=1e-9)
        assert wrap_phase(cmath.phase(b) - (2 * theta - cmath.phase(a))) == pytest.approx(0, abs=1e-9)


# numeric mode

@pytest.mark.parametrize("dist", all_dists(), ids=lambda d: "%s" % (d,))
def test_numeric_mode_matches_closed_form(dist):
    for x in (0.0, 0.3, 1.1, 2.0):
        a = analytic_visibility_phase(dist, x * LAM_I)
        n = numeric_visibility_phase(dist, x * LAM_I)
        assert abs(a.integral - n.integral) < 1e-9
        assert n.evaluations > 0


def test_delta_numeric_is_exact():
    d = Delta(K_I, 0.7)
    for x in np.linspace(0, 2, 11):
        vp = numeric_visibility_phase(d, x * LAM_I)
        assert vp.visibility == pytest.approx(1.0, abs=1e-15)
        assert wrap_phase(vp.phase_rad - 0.7 * 2 * math.pi * x) == pytest.approx(0, abs=1e-12)


def test_non_convergence_reported_with_diagnostics():
    with pytest.raises(NumericError) as info:
        characteristic_integral(Mandel(K_I), 2 * LAM_I, tol=1e-30, max_depth=3)
    assert "evaluations" in info.value.diagnostics


def test_tabulated_sampled_mandel(tmp_path):
    u = np.linspace(0, 2, 2001)
    p = 0.375 * (1 + (1 - u) ** 2)
    path = tmp_path / "p.csv"
    path.write_text("delta_kx_over_ki,density\n" + "".join("%r,%r\n" % (float(a), float(b)) for a, b in zip(u, p)))
    tab = make_distribution("tabulated", K_I, tabulated=str(path))
    for x in (0.2, 0.8, 1.7):
        ref = analytic_visibility_phase(Mandel(K_I), x * LAM_I).integral
        got = numeric_visibility_phase(tab, x * LAM_I).integral
        assert abs(ref - got) < 1e-5
    with pytest.raises(UnsupportedVariantError):
        analytic_visibility_phase(tab, LAM_I)


@pytest.mark.parametrize("body,line", [
    ("0,1\n1,oops\n", 2),
    ("0,1\n1\n", 2),
    ("# c\n0,1,2\n", 2),
])
def test_tabulated_csv_errors_carry_line(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(CSVParseError) as info:
        Tabulated.from_csv(path, K_I)
    assert info.value.line == line


def test_tabulated_rejects_unsorted():
    with pytest.raises(ConfigurationError):
        Tabulated(K_I, np.array([0.0, 1.0, 0.5]), np.ones(3))


# sweeps and utilities

def test_sweep_requires_ascending_grid():
    with pytest.raises(ContractViolation):
        sweep_curve(Mandel(K_I), [0.0, 2e-7, 1e-7])


def test_sweep_bad_mode():
    with pytest.raises(ConfigurationError):
        sweep_curve(Mandel(K_I), [0.0], mode="exact")


def test_sweep_axis_in_wavelengths():
    c = sweep_curve(Uniform(K_I), np.linspace(0, 2, 5) * LAM_I)
    assert np.allclose(c.dp_over_lambda_i, np.linspace(0, 2, 5))
    assert len(c) == 5


def test_negative_path_separation_rejected():
    with pytest.raises(ContractViolation):
        analytic_visibility_phase(Mandel(K_I), -1e-9)


def test_wrap_and_unwrap():
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    ramp = np.linspace(0, 12, 200)
    assert np.allclose(unwrap_phase(wrap_phase(ramp)), ramp)
    out = unwrap_phase([0.0, float("nan"), 3.0, -3.0])
    assert math.isnan(out[1]) and out[3] == pytest.approx(2 * math.pi - 3.0)


def test_make_distribution_names():
    assert isinstance(make_distribution("Half-Gaussian", K_I, N=0.7), HalfGaussian)
    assert isinstance(make_distribution("displaced_gaussian", K_I), DisplacedGaussian)
    with pytest.raises(ConfigurationError) as info:
        make_distribution("lorentzian", K_I)
    assert info.value.key == "variant"
    with pytest.raises(ConfigurationError):
        make_distribution("delta", K_I)
