"""Complex error function against an independent high-precision series."""

import math

import mpmath
import numpy as np
import pytest

from recoilfringe import complex_erf
from recoilfringe.errors import DomainError


def maclaurin_erf(z, dps=60):
    # 2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1)), summed at high precision
    with mpmath.workdps(dps):
        z = mpmath.mpc(z.real, z.imag)
        term = z
        total = mpmath.mpc(0)
        n = 0
        while True:
            c = term / (2 * n + 1)
            total += c
            if abs(c) < mpmath.mpf(10) ** (-dps + 5) * max(1, abs(total)):
                break
            n += 1
            term *= -z * z / n
        return complex(2 / mpmath.sqrt(mpmath.pi) * total)


def sample_points():
    rng = np.random.default_rng(20240501)
    r = 4 * np.sqrt(rng.uniform(0, 1, 40))
    t = rng.uniform(-np.pi, np.pi, 40)
    pts = list(r * np.exp(1j * t))
    pts += [1j * y for y in (0.1, 0.5, 1.0, 2.0, 3.9)]
    pts += [-2.5j, 0.0 + 0j, 3.0 + 0j, -1e-8 + 1e-8j, 2.8 + 2.8j]
    return pts


POINTS = sample_points()


def test_sample_set_shape():
    assert len(POINTS) == 50
    assert max(abs(z) for z in POINTS) <= 4 + 1e-12
    assert sum(1 for z in POINTS if z.real == 0 and z.imag != 0) >= 5


@pytest.mark.parametrize("z", POINTS)
def test_matches_maclaurin_series(z):
    ref = maclaurin_erf(z)
    got = complex_erf(z)
    scale = abs(ref) if abs(ref) > 0 else 1.0
    assert abs(got - ref) <= 1e-12 * scale


def test_known_values():
    assert abs(complex_erf(2.0) - 0.9953222650189527) < 1e-15
    assert abs(complex_erf(1j) - 1.6504257587975428j) < 1e-14
    assert complex_erf(0) == 0


@pytest.mark.parametrize("z", POINTS)
def test_odd_and_conjugate_symmetry(z):
    w = complex_erf(z)
    scale = max(1.0, abs(w))
    assert abs(complex_erf(-z) + w) <= 1e-13 * scale
    assert abs(complex_erf(z.conjugate()) - w.conjugate()) <= 1e-13 * scale


def test_array_matches_scalar():
    z = np.array(POINTS)
    arr = complex_erf(z)
    assert arr.shape == z.shape
    for zi, wi in zip(POINTS, arr):
        assert wi == pytest.approx(complex_erf(zi), rel=1e-15, abs=1e-300)


def test_real_axis_agrees_with_math_erf():
    for x in np.linspace(-6, 6, 61):
        assert complex_erf(complex(x, 0)).real == pytest.approx(math.erf(x), abs=1e-15)


@pytest.mark.parametrize("z", [complex(0, 31), complex(1, -40), complex(float("nan"), 0),
                               complex(float("inf"), 1)])
def test_rejects_out_of_domain(z):
    with pytest.raises(DomainError):
        complex_erf(z)
