import math

import numpy as np
import pytest

from recoilfringe import geometry as geo
from recoilfringe.geometry import Grid
from recoilfringe.grating import build_transmission, exit_state


@pytest.fixture(scope="session")
def beam():
    return geo.sodium_beam()


@pytest.fixture(scope="session")
def photon():
    return geo.sodium_photon()


@pytest.fixture(scope="session")
def grating():
    return geo.sodium_grating()


@pytest.fixture(scope="session")
def grid(grating):
    dx = grating.open_width_delta / 16
    return Grid.centered(dx, 2 ** 17 * dx)


@pytest.fixture(scope="session")
def small_grid(grating):
    # 2^14 cells: 512 periods, enough for unit-level checks
    dx = grating.open_width_delta / 16
    return Grid.centered(dx, 2 ** 14 * dx)


@pytest.fixture(scope="session")
def g1_exit(grating, grid):
    return exit_state(build_transmission(grating, grid))


@pytest.fixture(scope="session")
def g2(grating, grid):
    return build_transmission(grating, grid, "fill")


@pytest.fixture(scope="session")
def k_i(photon):
    return photon.wavenumber_i


def dp_of(x, photon):
    """d_p in metres for a d_p/lambda_i value."""
    return x * photon.wavelength_i
