"""Physical configuration: beam, photon, gratings, distances and the x-grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

_REL = 1e-12


@dataclass(frozen=True)
class BeamSpec:
    """Monochromatic atomic plane wave travelling along +y."""

    speed: float
    wavenumber_k: float
    de_broglie_wavelength: float

    def __post_init__(self):
        if not (self.speed > 0 and self.wavenumber_k > 0 and self.de_broglie_wavelength > 0):
            raise ConfigurationError("beam speed and wavenumber must be positive")
        expected = 2 * math.pi / self.de_broglie_wavelength
        if abs(self.wavenumber_k - expected) > _REL * expected:
            raise ConfigurationError("wavenumber_k inconsistent with de_broglie_wavelength")

    @classmethod
    def from_wavenumber(cls, speed: float, wavenumber_k: float) -> "BeamSpec":
        if not wavenumber_k > 0:
            raise ConfigurationError("wavenumber_k must be positive", key="wavenumber_k")
        return cls(speed, wavenumber_k, 2 * math.pi / wavenumber_k)

    @classmethod
    def from_mass(cls, speed: float, mass_kg: float) -> "BeamSpec":
        hbar = 1.054571817e-34
        return cls.from_wavenumber(speed, mass_kg * speed / hbar)


@dataclass(frozen=True)
class PhotonSpec:
    wavelength_i: float
    wavenumber_i: float

    def __post_init__(self):
        if not (self.wavelength_i > 0 and self.wavenumber_i > 0):
            raise ConfigurationError("photon wavelength must be positive", key="lambda_i")
        expected = 2 * math.pi / self.wavelength_i
        if abs(self.wavenumber_i - expected) > _REL * expected:
            raise ConfigurationError("wavenumber_i inconsistent with wavelength_i")

    @classmethod
    def from_wavelength(cls, wavelength_i: float) -> "PhotonSpec":
        if not wavelength_i > 0:
            raise ConfigurationError("photon wavelength must be positive", key="lambda_i")
        return cls(wavelength_i, 2 * math.pi / wavelength_i)


@dataclass(frozen=True)
class GratingSpec:
    """Binary (Ronchi-type) grating: period, open slit width, illuminated slits."""

    period_dg: float
    open_width_delta: float
    illuminated_slits_n: int = 1

    def __post_init__(self):
        if not self.period_dg > 0:
            raise ConfigurationError("grating period must be positive", key="d_g")
        if not 0 < self.open_width_delta <= self.period_dg * (1 + 1e-12):
            raise ConfigurationError("open width must satisfy 0 < delta <= d_g", key="delta")
        if int(self.illuminated_slits_n) != self.illuminated_slits_n or self.illuminated_slits_n < 1:
            raise ConfigurationError("illuminated slit count must be a positive integer", key="n_slits")

    @property
    def duty_cycle(self) -> float:
        return self.open_width_delta / self.period_dg

    @property
    def illuminated_width(self) -> float:
        return self.illuminated_slits_n * self.period_dg

    @property
    def lattice_offset(self) -> float:
        """Slit-centre lattice position: centres sit at ``offset + m*d_g``.

        Chosen so the ``n`` illuminated slits of G1 are symmetric about x = 0;
        G2 and G3 share the same lattice.
        """
        return ((self.illuminated_slits_n - 1) * 0.5 % 1.0) * self.period_dg


@dataclass(frozen=True)
class Geometry:
    """Longitudinal distances: G1-G2, G2-G3 and G1-to-scattering-point."""

    y12: float
    y23: float
    y_prime_12: float = 0.0

    def __post_init__(self):
        if not self.y12 > 0:
            raise ConfigurationError("y12 must be positive", key="y12")
        if not self.y23 > 0:
            raise ConfigurationError("y23 must be positive", key="y23")
        if not 0 <= self.y_prime_12 <= self.y12:
            raise ConfigurationError("y_prime_12 must lie in [0, y12]", key="y_prime_12")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic x-grid, ``x_j = origin + j*spacing`` for ``j < n_points``."""

    spacing: float
    n_points: int
    origin: float

    def __post_init__(self):
        if not self.spacing > 0:
            raise ConfigurationError("grid spacing must be positive", key="grid_spacing")
        if self.n_points < 2:
            raise ConfigurationError("grid needs at least two points", key="grid_extent")

    @classmethod
    def centered(cls, spacing: float, extent: float) -> "Grid":
        """Grid of (at least) ``extent`` total width, symmetric about x = 0.

        Samples sit at cell centres, so with a spacing that divides the slit
        width every window holds a whole, symmetric set of samples.
        """
        if not spacing > 0:
            raise ConfigurationError("grid spacing must be positive", key="grid_spacing")
        if not extent > 0:
            raise ConfigurationError("grid extent must be positive", key="grid_extent")
        n = int(math.ceil(extent / spacing * (1 - 1e-12)))
        n += n % 2
        return cls(spacing, n, -0.5 * (n - 1) * spacing)

    @property
    def extent(self) -> float:
        return self.n_points * self.spacing

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.n_points)

    @property
    def kx(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    def same_as(self, other: "Grid") -> bool:
        return (
            self.n_points == other.n_points
            and math.isclose(self.spacing, other.spacing, rel_tol=1e-12)
            and math.isclose(self.origin, other.origin, rel_tol=1e-12, abs_tol=1e-12 * self.spacing)
        )


@dataclass(frozen=True)
class DerivedQuantities:
    d_p: float
    talbot_length: float
    dp_over_lambda_i: float


def derived_quantities(beam: BeamSpec, photon: PhotonSpec, grating: GratingSpec,
                       geom: Geometry) -> DerivedQuantities:
    """Path-separation scale ``d_p``, Talbot length and ``d_p/lambda_i``."""
    d_p = 2 * math.pi / (beam.wavenumber_k * grating.period_dg) * geom.y_prime_12
    talbot = 2 * grating.period_dg ** 2 / beam.de_broglie_wavelength
    return DerivedQuantities(d_p, talbot, d_p / photon.wavelength_i)


def y_prime_for(dp_over_lambda_i: float, beam: BeamSpec, photon: PhotonSpec,
                grating: GratingSpec) -> float:
    """Scattering distance behind G1 that yields the requested ``d_p/lambda_i``."""
    d_p = dp_over_lambda_i * photon.wavelength_i
    return beam.wavenumber_k * grating.period_dg / (2 * math.pi) * d_p


# Parameters of the sodium experiment the model is compared with.
SODIUM_SPEED = 1400.0
SODIUM_K = 5.09067e11
SODIUM_LAMBDA_I = 589e-9
SODIUM_DG = 2e-7
SODIUM_DELTA = 1e-7
SODIUM_N_SLITS = 24
SODIUM_Y12 = 0.65
SODIUM_Y23 = 0.65


def sodium_beam() -> BeamSpec:
    return BeamSpec.from_wavenumber(SODIUM_SPEED, SODIUM_K)


def sodium_photon() -> PhotonSpec:
    return PhotonSpec.from_wavelength(SODIUM_LAMBDA_I)


def sodium_grating() -> GratingSpec:
    return GratingSpec(SODIUM_DG, SODIUM_DELTA, SODIUM_N_SLITS)


def sodium_geometry(y_prime_12: float = 0.0) -> Geometry:
    return Geometry(SODIUM_Y12, SODIUM_Y23, y_prime_12)
