"""Binary grating transmission profiles and the spectrum behind G1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigurationError
from .geometry import GratingSpec, Grid
from .propagation import MomentumSpectrum, TransverseState

# Round-off guard for slit edges that land exactly on a sample.
_EDGE_EPS = 1e-9
MAX_SPACING_FRACTION = 1.0 / 16.0


@dataclass(frozen=True, eq=False)
class TransmissionProfile:
    """Sampled binary transmission ``T(x)`` with the grid it lives on."""

    samples: np.ndarray
    grid_spacing: float
    grid_origin: float
    grating: Optional[GratingSpec] = None
    filled: bool = False

    def __post_init__(self):
        s = self.samples
        if s.ndim != 1 or not np.all((s == 0.0) | (s == 1.0)):
            raise ConfigurationError("transmission samples must be a 1-D array of 0/1 values")

    @property
    def grid(self) -> Grid:
        return Grid(self.grid_spacing, self.samples.size, self.grid_origin)

    @property
    def open_fraction(self) -> float:
        return float(np.mean(self.samples))


def _check_grid(grating: GratingSpec, grid: Grid, need_extent: float):
    if not grid.spacing > 0:
        raise ConfigurationError("grid spacing must be positive", key="grid_spacing")
    if grid.spacing > grating.open_width_delta * MAX_SPACING_FRACTION * (1 + 1e-9):
        raise ConfigurationError(
            "grid spacing %.4g m exceeds delta/16 = %.4g m"
            % (grid.spacing, grating.open_width_delta / 16), key="grid_spacing")
    if grid.extent < need_extent * (1 - 1e-12):
        raise ConfigurationError(
            "grid extent %.4g m does not cover the %d illuminated slits (%.4g m)"
            % (grid.extent, grating.illuminated_slits_n, need_extent), key="grid_extent")


def slit_mask(grating: GratingSpec, x: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """Boolean open/closed mask of the infinite slit lattice at points ``x``."""
    rho = grating.duty_cycle
    u = (np.asarray(x, dtype=float) - grating.lattice_offset - shift) / grating.period_dg
    frac = np.mod(u + 0.5 * rho + _EDGE_EPS, 1.0)
    return frac < rho


def build_transmission(grating: GratingSpec, grid: Grid, slits: Optional[str] = None
                       ) -> TransmissionProfile:
    """Ronchi profile on ``grid``, symmetric about x = 0.

    By default only the ``n`` illuminated slits are open. ``slits="fill"``
    opens the lattice across the whole grid; this is what G2 needs (it has to
    intercept every diffracted order) and what a periodic, Talbot-exact field
    needs. The grid extent must then be a whole number of periods.
    """
    if slits not in (None, "fill"):
        raise ConfigurationError("slits must be None or 'fill'")
    _check_grid(grating, grid, grating.illuminated_width)
    x = grid.x
    mask = slit_mask(grating, x)
    if slits == "fill":
        periods = grid.extent / grating.period_dg
        if abs(periods - round(periods)) > 1e-6:
            raise ConfigurationError("a filled grating needs a grid extent that is a whole number "
                                     "of periods", key="grid_extent")
    else:
        half = 0.5 * grating.illuminated_width
        mask &= np.abs(x) < half
    return TransmissionProfile(mask.astype(float), grid.spacing, grid.origin, grating,
                               filled=slits == "fill")


# Incident envelopes. Each takes the grid and returns real samples.

def tophat_envelope(grid: Grid, width: float) -> np.ndarray:
    """Plane wave of finite transverse width centred on x = 0."""
    return (np.abs(grid.x) <= 0.5 * width).astype(float)


def raised_cosine_envelope(grid: Grid, width: float, edge: float) -> np.ndarray:
    """Flat top of full width ``width`` with cosine-tapered edges of length ``edge``."""
    if edge <= 0:
        return tophat_envelope(grid, width)
    r = np.abs(grid.x) - (0.5 * width - edge)
    out = np.ones(grid.n_points)
    ramp = (r > 0) & (r < edge)
    out[ramp] = 0.5 * (1 + np.cos(np.pi * r[ramp] / edge))
    out[r >= edge] = 0.0
    return out


def periodic_envelope(grid: Grid) -> np.ndarray:
    """Uniform illumination of the whole (periodic) grid."""
    return np.ones(grid.n_points)


@dataclass(frozen=True, eq=False)
class SampledEnvelope:
    samples: np.ndarray
    grid_spacing: float
    grid_origin: float


Incident = Union[None, SampledEnvelope, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _incident_samples(profile: TransmissionProfile, incident: Incident) -> np.ndarray:
    grid = profile.grid
    if incident is None:
        return np.ones(grid.n_points)
    if isinstance(incident, SampledEnvelope):
        if not grid.same_as(Grid(incident.grid_spacing, incident.samples.size, incident.grid_origin)):
            raise ConfigurationError("incident envelope and transmission profile grids differ")
        return np.asarray(incident.samples)
    if callable(incident):
        vals = np.asarray(incident(grid.x))
    else:
        vals = np.asarray(incident)
    if vals.shape != (grid.n_points,):
        raise ConfigurationError("incident envelope and transmission profile grids differ")
    return vals


def exit_state(profile: TransmissionProfile, incident: Incident = None) -> TransverseState:
    """Wavefunction just behind G1, ``T(x) psi_inc(x)`` at y = 0."""
    psi = profile.samples * _incident_samples(profile, incident).astype(np.complex128)
    return TransverseState(psi, profile.grid, 0.0)


def initial_spectrum(profile: TransmissionProfile, incident: Incident = None) -> MomentumSpectrum:
    """``c(k_x)`` of the field behind G1 on the conjugate k-grid.

    The default envelope is unity over the grid, so the illuminated span is set
    by the profile itself (plane-wave illumination of the n slits).
    """
    return exit_state(profile, incident).spectrum()


def slit_sum_spectrum(grating: GratingSpec, kx, centres: Optional[np.ndarray] = None) -> np.ndarray:
    """Continuum transform of n ideal open windows, summed slit by slit."""
    n = grating.illuminated_slits_n
    if centres is None:
        centres = (np.arange(n) - 0.5 * (n - 1)) * grating.period_dg
    kx = np.asarray(kx, dtype=float)
    half = 0.5 * grating.open_width_delta
    # each window contributes (1/sqrt(2pi)) * delta * sinc(k delta / 2) * exp(-i k c)
    env = grating.open_width_delta * np.sinc(kx * half / math.pi) / math.sqrt(2 * math.pi)
    phase = np.exp(-1j * np.multiply.outer(kx, centres)).sum(axis=-1)
    return env * phase
