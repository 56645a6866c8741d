"""Paraxial transverse propagation, photon-recoil kicks and grating passage.

Fields live on a periodic :class:`~recoilfringe.geometry.Grid`; free
evolution is exact in Fourier space, ``C(k_x) -> C(k_x) exp(-i k_x^2 dy / 2k)``,
so distances are used directly in place of times (``y = v t``).
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .geometry import BeamSpec, Grid, PhotonSpec

_SQRT_2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class KickRecord:
    """A single photon-recoil event: kick size and where it happened."""

    delta_kx: float
    y_prime_12: float
    delta_x0: float


@dataclass(frozen=True, eq=False)
class MomentumSpectrum:
    """Continuous-normalised spectrum ``c(k_x)`` sampled on the FFT k-grid.

    ``amplitudes`` are in ascending-k order starting at ``k_origin``.
    ``source`` keeps the spatial samples so :meth:`evaluate` can return the
    transform at arbitrary k (used by the far-field form).
    """

    amplitudes: np.ndarray
    k_spacing: float
    k_origin: float
    norm: float
    source: Optional["TransverseState"] = field(default=None, repr=False)

    @property
    def k_values(self) -> np.ndarray:
        return self.k_origin + self.k_spacing * np.arange(self.amplitudes.size)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def integrated_power(self) -> float:
        return float(np.sum(self.power) * self.k_spacing)

    def evaluate(self, kx) -> np.ndarray:
        """``(1/sqrt(2 pi)) sum psi(x_j) exp(-i k x_j) dx`` at arbitrary ``kx``."""
        if self.source is None:
            raise ContractViolation("spectrum has no spatial source to evaluate from")
        psi = self.source.psi
        x = self.source.grid.x
        support = np.flatnonzero(np.abs(psi) > 0)
        xs = x[support]
        ps = psi[support] * (self.source.grid.spacing / _SQRT_2PI)
        kx = np.atleast_1d(np.asarray(kx, dtype=float))
        out = np.empty(kx.shape, dtype=np.complex128)
        chunk = max(1, 2_000_000 // max(1, xs.size))
        flat_k = kx.ravel()
        flat_out = out.reshape(-1)
        for start in range(0, flat_k.size, chunk):
            kk = flat_k[start:start + chunk]
            flat_out[start:start + chunk] = np.exp(-1j * np.outer(kk, xs)) @ ps
        return out


@dataclass(frozen=True, eq=False)
class TransverseState:
    """Transverse wavefunction ``psi(x)`` at longitudinal position ``y_position``."""

    psi: np.ndarray
    grid: Grid
    y_position: float = 0.0
    kick: Optional[KickRecord] = None
    degenerate: bool = False

    def __post_init__(self):
        if self.psi.shape != (self.grid.n_points,):
            raise ConfigurationError("wavefunction does not match its grid")

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        return float(np.sum(self.intensity) * self.grid.spacing)

    def spectrum(self) -> MomentumSpectrum:
        g = self.grid
        kx = g.kx
        amps = np.fft.fft(self.psi) * np.exp(-1j * kx * g.origin) * (g.spacing / _SQRT_2PI)
        amps = np.fft.fftshift(amps)
        k_sorted = np.fft.fftshift(kx)
        dk = 2 * math.pi / g.extent
        return MomentumSpectrum(amps, dk, float(k_sorted[0]), self.norm(), source=self)


def state_from_spectrum(spectrum: MomentumSpectrum, grid: Grid, y_position: float = 0.0,
                        kick: Optional[KickRecord] = None) -> TransverseState:
    """Inverse of :meth:`TransverseState.spectrum` on the same grid."""
    n = grid.n_points
    if spectrum.amplitudes.size != n or not math.isclose(spectrum.k_spacing, 2 * math.pi / grid.extent,
                                                          rel_tol=1e-12):
        raise ConfigurationError("spectrum does not match grid")
    amps = np.fft.ifftshift(spectrum.amplitudes)
    kx = grid.kx
    psi = np.fft.ifft(amps * np.exp(1j * kx * grid.origin) * (_SQRT_2PI / grid.spacing))
    return TransverseState(psi, grid, y_position, kick)


@functools.lru_cache(maxsize=32)
def _free_propagator(n_points: int, spacing: float, dy: float, k: float) -> np.ndarray:
    kx = 2 * np.pi * np.fft.fftfreq(n_points, d=spacing)
    prop = np.exp(-1j * (kx * kx) * (dy / (2 * k)))
    prop.setflags(write=False)
    return prop


def propagate_free(state: TransverseState, dy: float, beam: BeamSpec) -> TransverseState:
    """Free paraxial evolution over a longitudinal distance ``dy >= 0``."""
    if dy < 0:
        raise ContractViolation("backward propagation (dy < 0) is not supported")
    if dy == 0:
        return state
    g = state.grid
    prop = _free_propagator(g.n_points, g.spacing, float(dy), beam.wavenumber_k)
    psi = np.fft.ifft(np.fft.fft(state.psi) * prop)
    return replace(state, psi=psi, y_position=state.y_position + dy)


def apply_kick(state: TransverseState, delta_kx: float, beam: BeamSpec,
               photon: Optional[PhotonSpec] = None) -> TransverseState:
    """Sudden transverse momentum transfer at the state's current plane.

    The spectrum is shifted, ``C(k_x) -> C(k_x - delta_kx)``, realised as the
    exact grid-free multiplication ``psi(x) exp(i delta_kx x)``; the density at
    the kick plane is untouched.
    """
    if state.kick is not None:
        raise ContractViolation("state has already been kicked; one scattering event per atom")
    if delta_kx < 0:
        raise ContractViolation("delta_kx must be non-negative")
    if photon is not None and delta_kx > 2 * photon.wavenumber_i * (1 + 1e-12):
        raise ContractViolation("delta_kx exceeds the 2 k_i recoil limit")
    y_p = state.y_position
    record = KickRecord(float(delta_kx), y_p, float(delta_kx) / beam.wavenumber_k * y_p)
    if delta_kx == 0:
        return replace(state, kick=record)
    psi = state.psi * np.exp(1j * delta_kx * state.grid.x)
    return replace(state, psi=psi, kick=record)


def circular_centroid(intensity: np.ndarray, grid: Grid) -> float:
    """First moment of ``intensity`` on the periodic grid (circular mean)."""
    L = grid.extent
    m1 = np.sum(intensity * np.exp(-2j * np.pi * grid.x / L))
    if abs(m1) == 0:
        raise ContractViolation("intensity has no defined centroid")
    return -math.atan2(m1.imag, m1.real) * L / (2 * math.pi)


def envelope_shift_at(kicked: TransverseState, unkicked: TransverseState, y: float) -> float:
    """Centroid displacement of the kicked density relative to the unkicked one."""
    if kicked.kick is None:
        raise ContractViolation("first state carries no kick record")
    for s in (kicked, unkicked):
        if not math.isclose(s.y_position, y, rel_tol=1e-12, abs_tol=1e-15):
            raise ContractViolation("states are not at y = %g" % y)
    if y < kicked.kick.y_prime_12:
        raise ContractViolation("y lies before the kick plane")
    if not kicked.grid.same_as(unkicked.grid):
        raise ConfigurationError("states live on different grids")
    L = kicked.grid.extent
    d = circular_centroid(kicked.intensity, kicked.grid) - circular_centroid(unkicked.intensity,
                                                                            unkicked.grid)
    return (d + 0.5 * L) % L - 0.5 * L


def band_limited(state: TransverseState, period: float, orders: int = 8) -> TransverseState:
    """Keep the diffraction orders ``|m| <= orders`` about the state's own carrier.

    The carrier is the kick (zero when unkicked), so a kicked and an unkicked
    field keep the same set of orders. Binary masks sampled on a grid put
    power up to the Nyquist edge; a kick pushes part of it across the edge,
    where it aliases and travels the wrong way. Filtering removes that.
    """
    carrier = state.kick.delta_kx if state.kick is not None else 0.0
    kx = state.grid.kx
    keep = np.abs(kx - carrier) < (orders + 0.5) * 2 * math.pi / period
    return replace(state, psi=np.fft.ifft(np.fft.fft(state.psi) * keep))


def pattern_shift(kicked: TransverseState, unkicked: TransverseState, period: float,
                  orders: int = 8) -> float:
    """Displacement of the kicked density pattern, measured on band-limited fields."""
    if not kicked.grid.same_as(unkicked.grid):
        raise ConfigurationError("states live on different grids")
    if not math.isclose(kicked.y_position, unkicked.y_position, rel_tol=1e-12, abs_tol=1e-15):
        raise ContractViolation("states are at different y")
    g = kicked.grid
    d = (circular_centroid(band_limited(kicked, period, orders).intensity, g)
         - circular_centroid(band_limited(unkicked, period, orders).intensity, g))
    return (d + 0.5 * g.extent) % g.extent - 0.5 * g.extent


def predicted_shift_g2(kick: KickRecord, y: float, beam: BeamSpec) -> float:
    """Displacement of the kicked density before G2, ``(dk/k)(y - y')``."""
    return kick.delta_kx / beam.wavenumber_k * (y - kick.y_prime_12)


def predicted_shift_g3(kick: KickRecord, y12: float, y23: float, beam: BeamSpec) -> float:
    """Displacement of the kicked pattern at G3, ``(dk/k)(y12 + y23 - y')``."""
    return kick.delta_kx / beam.wavenumber_k * (y12 + y23 - kick.y_prime_12)


def apply_grating(state: TransverseState, profile) -> TransverseState:
    """Multiply by a binary transmission profile on the same grid."""
    if profile.samples.shape != state.psi.shape or not (
        math.isclose(profile.grid_spacing, state.grid.spacing, rel_tol=1e-12)
        and math.isclose(profile.grid_origin, state.grid.origin, rel_tol=1e-12,
                         abs_tol=1e-12 * state.grid.spacing)
    ):
        raise ConfigurationError("transmission profile and state grids differ")
    psi = state.psi * profile.samples
    degenerate = not np.any(psi)
    if degenerate:
        warnings.warn("grating blocks the whole wavefunction", RuntimeWarning, stacklevel=2)
    return replace(state, psi=psi, degenerate=degenerate)


def fraunhofer_ratio(spectrum: MomentumSpectrum, y: float, beam: BeamSpec) -> float:
    """``k x'^2 / y`` with ``x'`` the half-width of the source aperture."""
    src = spectrum.source
    support = np.flatnonzero(np.abs(src.psi) > 0)
    x = src.grid.x[support]
    half = 0.5 * (x.max() - x.min() + src.grid.spacing)
    return beam.wavenumber_k * half * half / y


def far_field_amplitude(spectrum: MomentumSpectrum, kick: Optional[KickRecord], y: float,
                        beam: BeamSpec, x) -> np.ndarray:
    """Fraunhofer amplitude of the (possibly kicked) field at ``y`` and points ``x``.

    ``psi(x) = sqrt(k/(i y)) exp(i k (x+dx0)^2/2y - i dk^2 y/2k) c(k (x+dx0)/y - dk)``,
    with ``y`` measured from the source plane.
    """
    if y <= 0:
        raise ContractViolation("far-field distance must be positive")
    ratio = fraunhofer_ratio(spectrum, y, beam)
    if ratio > 0.1:
        warnings.warn("Fraunhofer condition k x'^2 / y = %.3g is not small" % ratio,
                      RuntimeWarning, stacklevel=3)
    k = beam.wavenumber_k
    dk = kick.delta_kx if kick is not None else 0.0
    dx0 = kick.delta_x0 if kick is not None else 0.0
    xe = np.asarray(x, dtype=float) + dx0
    c = spectrum.evaluate(k * xe / y - dk)
    pref = math.sqrt(k / y) * np.exp(-0.25j * np.pi)
    return pref * np.exp(1j * (k * xe * xe / (2 * y) - dk * dk * y / (2 * k))) * c


def far_field_form(spectrum: MomentumSpectrum, kick: Optional[KickRecord], y: float,
                   beam: BeamSpec) -> TransverseState:
    """Far-field state on the source grid; see :func:`far_field_amplitude`."""
    if spectrum.source is None:
        raise ContractViolation("spectrum has no spatial source")
    grid = spectrum.source.grid
    psi = far_field_amplitude(spectrum, kick, y, beam, grid.x)
    return TransverseState(psi, grid, spectrum.source.y_position + y, kick)
