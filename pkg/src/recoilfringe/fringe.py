"""Transmitted flux behind G3, cosine fits and ensemble averaging over kicks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .distributions import (Delta, Distribution, Tabulated, Uniform, characteristic_integral,
                            evaluate_pdf, wrap_phase)
from .errors import ConfigurationError, ContractViolation, DegenerateScanError
from .geometry import GratingSpec
from .propagation import TransverseState

MIN_POINTS_PER_PERIOD = 16
NORMALIZATION_TOL = 1e-6
# b below this fraction of a counts as "no fringe"
_NO_FRINGE = 1e-12


@dataclass(frozen=True)
class Window:
    """Lab-fixed integration region behind G3."""

    center: float
    halfwidth: float

    def __post_init__(self):
        if not self.halfwidth > 0:
            raise ConfigurationError("window halfwidth must be positive", key="window_halfwidth")


def central_lobe_halfwidth(beam_wavelength: float, distance: float, open_width: float) -> float:
    """Half-width of the single-slit diffraction lobe after ``distance``."""
    return beam_wavelength * distance / open_width


def _window_cells(state: TransverseState, window: Optional[Window]) -> Tuple[int, int]:
    g = state.grid
    if window is None:
        return 0, g.n_points
    lo = window.center - window.halfwidth
    hi = window.center + window.halfwidth
    x_lo = g.origin - 0.5 * g.spacing
    x_hi = g.origin + (g.n_points - 0.5) * g.spacing
    if lo < x_lo - 1e-9 * g.spacing or hi > x_hi + 1e-9 * g.spacing:
        raise ConfigurationError("flux window [%.4g, %.4g] m lies outside the grid" % (lo, hi),
                                 key="window_halfwidth")
    start = int(math.ceil((lo - g.origin) / g.spacing - 1e-9))
    stop = int(math.floor((hi - g.origin) / g.spacing + 1e-9)) + 1
    return max(start, 0), min(stop, g.n_points)


def flux_scan_values(state: TransverseState, grating: Optional[GratingSpec], window: Optional[Window],
                     dx3: Sequence[float]) -> np.ndarray:
    """``int_window |psi|^2 T3(x + dx3) dx`` for each G3 offset.

    G3 shares the slit lattice of G1/G2; a positive ``dx3`` moves it toward
    -x. With ``grating=None`` (or a fully open grating) G3 is just the window.
    """
    dx3 = np.atleast_1d(np.asarray(dx3, dtype=float))
    start, stop = _window_cells(state, window)
    g = state.grid
    inten = state.intensity
    if grating is None or grating.duty_cycle >= 1.0:
        total = float(np.sum(inten[start:stop]) * g.spacing)
        return np.full(dx3.shape, total)
    period = grating.period_dg
    cells = period / g.spacing
    p_int = int(round(cells))
    x0 = g.origin + start * g.spacing
    if abs(cells - p_int) < 1e-9 * cells and stop - start > 2 * p_int:
        # cells one period apart see the same mask: fold by residue first
        folded = np.bincount((np.arange(stop - start)) % p_int, weights=inten[start:stop],
                             minlength=p_int)
        return kernels.window_flux(folded, x0, g.spacing, 0, p_int, dx3, period,
                                   grating.open_width_delta, grating.lattice_offset)
    return kernels.window_flux(inten[start:stop], x0, g.spacing, 0, stop - start, dx3, period,
                               grating.open_width_delta, grating.lattice_offset)


def transmitted_flux(state: TransverseState, window: Optional[Window], dx3: float,
                     grating: Optional[GratingSpec] = None) -> float:
    """Flux through G3 at a single offset; see :func:`flux_scan_values`."""
    return float(flux_scan_values(state, grating, window, [dx3])[0])


@dataclass(frozen=True, eq=False)
class FluxScan:
    dx3_values: np.ndarray
    flux_values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.dx3_values, dtype=float)
        f = np.asarray(self.flux_values, dtype=float)
        if x.ndim != 1 or x.shape != f.shape:
            raise ContractViolation("scan arrays must be 1-D and of equal length")
        if np.any(f < -1e-12 * max(1.0, float(np.max(np.abs(f))) if f.size else 1.0)):
            raise ContractViolation("flux values must be non-negative")
        object.__setattr__(self, "dx3_values", x)
        object.__setattr__(self, "flux_values", f)


def scan_offsets(period: float, periods: int = 2, points_per_period: int = 32) -> np.ndarray:
    """Uniform G3 offsets covering ``periods`` whole periods (end point excluded)."""
    if periods < 2 or points_per_period < MIN_POINTS_PER_PERIOD:
        raise ContractViolation("scan needs >= 2 periods and >= %d points per period"
                                % MIN_POINTS_PER_PERIOD)
    m = periods * points_per_period
    return np.arange(m) * (period / points_per_period)


def scan_flux(state: TransverseState, grating: Optional[GratingSpec], window: Optional[Window],
              periods: int = 2, points_per_period: int = 32) -> FluxScan:
    period = grating.period_dg if grating is not None else 1.0
    dx3 = scan_offsets(period, periods, points_per_period)
    return FluxScan(dx3, flux_scan_values(state, grating, window, dx3))


@dataclass(frozen=True)
class FringeResult:
    """Fit of ``a + b cos(2 pi dx3 / d_g + phase)``.

    ``contrast`` is ``b / a``; ``relative_contrast`` (and ``visibility``)
    divide it by the reference contrast. ``phase_rad`` is NaN when ``b = 0``.
    """

    offset_a: float
    amplitude_b: float
    visibility: float
    phase_rad: float
    relative_contrast: float
    contrast: float = float("nan")
    residual: float = 0.0

    @property
    def phase_defined(self) -> bool:
        return math.isfinite(self.phase_rad)


def _check_uniform_periods(x: np.ndarray, period: float) -> None:
    m = x.size
    if m < 2 * MIN_POINTS_PER_PERIOD:
        raise ContractViolation("scan too short for a fringe fit")
    h = (x[-1] - x[0]) / (m - 1)
    if not h > 0 or np.max(np.abs(np.diff(x) - h)) > 1e-9 * h:
        raise ContractViolation("scan offsets must be uniformly spaced and ascending")
    k = m * h / period
    if abs(k - round(k)) > 1e-6 or round(k) < 2:
        raise ContractViolation("scan must span an integer number >= 2 of periods, got %.6g" % k)
    if m / round(k) < MIN_POINTS_PER_PERIOD:
        raise ContractViolation("fewer than %d points per period" % MIN_POINTS_PER_PERIOD)


def fit_fringe(scan: FluxScan, period: float, reference: Optional[FringeResult] = None
               ) -> FringeResult:
    """Offset, amplitude and phase by projection onto the fundamental harmonic.

    With a ``reference`` (the laser-off fit) the phase is reported relative to
    it and the contrast is normalised by its contrast.
    """
    x, f = scan.dx3_values, scan.flux_values
    _check_uniform_periods(x, period)
    a = float(np.mean(f))
    if not a > 0:
        raise DegenerateScanError("mean flux is zero; nothing was transmitted")
    carrier = np.exp(-2j * np.pi * x / period)
    c1 = complex(np.mean(f * carrier))
    b = 2.0 * abs(c1)
    phase = math.atan2(c1.imag, c1.real)
    model = a + b * np.cos(2 * np.pi * x / period + phase)
    residual = float(np.sqrt(np.mean((f - model) ** 2)))
    if b <= _NO_FRINGE * a:
        b, phase = 0.0, float("nan")
    contrast = b / a
    c0 = 1.0
    if reference is not None:
        if not reference.contrast > 0:
            raise DegenerateScanError("reference scan shows no fringe")
        c0 = reference.contrast
        if math.isfinite(phase):
            phase = wrap_phase(phase - reference.phase_rad)
    rel = contrast / c0
    return FringeResult(a, b, rel, phase, rel, contrast, residual)


# Ensemble average over the momentum-transfer distribution.

def simpson_weights(n: int, h: float) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise ContractViolation("Simpson's rule needs an odd number >= 3 of nodes")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def quadrature_nodes(dist: Distribution, n_nodes: int = 129) -> Tuple[np.ndarray, np.ndarray]:
    """Kick values (1/m) and probability weights ``w_j P(dk_j)`` for ensemble sums.

    Composite Simpson over the support of the distribution; Delta collapses to
    one node of unit weight.
    """
    k_i = dist.k_i
    if isinstance(dist, Delta):
        return np.array([dist.k_delta_over_ki * k_i]), np.array([1.0])
    if isinstance(dist, Uniform):
        lo, hi = dist.k1_over_ki, dist.k2_over_ki
    elif isinstance(dist, Tabulated):
        lo, hi = float(dist.u[0]), float(dist.u[-1])
    else:
        lo, hi = 0.0, 2.0
    u = np.linspace(lo, hi, n_nodes)
    w = simpson_weights(n_nodes, (hi - lo) / (n_nodes - 1))
    p = np.asarray(dist.pdf_scaled(u), dtype=float)
    return u * k_i, w * p


def _weights_for(nodes: np.ndarray, dist: Distribution) -> np.ndarray:
    if nodes.size == 1:
        if isinstance(dist, Delta) and math.isclose(nodes[0], dist.k_delta_over_ki * dist.k_i,
                                                    rel_tol=1e-12, abs_tol=1e-12 * dist.k_i):
            return np.array([1.0])
        raise ContractViolation("a single kick node only represents a matching Delta distribution")
    if isinstance(dist, Delta):
        raise ContractViolation("Delta distribution needs exactly its own kick node")
    h = (nodes[-1] - nodes[0]) / (nodes.size - 1)
    if nodes.size % 2 == 1 and np.max(np.abs(np.diff(nodes) - h)) <= 1e-9 * h:
        w = simpson_weights(nodes.size, h)
    else:
        w = np.zeros(nodes.size)
        d = np.diff(nodes)
        w[:-1] += 0.5 * d
        w[1:] += 0.5 * d
    return w * np.asarray(evaluate_pdf(dist, nodes), dtype=float)


def ensemble_fringe(scans: Union[Mapping[float, FringeResult], Tuple[float, float]],
                    dist: Distribution, d_p: float) -> FringeResult:
    """Average fringes over kicks drawn from ``dist`` at path separation ``d_p``.

    ``scans`` is either a constant ``(a, b)`` pair, in which case the
    characteristic integral is done by quadrature, or a map from kick size to
    fitted :class:`FringeResult` (phases relative to laser-off), combined as
    ``A = sum w P a``, ``B = sum w P b exp(i phi)``. The relative contrast
    divides ``|B|/A`` by the undephased ``sum w P b / A``, so it is at most 1.
    """
    if d_p < 0:
        raise ContractViolation("d_p must be non-negative")
    if isinstance(scans, tuple):
        a, b = float(scans[0]), float(scans[1])
        norm = characteristic_integral(dist, 0.0)[0].real if not isinstance(dist, Delta) else 1.0
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise ContractViolation("distribution integrates to %.9g, not 1" % norm)
        I, _ = characteristic_integral(dist, d_p)
        vis = min(abs(I), 1.0)
        phase = math.atan2(I.imag, I.real) if vis > 0 else float("nan")
        return FringeResult(a, b * vis, vis, wrap_phase(phase) if vis > 0 else phase, vis,
                            (b * vis / a) if a > 0 else float("nan"), 0.0)
    nodes = np.array(sorted(scans), dtype=float)
    wp = _weights_for(nodes, dist)
    total = float(np.sum(wp))
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ContractViolation("distribution weights sum to %.9g on the kick nodes, not 1" % total)
    fits = [scans[k] for k in sorted(scans)]
    a_j = np.array([r.offset_a for r in fits])
    b_j = np.array([r.amplitude_b for r in fits])
    ph_j = np.array([r.phase_rad if r.phase_defined else 0.0 for r in fits])
    A = float(np.sum(wp * a_j))
    B = complex(np.sum(wp * b_j * np.exp(1j * ph_j)))
    if not A > 0:
        raise DegenerateScanError("ensemble flux is zero")
    contrast = abs(B) / A
    c0 = float(np.sum(wp * b_j)) / A
    rel = contrast / c0 if c0 > 0 else 0.0
    phase = wrap_phase(math.atan2(B.imag, B.real)) if abs(B) > _NO_FRINGE * A else float("nan")
    return FringeResult(A, abs(B), rel, phase, rel, contrast, 0.0)
