"""End-to-end three-grating simulation: G1, kick, G2, flux scan at G3."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .distributions import Delta, Distribution, VisibilityCurve, unwrap_phase
from .errors import ConfigurationError, ContractViolation
from .fringe import (NORMALIZATION_TOL, FluxScan, FringeResult, Window, central_lobe_halfwidth,
                     fit_fringe, quadrature_nodes, scan_flux)
from .geometry import (BeamSpec, Geometry, GratingSpec, Grid, PhotonSpec, derived_quantities,
                       y_prime_for)
from .grating import (build_transmission, exit_state, periodic_envelope, raised_cosine_envelope,
                      tophat_envelope)
from .propagation import (TransverseState, apply_grating, apply_kick, predicted_shift_g3,
                          propagate_free)

ENVELOPES = ("tophat", "raised_cosine", "periodic")


@dataclass(frozen=True)
class PipelineSettings:
    grid_spacing: float
    grid_extent: float
    envelope: str = "tophat"
    window_halfwidth: Optional[float] = None
    scan_periods: int = 2
    scan_points_per_period: int = 32
    kick_nodes: int = 129


class Simulation:
    """Propagates one atom wave through the interferometer for given kicks.

    The G1 exit field and the G2 mask are built once; the laser-off fit is
    cached and serves as phase and contrast reference.
    """

    def __init__(self, beam: BeamSpec, photon: PhotonSpec, grating: GratingSpec,
                 geometry: Geometry, settings: PipelineSettings):
        if settings.envelope not in ENVELOPES:
            raise ConfigurationError("envelope must be one of %s" % ", ".join(ENVELOPES),
                                     key="envelope")
        if settings.kick_nodes < 3 or settings.kick_nodes % 2 == 0:
            raise ConfigurationError("kick_nodes must be odd and >= 3", key="kick_nodes")
        self.beam, self.photon, self.grating, self.geometry = beam, photon, grating, geometry
        self.settings = settings
        grid = Grid.centered(settings.grid_spacing, settings.grid_extent)
        if grid.extent < 4 * grating.illuminated_width * (1 - 1e-12):
            raise ConfigurationError("grid extent must be at least 4x the illuminated width",
                                     key="grid_extent")
        self.grid = grid
        fill_g1 = settings.envelope == "periodic"
        g1 = build_transmission(grating, grid, "fill" if fill_g1 else None)
        self.g2 = build_transmission(grating, grid, "fill")
        if settings.envelope == "tophat":
            inc = tophat_envelope(grid, grating.illuminated_width)
        elif settings.envelope == "raised_cosine":
            inc = raised_cosine_envelope(grid, grating.illuminated_width + 2 * grating.period_dg,
                                         grating.period_dg)
        else:
            inc = periodic_envelope(grid)
        self.g1_exit = exit_state(g1, inc)
        total = geometry.y12 + geometry.y23
        hw = settings.window_halfwidth
        if hw is None:
            hw = central_lobe_halfwidth(beam.de_broglie_wavelength, total, grating.open_width_delta)
        self.window_halfwidth = hw
        self._reference: Optional[FringeResult] = None

    # single kick

    def state_at_g3(self, delta_kx: float, y_prime: float,
                    before_kick: Optional[TransverseState] = None) -> TransverseState:
        g = self.geometry
        if not 0 <= y_prime <= g.y12:
            raise ConfigurationError("y_prime_12 must lie in [0, y12]", key="y_prime_12")
        s = before_kick if before_kick is not None else propagate_free(self.g1_exit, y_prime, self.beam)
        s = apply_kick(s, delta_kx, self.beam, self.photon)
        s = propagate_free(s, g.y12 - y_prime, self.beam)
        s = apply_grating(s, self.g2)
        return propagate_free(s, g.y23, self.beam)

    def window_for(self, state: TransverseState) -> Window:
        """Central-lobe window that follows the kicked pattern."""
        g = self.geometry
        centre = predicted_shift_g3(state.kick, g.y12, g.y23, self.beam) if state.kick else 0.0
        return Window(centre, self.window_halfwidth)

    def scan(self, state: TransverseState):
        st = self.settings
        return scan_flux(state, self.grating, self.window_for(state), st.scan_periods,
                         st.scan_points_per_period)

    @property
    def reference(self) -> FringeResult:
        if self._reference is None:
            s = self.state_at_g3(0.0, 0.0)
            self._reference = fit_fringe(self.scan(s), self.grating.period_dg)
        return self._reference

    def fringe(self, delta_kx: float, y_prime: float,
               before_kick: Optional[TransverseState] = None) -> FringeResult:
        """Fit at one kick, phase and contrast relative to laser-off."""
        s = self.state_at_g3(delta_kx, y_prime, before_kick)
        return fit_fringe(self.scan(s), self.grating.period_dg, self.reference)

    # ensembles

    def y_prime_for(self, dp_over_lambda_i: float) -> float:
        return y_prime_for(dp_over_lambda_i, self.beam, self.photon, self.grating)

    def node_fringes(self, dist: Distribution, y_prime: float) -> dict:
        """Per-kick fits on the quadrature nodes of ``dist``."""
        nodes, _ = quadrature_nodes(dist, self.settings.kick_nodes)
        pre = propagate_free(self.g1_exit, y_prime, self.beam)
        return {float(k): self.fringe(float(k), y_prime, pre) for k in nodes}

    def ensemble(self, dist: Distribution, dp_over_lambda_i: float) -> FringeResult:
        """Fit of the kick-averaged flux ``sum_j w_j P(dk_j) T(dk_j, dx3)``.

        Fitting the averaged scan is the same linear projection as combining
        per-kick fits, and it also yields the residual of the averaged fringe.
        The phase is relative to laser-off; the contrast is relative to the
        kick-weighted contrast of the individual fringes.
        """
        if dp_over_lambda_i < 0:
            raise ContractViolation("d_p must be non-negative")
        yp = self.y_prime_for(dp_over_lambda_i)
        if yp > self.geometry.y12 * (1 + 1e-12):
            raise ConfigurationError("d_p/lambda_i = %g needs y_prime_12 beyond G2" % dp_over_lambda_i,
                                     key="sweep_max")
        yp = min(yp, self.geometry.y12)
        nodes, wp = quadrature_nodes(dist, self.settings.kick_nodes)
        if abs(float(np.sum(wp)) - 1.0) > NORMALIZATION_TOL:
            raise ContractViolation("distribution weights sum to %.9g, not 1" % float(np.sum(wp)))
        pre = propagate_free(self.g1_exit, yp, self.beam)
        period = self.grating.period_dg
        total, a_sum, b_sum = None, 0.0, 0.0
        for k, w in zip(nodes, wp):
            sc = self.scan(self.state_at_g3(float(k), yp, pre))
            node = fit_fringe(sc, period)
            a_sum += w * node.offset_a
            b_sum += w * node.amplitude_b
            total = w * sc.flux_values if total is None else total + w * sc.flux_values
        # contrast the same atoms would show without dephasing; keeps V <= 1
        undephased = FringeResult(a_sum, b_sum, 1.0, self.reference.phase_rad, 1.0, b_sum / a_sum)
        return fit_fringe(FluxScan(sc.dx3_values, total), period, undephased)

    def projected_contrast(self, dist: Distribution, dp_over_lambda_i: float) -> float:
        """Signed relative contrast for distributions symmetric about k_i.

        Such distributions give ``I = V exp(i k_i d_p)`` with real ``V``; the
        ensemble amplitude projected on that phase keeps the sign, so zeros can
        be bracketed.
        """
        _require_symmetric(dist)
        r = self.ensemble(dist, dp_over_lambda_i)
        if not r.phase_defined:
            return 0.0
        theta = 2 * math.pi * dp_over_lambda_i
        return r.relative_contrast * math.cos(r.phase_rad - theta)

    def first_zero(self, dist: Distribution, lo: float, hi: float, xtol: float = 1e-4) -> float:
        """Root of :meth:`projected_contrast` in ``[lo, hi]`` (d_p/lambda_i units)."""
        from scipy.optimize import brentq

        f = lambda x: self.projected_contrast(dist, x)  # noqa: E731
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:
            raise ContractViolation("no sign change of the contrast in [%g, %g]" % (lo, hi))
        return brentq(f, lo, hi, xtol=xtol)

    # laser-off carpet between G1 and G2

    def carpet(self, y_values: Sequence[float], x_min: float, x_max: float, stride: int = 1):
        """Laser-off ``|psi(x, y)|^2`` rows for ``0 <= y <= y12``; returns (x, y, I[y, x])."""
        y = np.asarray(y_values, dtype=float)
        if y.size == 0 or np.any(y < 0) or np.any(y > self.geometry.y12 * (1 + 1e-12)):
            raise ConfigurationError("carpet y range must lie within [0, y12]", key="carpet_y_max")
        if np.any(np.diff(y) < 0):
            raise ConfigurationError("carpet y values must ascend", key="carpet_y_max")
        if stride < 1:
            raise ConfigurationError("carpet stride must be >= 1", key="carpet_stride")
        xg = self.grid.x
        sel = np.flatnonzero((xg >= x_min) & (xg <= x_max))[::stride]
        if sel.size == 0:
            raise ConfigurationError("carpet x range selects no grid points", key="carpet_x_min")
        rows = []
        s, y_now = self.g1_exit, 0.0
        for yy in y:
            s = propagate_free(s, yy - y_now, self.beam)
            y_now = yy
            rows.append(s.intensity[sel])
        return xg[sel], y, np.array(rows)


def _require_symmetric(dist: Distribution) -> None:
    if isinstance(dist, Delta):
        if dist.k_delta_over_ki != 1.0:
            raise ContractViolation("distribution is not symmetric about k_i")
        return
    u = np.linspace(0.0, 2.0, 33)
    try:
        p = np.asarray(dist.pdf_scaled(u))
    except Exception as exc:  # noqa: BLE001
        raise ContractViolation("cannot test symmetry: %s" % exc) from None
    if not np.allclose(p, p[::-1], rtol=1e-12, atol=1e-15):
        raise ContractViolation("distribution is not symmetric about k_i")


# sweeps, optionally over worker processes

def _sweep_chunk(args):
    beam, photon, grating, geometry, settings, dist, points = args
    sim = Simulation(beam, photon, grating, geometry, settings)
    return [sim.ensemble(dist, float(p)) for p in points]


def numeric_sweep(sim: Simulation, dist: Distribution, dp_over_lambda_i: Sequence[float],
                  workers: int = 1):
    """Ensemble fits along a d_p/lambda_i grid, in input order.

    Returns ``(VisibilityCurve, results)``; each result's ``residual`` is
    the RMS misfit of the averaged scan.
    """
    pts = np.asarray(dp_over_lambda_i, dtype=float).ravel()
    if np.any(np.diff(pts) < 0):
        raise ContractViolation("sweep grid must ascend")
    if workers > 1 and pts.size > 1:
        chunks = [pts[i::workers] for i in range(workers)]
        args = [(sim.beam, sim.photon, sim.grating, sim.geometry, sim.settings, dist, c)
                for c in chunks if c.size]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_sweep_chunk, args))
        results: List[FringeResult] = [None] * pts.size  # type: ignore[list-item]
        for i, part in enumerate(parts):
            for j, r in enumerate(part):
                results[i + j * workers] = r
    else:
        results = [sim.ensemble(dist, float(p)) for p in pts]
    vis = np.array([r.relative_contrast for r in results])
    phase = np.array([r.phase_rad for r in results])
    curve = VisibilityCurve(pts, vis, phase, unwrap_phase(phase))
    return curve, results


def derived(sim: Simulation):
    return derived_quantities(sim.beam, sim.photon, sim.grating, sim.geometry)
