"""Momentum-transfer distributions P(dk) on [0, 2 k_i] and their visibilities.

Everything is computed in the scaled variable ``u = dk / k_i`` in [0, 2],
with ``p(u) = k_i P(dk)`` and ``theta = k_i d_p``; the characteristic
integral ``I = int P(dk) exp(i dk d_p) d(dk) = int p(u) exp(i theta u) du``
is then dimensionless. Visibility is ``|I|``, phase ``arg I``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import (ConfigurationError, ContractViolation, CSVParseError, DomainError,
                     NumericError, UnsupportedVariantError)

_SQRT_PI = math.sqrt(math.pi)
VISIBILITY_SLACK = 1e-9
DEFAULT_TOL = 1e-10
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def complex_erf(z):
    """Error function of a complex argument; scalar or array.

    Arguments with ``|Im z| > 30`` overflow ``exp(-z^2)`` and are rejected.
    """
    try:
        if np.ndim(z) == 0:
            return kernels.erf_complex(complex(z))
        return kernels.erf_complex_array(np.asarray(z, dtype=np.complex128))
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def wrap_phase(phi):
    """Map to (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)
    return float(out) if np.ndim(out) == 0 else out


def _check_ki(k_i):
    if not k_i > 0:
        raise ConfigurationError("k_i must be positive", key="lambda_i")


@dataclass(frozen=True)
class Mandel:
    """Bare resonance-fluorescence recoil, ``p(u) = 3/8 [1 + (1-u)^2]``."""

    k_i: float
    name = "mandel"

    def __post_init__(self):
        _check_ki(self.k_i)

    def pdf_scaled(self, u):
        s = 1.0 - np.asarray(u, dtype=float)
        return 0.375 * (1.0 + s * s)

    def kernel_spec(self):
        return kernels.KIND_MANDEL, (), 0.0, 2.0


@dataclass(frozen=True)
class GeneralGaussian:
    """Gaussian of width ``N`` (in k_i) centred at ``eta k_i``, truncated to [0, 2k_i]."""

    k_i: float
    N: float
    eta: float
    name = "general_gaussian"

    def __post_init__(self):
        _check_ki(self.k_i)
        if not self.N > 0:
            raise ConfigurationError("Gaussian width N must be positive", key="N")
        if not 0 <= self.eta <= 2:
            raise ConfigurationError("eta must lie in [0, 2]", key="eta")

    @property
    def phi_plus(self):
        return (2.0 - self.eta) / self.N

    @property
    def phi_minus(self):
        return self.eta / self.N

    @property
    def gamma(self):
        """Scaled normalising prefactor (``k_i`` times the dimensional one)."""
        return 2.0 / (_SQRT_PI * self.N * (math.erf(self.phi_plus) + math.erf(self.phi_minus)))

    def pdf_scaled(self, u):
        s = (np.asarray(u, dtype=float) - self.eta) / self.N
        return self.gamma * np.exp(-s * s)

    def kernel_spec(self):
        return kernels.KIND_GAUSSIAN, (self.eta, self.N, self.gamma), 0.0, 2.0


@dataclass(frozen=True)
class HalfGaussian(GeneralGaussian):
    """Gaussian peaked at an end of the interval: eta = 0, or eta = 2 (mirror image)."""

    eta: float = 0.0
    name = "half_gaussian"

    def __post_init__(self):
        super().__post_init__()
        if self.eta not in (0.0, 2.0):
            raise ConfigurationError("half-Gaussian needs eta = 0 or eta = 2", key="eta")


@dataclass(frozen=True)
class DisplacedGaussian(GeneralGaussian):
    eta: float = 1.5
    name = "displaced_gaussian"


@dataclass(frozen=True)
class Exponential:
    """Increasing exponential ``p(u) ~ exp(eps (u - 2))``."""

    k_i: float
    epsilon: float
    name = "exponential"

    def __post_init__(self):
        _check_ki(self.k_i)
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive", key="epsilon")

    @property
    def prefactor(self):
        return self.epsilon / -math.expm1(-2.0 * self.epsilon)

    def pdf_scaled(self, u):
        return self.prefactor * np.exp(self.epsilon * (np.asarray(u, dtype=float) - 2.0))

    def kernel_spec(self):
        return kernels.KIND_EXPONENTIAL, (self.epsilon, self.prefactor), 0.0, 2.0


@dataclass(frozen=True)
class Uniform:
    """Flat on ``[k1, k2]``, given as fractions of k_i."""

    k_i: float
    k1_over_ki: float = 0.0
    k2_over_ki: float = 2.0
    name = "uniform"

    def __post_init__(self):
        _check_ki(self.k_i)
        if not 0 <= self.k1_over_ki < self.k2_over_ki <= 2:
            raise ConfigurationError("uniform limits need 0 <= k1 < k2 <= 2 k_i", key="k1_over_ki")

    def pdf_scaled(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u >= self.k1_over_ki) & (u <= self.k2_over_ki)
        return np.where(inside, 1.0 / (self.k2_over_ki - self.k1_over_ki), 0.0)

    def kernel_spec(self):
        return (kernels.KIND_UNIFORM, (1.0 / (self.k2_over_ki - self.k1_over_ki),),
                self.k1_over_ki, self.k2_over_ki)


@dataclass(frozen=True)
class Delta:
    """Monochromatic kick of size ``k_delta``."""

    k_i: float
    k_delta_over_ki: float
    name = "delta"

    def __post_init__(self):
        _check_ki(self.k_i)
        if not 0 <= self.k_delta_over_ki <= 2:
            raise ConfigurationError("k_delta must lie in [0, 2 k_i]", key="k_delta_over_ki")

    def pdf_scaled(self, u):
        raise UnsupportedVariantError("the delta distribution has no pointwise density")

    def kernel_spec(self):
        return None


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Density sampled at ascending ``u`` points, renormalised by the trapezoid rule."""

    k_i: float
    u: np.ndarray
    density: np.ndarray
    name = "tabulated"
    _mass: float = field(init=False, repr=False, default=1.0)

    def __post_init__(self):
        _check_ki(self.k_i)
        u = np.asarray(self.u, dtype=float)
        p = np.asarray(self.density, dtype=float)
        if u.ndim != 1 or u.shape != p.shape or u.size < 2:
            raise ConfigurationError("tabulated distribution needs two equal columns of >= 2 rows",
                                     key="tabulated")
        if np.any(np.diff(u) <= 0):
            raise ConfigurationError("tabulated u values must be strictly ascending", key="tabulated")
        if u[0] < 0 or u[-1] > 2:
            raise ConfigurationError("tabulated u values must lie in [0, 2]", key="tabulated")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ConfigurationError("tabulated density must be finite and non-negative",
                                     key="tabulated")
        mass = float(_trapezoid(p, u))
        if not mass > 0:
            raise ConfigurationError("tabulated density has zero mass", key="tabulated")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "density", p)
        object.__setattr__(self, "_mass", mass)

    def pdf_scaled(self, u):
        u = np.asarray(u, dtype=float)
        return np.interp(u, self.u, self.density, left=0.0, right=0.0) / self._mass

    def kernel_spec(self):
        return None

    @classmethod
    def from_csv(cls, path, k_i: float) -> "Tabulated":
        """Read ``delta_kx_over_ki, density`` rows; a header line is optional."""
        us, ps = [], []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                    continue
                if len(row) != 2:
                    raise CSVParseError("expected 2 columns, got %d" % len(row), lineno)
                try:
                    a, b = float(row[0]), float(row[1])
                except ValueError:
                    if not us and row[0].strip() == "delta_kx_over_ki":
                        continue
                    raise CSVParseError("non-numeric value", lineno) from None
                us.append(a)
                ps.append(b)
        return cls(k_i, np.array(us), np.array(ps))


Distribution = Union[Mandel, GeneralGaussian, Exponential, Uniform, Delta, Tabulated]


def evaluate_pdf(dist: Distribution, delta_kx):
    """Normalised density ``P(delta_kx)`` in units of 1/(1/m)."""
    dk = np.asarray(delta_kx, dtype=float)
    two_ki = 2.0 * dist.k_i
    if np.any(dk < -1e-12 * two_ki) or np.any(dk > two_ki * (1 + 1e-12)):
        raise DomainError("delta_kx outside [0, 2 k_i]")
    out = dist.pdf_scaled(np.clip(dk / dist.k_i, 0.0, 2.0)) / dist.k_i
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class VisibilityPhase:
    visibility: float
    phase_rad: float
    integral: complex
    signed_visibility: Optional[float] = None
    evaluations: int = 0


def _finish(I: complex, evaluations: int = 0) -> VisibilityPhase:
    v = abs(I)
    if v > 1 + VISIBILITY_SLACK:
        raise NumericError("|I| = %.12g exceeds 1" % v, {"integral": I})
    phase = wrap_phase(math.atan2(I.imag, I.real)) if v > 0 else float("nan")
    return VisibilityPhase(min(v, 1.0), phase, I, None, evaluations)


# Closed forms. ``theta = k_i d_p``.

def _mandel_signed(theta: float) -> float:
    t = abs(theta)
    if t < 0.5:
        # series of (3/8) int_{-1}^{1} (1 + s^2) cos(theta s) ds
        total, term, n = 0.0, 1.0, 0
        while True:
            c = 2.0 * (1.0 / (2 * n + 1) + 1.0 / (2 * n + 3)) * term
            total += c
            if abs(c) < 1e-18:
                break
            n += 1
            term *= -t * t / ((2 * n - 1) * (2 * n))
        return 0.375 * total
    return 1.5 / t * ((1 - 1 / (t * t)) * math.sin(t) + math.cos(t) / t)


def _sinc(x: float) -> float:
    return 1.0 if x == 0 else math.sin(x) / x


def gaussian_integral(N: float, eta: float, theta: float) -> complex:
    """Characteristic integral of the truncated Gaussian, via complex erf."""
    alpha = N * theta
    phi_p = (2.0 - eta) / N
    phi_m = eta / N
    u_p = complex(phi_p, -0.5 * alpha)
    u_m = complex(phi_m, 0.5 * alpha)
    num = complex_erf(u_p) + complex_erf(u_m)
    den = math.erf(phi_p) + math.erf(phi_m)
    return num / den * np.exp(complex(-0.25 * alpha * alpha, eta * theta))


def half_gaussian_form(N: float, theta: float, mirrored: bool = False):
    """(visibility, phase) of the half-Gaussian written as an end-point integral.

    ``V = |erf(2/N - i a/2) + erf(i a/2)| / erf(2/N) exp(-a^2/4)`` and
    ``phi = arg[erf(2/N - i a/2) + erf(i a/2)]``; the mirror image has
    ``phi' = 2 theta - phi``.
    """
    a = N * theta
    num = complex_erf(complex(2.0 / N, -0.5 * a)) + complex_erf(complex(0.0, 0.5 * a))
    vis = abs(num) / math.erf(2.0 / N) * math.exp(-0.25 * a * a)
    phi = math.atan2(num.imag, num.real)
    return (vis, 2.0 * theta - phi) if mirrored else (vis, phi)


def displaced_gaussian_form(N: float, theta: float):
    """(visibility, phase) for the Gaussian centred at 3 k_i / 2."""
    a = N * theta
    num = complex_erf(complex(0.5 / N, -0.5 * a)) + complex_erf(complex(1.5 / N, 0.5 * a))
    vis = abs(num) / (math.erf(0.5 / N) + math.erf(1.5 / N)) * math.exp(-0.25 * a * a)
    return vis, 1.5 * theta + math.atan2(num.imag, num.real)


def exponential_form(epsilon: float, theta: float):
    """(visibility, phase) for the increasing exponential."""
    e2 = math.exp(-2 * epsilon)
    vis = (epsilon / -math.expm1(-2 * epsilon)
           * math.sqrt(1 + e2 * e2 - 2 * e2 * math.cos(2 * theta))
           / math.hypot(epsilon, theta))
    ph = math.atan2(theta, epsilon)
    phase = math.atan2(math.sin(2 * theta - ph) + e2 * math.sin(ph),
                       math.cos(2 * theta - ph) - e2 * math.cos(ph))
    return vis, phase


def analytic_visibility_phase(dist: Distribution, d_p: float) -> VisibilityPhase:
    """Closed-form visibility and phase at path separation ``d_p``.

    ``phase_rad`` is the closed-form phase wrapped to (-pi, pi]. Where the
    closed form carries a sign (Mandel, uniform), ``signed_visibility``
    keeps it so that ``I = signed_visibility * exp(i phase_rad)``.
    """
    if d_p < 0:
        raise ContractViolation("d_p must be non-negative")
    theta = dist.k_i * d_p
    signed = None
    if isinstance(dist, Mandel):
        signed = _mandel_signed(theta)
        vis, phase = abs(signed), theta
    elif isinstance(dist, Uniform):
        lo, hi = dist.k1_over_ki, dist.k2_over_ki
        signed = _sinc(0.5 * (hi - lo) * theta)
        vis, phase = abs(signed), 0.5 * (hi + lo) * theta
    elif isinstance(dist, Delta):
        signed = 1.0
        vis, phase = 1.0, dist.k_delta_over_ki * theta
    elif isinstance(dist, HalfGaussian):
        vis, phase = half_gaussian_form(dist.N, theta, mirrored=dist.eta == 2.0)
    elif isinstance(dist, DisplacedGaussian) and dist.eta == 1.5:
        vis, phase = displaced_gaussian_form(dist.N, theta)
    elif isinstance(dist, GeneralGaussian):
        I = gaussian_integral(dist.N, dist.eta, theta)
        vis, phase = abs(I), math.atan2(I.imag, I.real)
    elif isinstance(dist, Exponential):
        vis, phase = exponential_form(dist.epsilon, theta)
    elif isinstance(dist, Tabulated):
        raise UnsupportedVariantError("tabulated distributions have no closed form; use numeric mode")
    else:
        raise UnsupportedVariantError("unknown distribution %r" % (dist,))
    if vis > 1 + VISIBILITY_SLACK:
        raise NumericError("closed form gave visibility %.12g > 1" % vis)
    amp = signed if signed is not None else vis
    I = amp * complex(math.cos(phase), math.sin(phase))
    return VisibilityPhase(min(vis, 1.0), wrap_phase(phase), I, signed)


def characteristic_integral(dist: Distribution, d_p: float, tol: float = DEFAULT_TOL,
                            max_depth: int = 48):
    """``(I, evaluations)`` by quadrature (symbolic for Delta, trapezoid for Tabulated)."""
    theta = dist.k_i * d_p
    if isinstance(dist, Delta):
        return complex(math.cos(dist.k_delta_over_ki * theta), math.sin(dist.k_delta_over_ki * theta)), 0
    if isinstance(dist, Tabulated):
        w = dist.density / dist._mass
        return complex(_trapezoid(w * np.exp(1j * theta * dist.u), dist.u)), dist.u.size
    kind, params, lo, hi = dist.kernel_spec()
    re, im, evals, ok = kernels.char_integral(kind, params, theta, lo, hi, tol, max_depth)
    if not ok:
        raise NumericError("adaptive quadrature hit the refinement limit",
                           {"d_p": d_p, "theta": theta, "evaluations": evals, "tol": tol,
                            "estimate": complex(re, im)})
    return complex(re, im), evals


def numeric_visibility_phase(dist: Distribution, d_p: float, tol: float = DEFAULT_TOL
                             ) -> VisibilityPhase:
    """``V = |I|`` and ``phi = arg I`` with ``I`` from adaptive quadrature."""
    if d_p < 0:
        raise ContractViolation("d_p must be non-negative")
    I, evals = characteristic_integral(dist, d_p, tol)
    return _finish(I, evals)


def normalization(dist: Distribution, tol: float = DEFAULT_TOL) -> float:
    if isinstance(dist, Delta):
        return 1.0
    return characteristic_integral(dist, 0.0, tol)[0].real


@dataclass(frozen=True, eq=False)
class VisibilityCurve:
    dp_over_lambda_i: np.ndarray
    visibility: np.ndarray
    phase_rad: np.ndarray
    phase_unwrapped: np.ndarray

    def __post_init__(self):
        n = self.dp_over_lambda_i.size
        if not (self.visibility.size == self.phase_rad.size == self.phase_unwrapped.size == n):
            raise ContractViolation("curve arrays differ in length")

    def __len__(self):
        return self.dp_over_lambda_i.size


def unwrap_phase(phase: Sequence[float]) -> np.ndarray:
    """Nearest-branch continuation (jump threshold pi); NaNs are carried through."""
    p = np.asarray(phase, dtype=float)
    out = p.copy()
    ok = np.isfinite(p)
    if ok.any():
        out[ok] = np.unwrap(p[ok])
    return out


def sweep_curve(dist: Distribution, dp_grid: Sequence[float], mode: str = "analytic",
                tol: float = DEFAULT_TOL) -> VisibilityCurve:
    """Evaluate visibility and phase along an ascending ``d_p`` grid (metres)."""
    dp = np.asarray(dp_grid, dtype=float).ravel()
    if np.any(np.diff(dp) < 0):
        raise ContractViolation("d_p grid must be sorted ascending")
    if mode == "analytic":
        pts = [analytic_visibility_phase(dist, float(d)) for d in dp]
    elif mode == "numeric":
        pts = [numeric_visibility_phase(dist, float(d), tol) for d in dp]
    else:
        raise ConfigurationError("mode must be 'analytic' or 'numeric'", key="mode")
    vis = np.array([p.visibility for p in pts], dtype=float)
    phase = np.array([p.phase_rad for p in pts], dtype=float)
    lam_i = 2 * math.pi / dist.k_i
    return VisibilityCurve(dp / lam_i, vis, phase, unwrap_phase(phase))


def make_distribution(variant: str, k_i: float, **params) -> Distribution:
    """Build a distribution from a config-style variant name and parameters."""
    v = variant.strip().lower().replace("-", "_")
    try:
        if v == "mandel":
            return Mandel(k_i)
        if v in ("half_gaussian", "halfgaussian"):
            return HalfGaussian(k_i, float(params.get("N", 0.7)), float(params.get("eta", 0.0)))
        if v in ("displaced_gaussian", "displacedgaussian"):
            return DisplacedGaussian(k_i, float(params.get("N", 0.7)), float(params.get("eta", 1.5)))
        if v in ("general_gaussian", "generalgaussian", "gaussian"):
            if "eta" not in params:
                raise ConfigurationError("general Gaussian needs eta", key="eta")
            return GeneralGaussian(k_i, float(params.get("N", 0.7)), float(params["eta"]))
        if v == "exponential":
            return Exponential(k_i, float(params.get("epsilon", 1.0)))
        if v == "uniform":
            return Uniform(k_i, float(params.get("k1_over_ki", 0.0)), float(params.get("k2_over_ki", 2.0)))
        if v == "delta":
            if "k_delta_over_ki" not in params:
                raise ConfigurationError("delta distribution needs k_delta_over_ki", key="k_delta_over_ki")
            return Delta(k_i, float(params["k_delta_over_ki"]))
        if v == "tabulated":
            path = params.get("tabulated")
            if not path:
                raise ConfigurationError("tabulated distribution needs a CSV path", key="tabulated")
            return Tabulated.from_csv(path, k_i)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ConfigurationError, CSVParseError)):
            raise
        raise ConfigurationError(str(exc), key="variant") from None
    raise ConfigurationError("unknown distribution variant %r" % variant, key="variant")
