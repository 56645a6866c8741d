"""Plain-text ``key = value`` run configuration (SI units)."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

from . import geometry as geo
from .distributions import Distribution, make_distribution
from .errors import ConfigurationError
from .geometry import BeamSpec, Geometry, GratingSpec, PhotonSpec
from .pipeline import ENVELOPES, PipelineSettings

_FLOAT_KEYS = {
    "speed", "wavenumber_k", "mass", "lambda_i", "d_g", "delta", "y12", "y23", "y_prime_12",
    "grid_spacing", "grid_extent", "window_halfwidth", "N", "eta", "epsilon", "k1_over_ki",
    "k2_over_ki", "k_delta_over_ki", "sweep_min", "sweep_max", "carpet_y_min", "carpet_y_max",
    "carpet_x_min", "carpet_x_max",
}
_INT_KEYS = {"n_slits", "kick_nodes", "scan_periods", "scan_points_per_period", "sweep_points",
             "carpet_y_points", "carpet_stride"}
_STR_KEYS = {"variant", "tabulated", "envelope"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS
_DIST_KEYS = ("N", "eta", "epsilon", "k1_over_ki", "k2_over_ki", "k_delta_over_ki", "tabulated")

DEFAULTS: Dict[str, object] = {
    "speed": geo.SODIUM_SPEED,
    "lambda_i": geo.SODIUM_LAMBDA_I,
    "d_g": geo.SODIUM_DG,
    "delta": geo.SODIUM_DELTA,
    "n_slits": geo.SODIUM_N_SLITS,
    "y12": geo.SODIUM_Y12,
    "y23": geo.SODIUM_Y23,
    "y_prime_12": 0.0,
    "envelope": "tophat",
    "kick_nodes": 129,
    "scan_periods": 2,
    "scan_points_per_period": 32,
    "variant": "mandel",
    "sweep_min": 0.0,
    "sweep_max": 2.0,
    "sweep_points": 201,
    "carpet_y_min": 0.0,
    "carpet_y_points": 65,
    "carpet_stride": 1,
}


@dataclass(frozen=True)
class SweepSpec:
    dp_over_lambda_i_min: float
    dp_over_lambda_i_max: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise ConfigurationError("sweep needs at least 2 points", key="sweep_points")
        if not 0 <= self.dp_over_lambda_i_min < self.dp_over_lambda_i_max:
            raise ConfigurationError("sweep range needs 0 <= sweep_min < sweep_max", key="sweep_max")

    def grid(self):
        import numpy as np

        return np.linspace(self.dp_over_lambda_i_min, self.dp_over_lambda_i_max, self.points)


@dataclass(frozen=True)
class CarpetSpec:
    y_min: float
    y_max: float
    y_points: int
    x_min: float
    x_max: float
    stride: int


@dataclass(frozen=True)
class RunConfig:
    beam: BeamSpec
    photon: PhotonSpec
    grating: GratingSpec
    geometry: Geometry
    settings: PipelineSettings
    variant: str
    dist_params: Dict[str, object]
    sweep: SweepSpec
    carpet: CarpetSpec
    source: Optional[str] = None
    raw: Dict[str, object] = field(default_factory=dict, repr=False)

    def distribution(self, variant: Optional[str] = None) -> Distribution:
        return make_distribution(variant or self.variant, self.photon.wavenumber_i, **self.dist_params)

    def with_points(self, points: int) -> "RunConfig":
        s = self.sweep
        return replace(self, sweep=SweepSpec(s.dp_over_lambda_i_min, s.dp_over_lambda_i_max, points))


def parse_text(text: str) -> Dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        sep = "=" if "=" in body else (":" if ":" in body else None)
        if sep is None:
            raise ConfigurationError("line %d: expected 'key = value'" % lineno, key=body.split()[0])
        key, value = (p.strip() for p in body.split(sep, 1))
        if key not in KNOWN_KEYS:
            raise ConfigurationError("line %d: unknown key '%s'" % (lineno, key), key=key)
        if key in out:
            raise ConfigurationError("line %d: duplicate key '%s'" % (lineno, key), key=key)
        if value == "":
            raise ConfigurationError("line %d: empty value for '%s'" % (lineno, key), key=key)
        try:
            if key in _FLOAT_KEYS:
                v = float(value)
                if not math.isfinite(v):
                    raise ValueError
                out[key] = v
            elif key in _INT_KEYS:
                out[key] = int(value)
            else:
                out[key] = value
        except ValueError:
            raise ConfigurationError("line %d: invalid value %r for '%s'" % (lineno, value, key),
                                     key=key) from None
    return out


def build_config(values: Dict[str, object], source: Optional[str] = None) -> RunConfig:
    v = dict(DEFAULTS)
    v.update(values)
    base = os.path.dirname(os.path.abspath(source)) if source else os.getcwd()

    if "wavenumber_k" in values and "mass" in values:
        raise ConfigurationError("give either wavenumber_k or mass, not both", key="mass")
    if "mass" in values:
        if not v["speed"] > 0 or not v["mass"] > 0:
            raise ConfigurationError("speed and mass must be positive", key="mass")
        beam = BeamSpec.from_mass(v["speed"], v["mass"])
    else:
        if not v["speed"] > 0:
            raise ConfigurationError("speed must be positive", key="speed")
        beam = BeamSpec.from_wavenumber(v["speed"], v.get("wavenumber_k", geo.SODIUM_K))
    photon = PhotonSpec.from_wavelength(v["lambda_i"])
    grating = GratingSpec(v["d_g"], v["delta"], v["n_slits"])
    geom = Geometry(v["y12"], v["y23"], v["y_prime_12"])

    spacing = v.get("grid_spacing", grating.open_width_delta / 16)
    extent = v.get("grid_extent", spacing * 2 ** 17)
    if not spacing > 0:
        raise ConfigurationError("grid_spacing must be positive", key="grid_spacing")
    if spacing > grating.open_width_delta / 16 * (1 + 1e-9):
        raise ConfigurationError("grid_spacing must be <= delta/16", key="grid_spacing")
    if extent < 4 * grating.illuminated_width:
        raise ConfigurationError("grid_extent must be >= 4 x n_slits x d_g", key="grid_extent")
    if v["envelope"] not in ENVELOPES:
        raise ConfigurationError("envelope must be one of %s" % ", ".join(ENVELOPES), key="envelope")
    for key in ("kick_nodes",):
        if v[key] < 3 or v[key] % 2 == 0:
            raise ConfigurationError("kick_nodes must be odd and >= 3", key=key)
    if v["scan_periods"] < 2:
        raise ConfigurationError("scan_periods must be >= 2", key="scan_periods")
    if v["scan_points_per_period"] < 16:
        raise ConfigurationError("scan_points_per_period must be >= 16", key="scan_points_per_period")
    if "window_halfwidth" in v and not v["window_halfwidth"] > 0:
        raise ConfigurationError("window_halfwidth must be positive", key="window_halfwidth")
    settings = PipelineSettings(spacing, extent, v["envelope"], v.get("window_halfwidth"),
                                v["scan_periods"], v["scan_points_per_period"], v["kick_nodes"])

    dist_params = {k: v[k] for k in _DIST_KEYS if k in v}
    if "tabulated" in dist_params:
        p = str(dist_params["tabulated"])
        dist_params["tabulated"] = p if os.path.isabs(p) else os.path.join(base, p)
    sweep = SweepSpec(v["sweep_min"], v["sweep_max"], v["sweep_points"])

    half = 0.5 * extent
    carpet = CarpetSpec(v["carpet_y_min"], v.get("carpet_y_max", 2 * grating.period_dg ** 2
                                                  / beam.de_broglie_wavelength),
                        v["carpet_y_points"], v.get("carpet_x_min", -0.5 * grating.illuminated_width),
                        v.get("carpet_x_max", 0.5 * grating.illuminated_width), v["carpet_stride"])
    if not 0 <= carpet.y_min <= carpet.y_max <= geom.y12:
        raise ConfigurationError("carpet y range must lie within [0, y12]", key="carpet_y_max")
    if carpet.y_points < 1:
        raise ConfigurationError("carpet_y_points must be >= 1", key="carpet_y_points")
    if not -half <= carpet.x_min < carpet.x_max <= half:
        raise ConfigurationError("carpet x range must lie inside the grid", key="carpet_x_min")
    if carpet.stride < 1:
        raise ConfigurationError("carpet_stride must be >= 1", key="carpet_stride")

    cfg = RunConfig(beam, photon, grating, geom, settings, str(v["variant"]), dist_params, sweep,
                    carpet, source, dict(values))
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError("cannot read config: %s" % exc.strerror, key="config") from None
    return build_config(parse_text(text), path)
