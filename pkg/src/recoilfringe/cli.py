"""Command-line front end: ``recoilfringe <command> --config FILE --out FILE``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import numpy as np

from .config import RunConfig, load_config
from .csvio import (CARPET_HEADER, NUMERIC_HEADER, OVERLAY_HEADER, SWEEP_HEADER, merge_overlay,
                    read_overlay, write_rows)
from .distributions import sweep_curve
from .errors import (ConfigurationError, CSVParseError, DegenerateScanError, RecoilFringeError)
from .pipeline import Simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "points", None) is not None:
        cfg = cfg.with_points(args.points)
    return cfg


def _analytic_rows(cfg: RunConfig, distribution: Optional[str], mode: str):
    dist = cfg.distribution(distribution)
    x = cfg.sweep.grid()
    curve = sweep_curve(dist, x * cfg.photon.wavelength_i, mode)
    rows = list(zip(x, curve.visibility, curve.phase_rad, curve.phase_unwrapped))
    return curve, x, rows


def cmd_sweep_analytic(args) -> int:
    cfg = _config(args)
    _, _, rows = _analytic_rows(cfg, args.distribution, args.mode)
    write_rows(args.out, SWEEP_HEADER, rows)
    return EXIT_OK


def _simulation(cfg: RunConfig) -> Simulation:
    return Simulation(cfg.beam, cfg.photon, cfg.grating, cfg.geometry, cfg.settings)


def cmd_sweep_numeric(args) -> int:
    from .distributions import unwrap_phase

    cfg = _config(args)
    dist = cfg.distribution(args.distribution)
    sim = _simulation(cfg)
    x = cfg.sweep.grid()
    vis, phase, resid = [], [], []
    b0 = sim.reference.amplitude_b
    results = _numeric_points(sim, dist, x, args.workers)
    for r in results:
        if r is None:  # degenerate fit: flagged with NaNs
            vis.append(float("nan")); phase.append(float("nan")); resid.append(float("nan"))
        else:
            vis.append(r.relative_contrast); phase.append(r.phase_rad); resid.append(r.residual / b0)
    unwrapped = unwrap_phase(phase)
    write_rows(args.out, NUMERIC_HEADER, zip(x, vis, phase, unwrapped, resid))
    return EXIT_OK


def _numeric_points(sim: Simulation, dist, x, workers: int):
    from .pipeline import numeric_sweep

    try:
        return numeric_sweep(sim, dist, x, workers)[1]
    except DegenerateScanError:
        out = []
        for p in x:
            try:
                out.append(sim.ensemble(dist, float(p)))
            except DegenerateScanError:
                out.append(None)
        return out


def cmd_carpet(args) -> int:
    cfg = _config(args)
    c = cfg.carpet
    sim = _simulation(cfg)
    ys = np.linspace(c.y_min, c.y_max, c.y_points)
    x, y, inten = sim.carpet(ys, c.x_min, c.x_max, c.stride)
    rows = ((xv, yv, inten[i, j]) for i, yv in enumerate(y) for j, xv in enumerate(x))
    write_rows(args.out, CARPET_HEADER, rows)
    return EXIT_OK


def cmd_overlay(args) -> int:
    cfg = _config(args)
    points = read_overlay(args.overlay)
    if args.mode == "pipeline":
        dist = cfg.distribution(args.distribution)
        x = cfg.sweep.grid()
        from .pipeline import numeric_sweep

        curve = numeric_sweep(_simulation(cfg), dist, x, args.workers)[0]
        model_rows = list(zip(x, curve.visibility, curve.phase_rad, curve.phase_unwrapped))
    else:
        curve, x, model_rows = _analytic_rows(cfg, args.distribution, args.mode)
    if not points:
        write_rows(args.out, SWEEP_HEADER, model_rows)
        return EXIT_OK
    write_rows(args.out, OVERLAY_HEADER,
               merge_overlay(points, np.asarray(x), curve.visibility, curve.phase_unwrapped))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recoilfringe",
                                description="Photon-recoil fringe contrast in a three-grating "
                                            "atom interferometer.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, points=True):
        sp.add_argument("--config", required=True, help="key = value configuration file")
        sp.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
        if points:
            sp.add_argument("--distribution", help="override the config 'variant'")
            sp.add_argument("--points", type=int, help="override sweep_points")

    sa = sub.add_parser("sweep-analytic", help="visibility and phase of a distribution vs d_p")
    common(sa)
    sa.add_argument("--mode", choices=("analytic", "numeric"), default="analytic",
                    help="closed form or adaptive quadrature")
    sa.set_defaults(func=cmd_sweep_analytic)

    sn = sub.add_parser("sweep-numeric", help="full wave-propagation pipeline vs d_p")
    common(sn)
    sn.add_argument("--workers", type=int, default=1)
    sn.set_defaults(func=cmd_sweep_numeric)

    sc = sub.add_parser("carpet", help="laser-off |psi|^2 between G1 and G2")
    common(sc, points=False)
    sc.set_defaults(func=cmd_carpet)

    so = sub.add_parser("overlay", help="merge experimental points with a model curve")
    common(so)
    so.add_argument("--overlay", required=True, help="CSV of dp_over_lambda_i, value, kind")
    so.add_argument("--mode", choices=("analytic", "numeric", "pipeline"), default="analytic")
    so.add_argument("--workers", type=int, default=1)
    so.set_defaults(func=cmd_overlay)
    return p


def _one_line(msg: str) -> str:
    return " ".join(str(msg).split())


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "points", None) is not None and args.points < 2:
            raise ConfigurationError("sweep needs at least 2 points", key="sweep_points")
        if getattr(args, "workers", 1) < 1:
            raise ConfigurationError("workers must be >= 1", key="workers")
        return args.func(args)
    except ConfigurationError as exc:
        key = exc.key or "config"
        print("error: [%s] %s" % (key, _one_line(exc)), file=sys.stderr)
        return EXIT_CONFIG
    except CSVParseError as exc:
        print("error: [csv] %s" % _one_line(exc), file=sys.stderr)
        return EXIT_PARSE
    except (RecoilFringeError, OSError) as exc:
        print("error: %s" % _one_line(exc), file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
