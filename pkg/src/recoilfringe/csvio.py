"""CSV output with stable formatting, and the experimental-overlay reader."""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import CSVParseError

SWEEP_HEADER = ("dp_over_lambda_i", "visibility", "phase_rad", "phase_unwrapped_rad")
NUMERIC_HEADER = SWEEP_HEADER + ("residual",)
CARPET_HEADER = ("x_m", "y_m", "intensity")
OVERLAY_HEADER = ("dp_over_lambda_i", "kind", "value", "model_dp_over_lambda_i", "model_value",
                  "abs_deviation")
OVERLAY_KINDS = ("contrast", "phase")


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v + 0.0)  # +0.0 folds -0.0 into 0.0


def rows_to_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(c) for c in r])
    return buf.getvalue()


def write_rows(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Write to ``path``; ``'-'`` means stdout and ``None`` only returns the text."""
    text = rows_to_text(header, rows)
    if path == "-":
        sys.stdout.write(text)
    elif path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True)
class OverlayPoint:
    dp_over_lambda_i: float
    value: float
    kind: str


def read_overlay(path: str) -> List[OverlayPoint]:
    """Rows ``dp_over_lambda_i, value, kind``; header optional, ``#`` comments skipped."""
    pts: List[OverlayPoint] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if lineno == 1 and cells[0] == "dp_over_lambda_i":
                continue
            if len(cells) != 3:
                raise CSVParseError("expected 3 columns (dp_over_lambda_i, value, kind), got %d"
                                    % len(cells), lineno)
            try:
                dp, val = float(cells[0]), float(cells[1])
            except ValueError:
                raise CSVParseError("non-numeric value", lineno) from None
            if not (math.isfinite(dp) and math.isfinite(val)):
                raise CSVParseError("non-finite value", lineno)
            if dp < 0:
                raise CSVParseError("dp_over_lambda_i must be >= 0", lineno)
            kind = cells[2].lower()
            if kind not in OVERLAY_KINDS:
                raise CSVParseError("kind must be 'contrast' or 'phase', got %r" % cells[2], lineno)
            pts.append(OverlayPoint(dp, val, kind))
    return pts


def merge_overlay(points: Sequence[OverlayPoint], dp: np.ndarray, visibility: np.ndarray,
                  phase_unwrapped: np.ndarray):
    """Pair each point with the nearest model row; contrast vs visibility, phase vs unwrapped phase."""
    rows = []
    for p in points:
        i = int(np.argmin(np.abs(dp - p.dp_over_lambda_i)))
        model = visibility[i] if p.kind == "contrast" else phase_unwrapped[i]
        rows.append((p.dp_over_lambda_i, p.kind, p.value, dp[i], model, abs(p.value - model)))
    return rows
