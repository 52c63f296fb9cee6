"""Regression fits, scaling reports, and CSV/manifest persistence."""

from __future__ import annotations

import hashlib
import json
import platform
import time
from dataclasses import dataclass, field

import numpy as np


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    r_squared: float
    n_points: int


def loglog_fit(pairs) -> FitResult:
    """Ordinary least squares on (log x, log y)."""
    pairs = [(float(x), float(y)) for x, y in pairs]
    if len(pairs) < 3:
        raise ReportError("need at least 3 points for a fit")
    if any(x <= 0 or y <= 0 for x, y in pairs):
        raise ReportError("log-log fit needs positive data")
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    n = len(pairs)
    A = np.stack([lx, np.ones(n)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = ly - A @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    stderr = float(np.sqrt(ss_res / max(n - 2, 1) / sxx)) if sxx > 0 else float("inf")
    return FitResult(slope=slope, intercept=intercept, stderr=stderr,
                     r_squared=r2, n_points=n)


@dataclass
class ScalingReport:
    """Rows of (parameter, numerator, norm, ratio) plus the fitted slope."""

    columns: tuple
    rows: list
    fit: FitResult
    predicted_slope: float
    metadata: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        write_csv(path, self.columns, self.rows)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path, columns, rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ReportError(f"empty CSV: {path}")
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        vals = []
        for tok in ln.split(","):
            try:
                vals.append(float(tok))
            except ValueError:
                vals.append(tok)
        rows.append(vals)
    return columns, rows


def write_manifest(path, config_text: str, seed: int, wall_clock: float,
                   extra=None) -> None:
    manifest = {
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "seed": seed,
        "wall_clock_s": round(wall_clock, 3),
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    if extra:
        manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
