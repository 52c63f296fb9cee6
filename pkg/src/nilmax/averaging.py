"""Group-convolution averages and the localized maximal operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import group as grp
from . import surface as srf
from .fields import Field


class AveragingError(ValueError):
    pass


@dataclass(frozen=True)
class TimeInterval:
    lo: float
    hi: float
    n_t: int = 64

    def __post_init__(self):
        if not (0 < self.lo < self.hi):
            raise AveragingError("need 0 < lo < hi")
        if self.n_t < 2:
            raise AveragingError("need at least two grid times")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_t)


def orbit_points(g: grp.GroupStructure, nodes: np.ndarray, x: grp.GroupPoint,
                 t: float) -> np.ndarray:
    """The convolution arguments (x - t w, x~ - t x^T J w - t^2 Lambda w) per node."""
    xs, xu = x.x, x.u
    lin = np.stack([xs @ Ji for Ji in g.J])          # m x d
    spatial = xs[None, :] - t * nodes                # n x d
    central = xu[None, :] - t * nodes @ lin.T - t * t * nodes @ g.Lambda.T
    return np.concatenate([spatial, central], axis=1)


def average(g: grp.GroupStructure, mu: srf.SurfaceMeasure, f: Field,
            x: grp.GroupPoint, t: float) -> float:
    """Quadrature evaluation of the convolution average at (x, t)."""
    if t <= 0:
        raise AveragingError("t must be positive")
    pts = orbit_points(g, mu.nodes, x, t)
    return float(mu.weights @ f(pts))


def maximal(g: grp.GroupStructure, mu: srf.SurfaceMeasure, f: Field,
            x: grp.GroupPoint, I: TimeInterval, extra_times=()):
    """Discretized sup over t of |average|; returns (value, witness time)."""
    ts = np.concatenate([I.grid(), np.asarray(extra_times, dtype=float)])
    best, best_t = -np.inf, ts[0]
    for t in ts:
        v = abs(average(g, mu, f, x, t))
        if v > best:
            best, best_t = v, float(t)
    return best, best_t


def witness_t(g: grp.GroupStructure, x: grp.GroupPoint) -> float:
    """The time x_{d+1} / (lambda^T x) at which the central argument collapses."""
    denom = float(g.lam @ x.x)
    if denom == 0.0:
        raise AveragingError("lambda^T x = 0: point has no witness time")
    return float(x.u[0]) / denom


def dilate_field(g: grp.GroupStructure, f: Field, s: float) -> Field:
    """The field y -> f(delta_s y), with the parabolically shrunk support box."""
    def ev(pts):
        q = np.array(pts, dtype=float)
        q[:, : g.d] *= s
        q[:, g.d:] *= s * s
        return f(q)

    box = f.support_box.copy()
    box[: g.d] /= s
    box[g.d:] /= s * s
    return Field(evaluator=ev, support_box=box, kind=f.kind)


def scaling_identity_check(g: grp.GroupStructure, mu: srf.SurfaceMeasure, f: Field,
                           s: float, n_samples: int = 100, seed: int = 0,
                           t_range=(0.5, 2.0), x_scale: float = 1.0) -> float:
    """Max deviation in f * mu_{st}(x) = [f(delta_s .)] * mu_t(delta_{1/s} x).

    The identity holds nodewise at the quadrature level, so the returned
    error is pure floating-point noise.
    """
    if s <= 0:
        raise AveragingError("scaling parameter must be positive")
    rng = np.random.default_rng(seed)
    fs = dilate_field(g, f, s)
    worst = 0.0
    for _ in range(n_samples):
        x = grp.GroupPoint(x_scale * rng.standard_normal(g.d + g.m), g.d)
        t = float(rng.uniform(*t_range))
        lhs = average(g, mu, f, x, s * t)
        rhs = average(g, mu, fs, grp.dilate(g, 1.0 / s, x), t)
        worst = max(worst, abs(lhs - rhs))
    return worst


def chart_average(surface: srf.SurfaceMeasure, chart: srf.Chart,
                  g: grp.GroupStructure, f: Field, x: grp.GroupPoint,
                  t: float, delta: float, eps: float, **kw) -> float:
    """Average of a thin-slab field at (x, t), by local chart integration.

    The global node set cannot resolve shells of width ~ delta, so the
    integral is taken in chart coordinates over the band where the slab
    indicator can be nonzero, with the exact field as the integrand.
    """
    if g.m != 1:
        raise AveragingError("chart averages need a reduced (m = 1) group")
    xs, xc = x.x, float(x.u[0])

    def integrand(omega):
        spatial = xs[None, :] - t * omega
        central = xc - t * (xs @ g.J1) @ omega.T - t * t * omega @ g.lam
        return f(np.concatenate([spatial, central[:, None]], axis=1))

    return srf.integrate_shell(surface, chart, g, xs, t, delta, eps,
                               integrand=integrand, **kw)
