"""Test fields on R^{d+m} and their L^p norms.

Fields are immutable batch evaluators with an axis-aligned support box.
Thin-slab indicators are kept exact; the averaging quadrature, not the
field, carries the smoothing.  Norms of slab-type fields are available
through three routes that cross-check each other: grid Riemann sums with
jitter averaging, Monte-Carlo volumes, and a closed-form radial integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from . import group as grp

DEFAULT_CELL_BUDGET = 20_000_000


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    evaluator: object        # batch (N, dim) -> (N,)
    support_box: np.ndarray  # dim x 2
    kind: str                # slab | stack | nikodym | custom

    def __post_init__(self):
        box = np.asarray(self.support_box, dtype=float)
        box.setflags(write=False)
        object.__setattr__(self, "support_box", box)

    @property
    def dim(self) -> int:
        return self.support_box.shape[0]

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.evaluator(pts), dtype=float)


@dataclass(frozen=True)
class GridSpec:
    box: np.ndarray      # dim x 2
    spacing: np.ndarray  # dim

    def __post_init__(self):
        box = np.asarray(self.box, dtype=float)
        sp = np.asarray(self.spacing, dtype=float)
        if np.any(sp <= 0):
            raise FieldError("grid spacing must be positive")
        counts = (box[:, 1] - box[:, 0]) / sp
        if np.any(np.abs(counts - np.round(counts)) > 1e-9):
            raise FieldError("spacing must divide the box lengths")
        box.setflags(write=False)
        sp.setflags(write=False)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "spacing", sp)

    @property
    def counts(self) -> np.ndarray:
        return np.round((self.box[:, 1] - self.box[:, 0]) / self.spacing).astype(int)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.counts, dtype=np.int64))


def projection_Pi(g: grp.GroupStructure, tol: float = grp.RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto range(S^T) for a reduced (m = 1) group."""
    if g.m != 1:
        raise FieldError("projection needs a reduced (m = 1) group")
    B = grp.range_basis(g, grp.ThetaFunctional(np.array([1.0])), tol=tol)
    if B.shape[0] == 0:
        raise FieldError("S = 0: no projection defined")
    return B.T @ B


def indicator_R_delta(g: grp.GroupStructure, delta: float, eps: float) -> Field:
    """Indicator of the slab delta/2 < |Pi y| <= delta, |y_{d+1}| <= delta/eps, |y| <= 1."""
    if not (0 < delta < eps < 1):
        raise FieldError(f"need 0 < delta < eps < 1, got delta={delta}, eps={eps}")
    Pi = projection_Pi(g)
    d = g.d
    h = delta / eps

    def ev(pts):
        y = pts[:, :d]
        yc = pts[:, d]
        pn = np.linalg.norm(y @ Pi.T, axis=1)
        out = (pn > delta / 2.0) & (pn <= delta)
        out &= np.abs(yc) <= h
        out &= np.linalg.norm(y, axis=1) <= 1.0
        return out.astype(float)

    box = np.array([[-1.0, 1.0]] * d + [[-h, h]])
    return Field(evaluator=ev, support_box=box, kind="slab")


def stack_field(g: grp.GroupStructure, j_list, r: int, eps: float) -> Field:
    """Sum over j of 2^{j r} times the dyadic slab indicator at delta = 2^{-j}."""
    j_list = sorted(int(j) for j in j_list)
    if len(set(j_list)) != len(j_list):
        raise FieldError("j_list must be strictly increasing")
    terms = [(2.0 ** (j * r), indicator_R_delta(g, 2.0 ** (-j), eps)) for j in j_list]

    def ev(pts):
        out = np.zeros(pts.shape[0])
        for c, f in terms:
            out += c * f(pts)
        return out

    boxes = np.stack([f.support_box for _, f in terms])
    box = np.stack([boxes[:, :, 0].min(axis=0), boxes[:, :, 1].max(axis=0)], axis=1)
    return Field(evaluator=ev, support_box=box, kind="stack")


def _ball_volume(n: int, R: float = 1.0) -> float:
    return math.pi ** (n / 2) / gamma_fn(n / 2 + 1) * R**n


def slab_volume(g: grp.GroupStructure, delta: float, eps: float) -> float:
    """Lebesgue volume of the slab R_delta, by exact radial integration.

    Splitting y into its range(S^T) and kernel components, the volume is
    2 (delta/eps) * S_{r-1} * int_{delta/2}^{delta} s^{r-1} V_{d-r}(sqrt(1-s^2)) ds.
    """
    r = int(round(np.trace(projection_Pi(g))))
    d = g.d
    sphere_area = r * _ball_volume(r)
    hi = min(delta, 1.0)
    lo = min(delta / 2.0, 1.0)
    val, _ = quad(lambda s: s ** (r - 1) * _ball_volume(d - r, math.sqrt(max(0.0, 1 - s * s))),
                  lo, hi, epsabs=1e-14, epsrel=1e-12)
    return 2.0 * (delta / eps) * sphere_area * val


def lp_norm(f: Field, p: float, grid: GridSpec, jitter: int = 8, seed: int = 0,
            cell_budget: int = DEFAULT_CELL_BUDGET) -> float:
    """Grid L^p norm by cell-center Riemann sums.

    For discontinuous (indicator-type) fields the sum is averaged over
    `jitter` randomly shifted grids to reduce aliasing on thin features.
    """
    if not (1.0 <= p < math.inf):
        raise FieldError("p must be finite and >= 1")
    if np.any(grid.box[:, 0] > f.support_box[:, 0] + 1e-12) or \
       np.any(grid.box[:, 1] < f.support_box[:, 1] - 1e-12):
        raise FieldError("grid box must contain the field support box")
    if grid.n_cells > cell_budget:
        raise FieldError(f"grid has {grid.n_cells} cells, over the budget {cell_budget}")
    counts = grid.counts
    cell_vol = float(np.prod(grid.spacing))
    smooth = f.kind == "custom"
    shifts = 1 if smooth else jitter
    rng = np.random.default_rng(seed)
    axes0 = [grid.box[i, 0] + grid.spacing[i] * np.arange(counts[i]) for i in range(len(counts))]

    total = 0.0
    for _ in range(shifts):
        off = (np.full(len(counts), 0.5) if smooth
               else rng.random(len(counts)))
        axes = [a + o * s for a, o, s in zip(axes0, off, grid.spacing)]
        acc = 0.0
        chunk = max(1, cell_budget // max(1, grid.n_cells // counts[0]) // 4)
        for start in range(0, counts[0], chunk):
            mesh = np.meshgrid(axes[0][start:start + chunk], *axes[1:], indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=1)
            acc += float(np.sum(np.abs(f(pts)) ** p))
        total += acc * cell_vol
    return (total / shifts) ** (1.0 / p)


def mc_lp_norm(f: Field, p: float, n_samples: int, seed: int = 0) -> float:
    """Monte-Carlo L^p norm over the support box (uniform sampling)."""
    box = f.support_box
    vol = float(np.prod(box[:, 1] - box[:, 0]))
    rng = np.random.default_rng(seed)
    acc = 0.0
    done = 0
    while done < n_samples:
        n = min(n_samples - done, 2_000_000)
        pts = box[:, 0] + rng.random((n, box.shape[0])) * (box[:, 1] - box[:, 0])
        acc += float(np.sum(np.abs(f(pts)) ** p))
        done += n
    return (vol * acc / n_samples) ** (1.0 / p)


def mc_volume(f: Field, n_samples: int, seed: int = 0) -> float:
    """Monte-Carlo volume of the support of an indicator-type field."""
    return mc_lp_norm(f, 1.0, n_samples, seed=seed)
