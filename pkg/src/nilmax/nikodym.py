"""Planar Nikodym geometry and the rank-one blow-up experiment.

A Perron tree of thin triangles over a narrow sector supplies, for each
of finitely many directions, a long segment inside a small-area union E.
Thin strips transverse to those segments form a positive-area family F
with a per-strip slope assignment; for every point w of a strip, the
punctured two-sided segment through w in the assigned direction stays
inside E.  Containment is certified with exact rational arithmetic on
the construction's own convex pieces.

The blow-up experiment lifts E to a slab-like indicator in the group,
samples the witness set over F, and measures the growth of the maximal
ratio as the area budget eta shrinks, with predicted slope -1/p.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
import shapely
from shapely.geometry import Polygon
from shapely.ops import unary_union

from . import averaging as avg
from . import fields as fld
from . import group as grp
from . import polygons as pg
from . import surface as srf
from .reports import ScalingReport, loglog_fit


class NikodymError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Perron tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerronTree:
    """Bisection-and-translate triangle family over a slope sector."""

    level: int
    triangles: tuple      # per leaf: 3 vertices, Fraction pairs
    slopes: tuple         # per leaf: Fraction axis slope
    segments: tuple       # per leaf: (p0, p1) axis segment, Fraction pairs
    base_triangle: tuple  # 3 vertices, Fraction pairs
    schedule: tuple       # translation applied at each merge, Fractions
    height: Fraction

    @property
    def n_leaves(self) -> int:
        return len(self.triangles)

    @property
    def union_area(self) -> float:
        return _union_area(self.triangles)

    @property
    def base_area(self) -> float:
        return abs(float(pg.signed_area2(self.base_triangle))) / 2.0


def _float_poly(verts) -> Polygon:
    return Polygon([(float(x), float(y)) for x, y in verts])


def _union_area(tri_list) -> float:
    return float(unary_union([_float_poly(t) for t in tri_list]).area)


def _shift_tri(tri, dx, dy=Fraction(0)):
    return tuple((x + dx, y + dy) for x, y in tri)


def _merge(left, right, alpha, n_candidates):
    """Translate the right subtree left; pick the area-minimizing shift.

    Any horizontal translation preserves the per-leaf direction segments,
    so the shift is free to be tuned: a coarse grid over the combined
    width is refined twice around the best candidate.
    """
    # the classical shift scale is the combined base extent (vertices at y=0)
    lo = min(v[0] for tri in left for v in tri if v[1] == 0)
    hi = max(v[0] for tri in right for v in tri if v[1] == 0)
    width = hi - lo
    nominal = (1 - alpha) * width

    def area_at(tau):
        return _union_area(left + [_shift_tri(t, -tau) for t in right])

    n_c = max(8, n_candidates)
    cands = sorted({Fraction(j, n_c) * width for j in range(n_c + 1)}
                   | {nominal})
    best_tau, best_area = None, math.inf
    for tau in cands:
        area = area_at(tau)
        if area < best_area - 1e-15:
            best_tau, best_area = tau, area
    step = width / n_c
    for _ in range(3):
        step = step / 8
        for j in range(-7, 8):
            tau = best_tau + j * step
            if tau < 0 or j == 0:
                continue
            area = area_at(tau)
            if area < best_area - 1e-15:
                best_tau, best_area = tau, area
    best_tau = best_tau.limit_denominator(10**9)
    return [_shift_tri(t, -best_tau) for t in right], best_tau


def perron_tree(n: int, sector, alpha=Fraction(2, 3), height=1.0,
                slopes=None, n_candidates=23) -> PerronTree:
    """Classical construction: 2^n triangles with a common apex, merged
    pairwise by horizontal translations that overlap adjacent figures.

    `sector` is an angle range inside (0, pi/2); `slopes` overrides it
    with exact rational slope bounds.
    """
    if n < 0:
        raise NikodymError("level must be nonnegative")
    if slopes is None:
        lo, hi = sector
        if not (0 < lo < hi < math.pi / 2):
            raise NikodymError("sector must lie inside (0, pi/2)")
        s_lo = Fraction(math.tan(lo)).limit_denominator(10**9)
        s_hi = Fraction(math.tan(hi)).limit_denominator(10**9)
    else:
        s_lo, s_hi = Fraction(slopes[0]), Fraction(slopes[1])
    if not (0 < s_lo < s_hi):
        raise NikodymError("slope bounds must be increasing and positive")
    alpha = Fraction(alpha)
    if not (0 < alpha < 1):
        raise NikodymError("alpha must lie in (0, 1)")
    q = Fraction(height).limit_denominator(10**6)
    apex = (Fraction(0), q)
    # base x-positions: the edge through the apex with slope s meets y=0 at -q/s
    xs = [-q / s_lo + Fraction(k, 2**n) * (q / s_lo - q / s_hi)
          for k in range(2**n + 1)]
    tris = [[(xs[k], Fraction(0)), (xs[k + 1], Fraction(0)), apex]
            for k in range(2**n)]

    schedule = []

    def build(block):
        if len(block) == 1:
            return list(block)
        mid = len(block) // 2
        left = build(block[:mid])
        right = build(block[mid:])
        right, tau = _merge(left, right, alpha, n_candidates)
        schedule.append(tau)
        return left + right

    placed = build(tris)
    slopes_out, segments = [], []
    shrink = Fraction(1, 512)
    for tri in placed:
        (blx, _), (brx, _), (ax, ay) = tri
        mx = (blx + brx) / 2
        slopes_out.append(ay / (ax - mx))
        p0 = (mx + shrink * (ax - mx), shrink * ay)
        p1 = (ax - shrink * (ax - mx), ay - shrink * ay)
        segments.append((p0, p1))
    base = ((xs[0], Fraction(0)), (xs[-1], Fraction(0)), apex)
    return PerronTree(level=n, triangles=tuple(tuple(t) for t in placed),
                      slopes=tuple(slopes_out), segments=tuple(segments),
                      base_triangle=base, schedule=tuple(schedule), height=q)


def check_tree_segments(tree: PerronTree) -> int:
    """Exact count of stored segments NOT contained in the triangle union."""
    bad = 0
    for p0, p1 in tree.segments:
        if not pg.segment_in_union(p0, p1, list(tree.triangles)):
            bad += 1
    return bad


# ---------------------------------------------------------------------------
# Nikodym approximation (E, F, assignment)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NikodymApprox:
    """Finite-resolution (E, F, slope assignment) with certified segments.

    For every point w of strip k with slope s_k, the two-sided punctured
    segment {w + xi (1, s_k) : xi1 <= |xi| <= xi2} lies inside the k-th
    raw triangle, hence inside E; xi1, xi2 bracket the radius window
    [gap_radius, R_max] along the unit direction.
    """

    N: int
    level: int
    a: Fraction                # sector lower slope
    gap_radius: Fraction
    R_max: Fraction
    strips: tuple              # per strip: (x0, x1, y0, y1), Fractions
    slopes: tuple              # per strip: Fraction in [a, 1)
    xi_bounds: tuple           # per strip: (xi1, xi2), Fractions
    raw_triangles: tuple       # per strip: certified convex triangle
    E: tuple                   # fattened convex polygons, float vertex lists
    eta: float
    area_E: float
    area_F: float
    raw_area: float
    buffer_radius: float

    @property
    def n_strips(self) -> int:
        return len(self.strips)

    def strip_area(self, k: int) -> float:
        x0, x1, y0, y1 = self.strips[k]
        return float((x1 - x0) * (y1 - y0))


def sector_slope(N: int) -> float:
    """a = tan(pi/4 (1 - 1/N)), the lower slope of the pigeonholed sector."""
    if N < 6:
        raise NikodymError("sector parameter N must be at least 6")
    return math.tan(math.pi / 4.0 * (1.0 - 1.0 / N))


def _default_window(a_r: Fraction):
    # radius window for unit omega_d; callers with arc support pass their own
    lo = pg.sqrt_bounds(1 + a_r * a_r)[0]
    rho = a_r * lo * Fraction(97, 100)
    rmax = Fraction(14142136, 10**7)  # >= sqrt(2)
    return rho, rmax


@dataclass(frozen=True)
class _Construction:
    tree: PerronTree
    strips: tuple
    slopes: tuple
    xi_bounds: tuple
    triangles: tuple
    a_r: Fraction
    rho: Fraction
    rmax: Fraction
    N: int


def _strip_for_leaf(tri, slope, v_strip, hy, xi1, xi2):
    """Largest verified strip around the leaf axis at height v_strip.

    The admissible offsets form a convex set, so checking the four
    corners at the four xi endpoints certifies the whole strip.
    """
    (blx, _), (brx, _), (ax, ay) = tri
    mx = (blx + brx) / 2
    # axis point at height v: x = mx + (v/ay) (ax - mx)
    cx = mx + v_strip / ay * (ax - mx)
    v_top = v_strip + hy / 2 + xi2 * slope
    if v_top >= ay:
        raise NikodymError("strip reach exceeds the apex; lower v_strip")
    halfw_top = (brx - blx) / 2 * (ay - v_top) / ay
    hx = (halfw_top * Fraction(9, 10) - hy / 2 / slope).limit_denominator(10**12)
    corners_ok = False
    for _ in range(60):
        if hx <= 0:
            break
        rect = [(cx - hx, v_strip - hy / 2), (cx + hx, v_strip - hy / 2),
                (cx + hx, v_strip + hy / 2), (cx - hx, v_strip + hy / 2)]
        ok = all(pg.point_in_convex((wx + xi, wy + xi * slope), tri)
                 for wx, wy in rect for xi in (xi1, xi2, -xi1, -xi2))
        if ok:
            corners_ok = True
            break
        hx = hx / 2
    if not corners_ok:
        raise NikodymError("could not certify a positive-width strip")
    return (cx - hx, cx + hx, v_strip - hy / 2, v_strip + hy / 2)


def _construct(N: int, eta_min: float, level=None, alpha=Fraction(2, 3),
               rho=None, rmax=None, max_level=8) -> _Construction:
    a_f = sector_slope(N)
    a_r = Fraction(math.ceil(a_f * 10**9), 10**9)
    if a_r >= 1:
        raise NikodymError("sector collapsed: N too large for the resolution")
    if rho is None or rmax is None:
        d_rho, d_rmax = _default_window(a_r)
        rho = d_rho if rho is None else Fraction(rho)
        rmax = d_rmax if rmax is None else Fraction(rmax)
    rho, rmax = Fraction(rho), Fraction(rmax)
    if not (0 < rho < rmax):
        raise NikodymError("need 0 < gap_radius < R_max")

    q = Fraction(285, 100)
    levels = [int(level)] if level is not None else list(range(3, max_level + 1))
    tree = None
    for n in levels:
        cand = perron_tree(n, sector=None, alpha=alpha, height=float(q),
                           slopes=(a_r, Fraction(1)))
        if cand.union_area <= 0.92 * eta_min:
            tree = cand
            break
    if tree is None:
        raise NikodymError(
            f"eta = {eta_min} infeasible at the allowed Perron level "
            f"(raw area {cand.union_area:.4g})")

    # stagger strip heights so strips are disjoint by construction
    v0 = Fraction(112, 100)
    strips, slopes, xis = [], [], []
    # width available near the top reach bounds both strip dimensions
    est = []
    for tri, s in zip(tree.triangles, tree.slopes):
        (blx, _), (brx, _), (ax, ay) = tri
        xi2 = float(rmax) / math.sqrt(1.0 + float(s) ** 2)
        v_top = float(v0) + xi2 * float(s)
        est.append((float(brx - blx) / 2) * (float(ay) - v_top) / float(ay))
    hy = Fraction(0.6 * min(est)).limit_denominator(10**12)
    if hy <= 0:
        raise NikodymError("no room for strips at this level")
    dv = hy * Fraction(3, 2)
    if float(dv) * tree.n_leaves > 0.25:
        dv = Fraction(1, 4 * tree.n_leaves)
        hy = dv * Fraction(2, 3)
    for k, (tri, s) in enumerate(zip(tree.triangles, tree.slopes)):
        lo_s, hi_s = pg.sqrt_bounds(1 + s * s)
        xi1, xi2 = rho / hi_s, rmax / lo_s
        v_k = v0 + k * dv
        strips.append(_strip_for_leaf(tri, s, v_k, hy, xi1, xi2))
        slopes.append(s)
        xis.append((xi1, xi2))

    # recenter on the strip centroid so F sits inside [-1, 1]^2
    mx = sum((x0 + x1) / 2 for x0, x1, _, _ in strips) / len(strips)
    my = sum((y0 + y1) / 2 for _, _, y0, y1 in strips) / len(strips)
    strips = tuple((x0 - mx, x1 - mx, y0 - my, y1 - my)
                   for x0, x1, y0, y1 in strips)
    tris = tuple(_shift_tri(t, -mx, -my) for t in tree.triangles)
    if any(max(abs(v) for v in strip) > 1 for strip in strips):
        raise NikodymError("strips exit [-1, 1]^2 after recentering")
    return _Construction(tree=tree, strips=strips, slopes=tuple(slopes),
                         xi_bounds=tuple(xis), triangles=tris,
                         a_r=a_r, rho=rho, rmax=rmax, N=N)


def _fatten(con: _Construction, eta: float, rel_tol=1e-3) -> NikodymApprox:
    polys = [_float_poly(t) for t in con.triangles]
    raw_area = float(unary_union(polys).area)
    if raw_area > eta:
        raise NikodymError(f"raw area {raw_area:.4g} exceeds eta = {eta}")

    def area(r):
        return float(unary_union([p.buffer(r, join_style=2, mitre_limit=10)
                                  for p in polys]).area)

    r_lo, r_hi = 0.0, 1e-3
    while area(r_hi) < eta:
        r_hi *= 2.0
        if r_hi > 10.0:
            raise NikodymError("buffer search diverged")
    for _ in range(60):
        mid = 0.5 * (r_lo + r_hi)
        if area(mid) <= eta:
            r_lo = mid
        else:
            r_hi = mid
    area_E = area(r_lo)
    if not (eta * (1.0 - rel_tol) <= area_E <= eta):
        raise NikodymError("buffer tuning failed to meet the area target")
    fat = [list(p.buffer(r_lo, join_style=2, mitre_limit=10)
                .exterior.coords)[:-1] if r_lo > 0
           else [(float(x), float(y)) for x, y in t]
           for p, t in zip(polys, con.triangles)]
    area_F = sum(float((x1 - x0) * (y1 - y0)) for x0, x1, y0, y1 in con.strips)
    return NikodymApprox(N=con.N, level=con.tree.level, a=con.a_r,
                         gap_radius=con.rho, R_max=con.rmax,
                         strips=con.strips, slopes=con.slopes,
                         xi_bounds=con.xi_bounds, raw_triangles=con.triangles,
                         E=tuple(tuple(map(tuple, p)) for p in fat),
                         eta=float(eta), area_E=area_E, area_F=area_F,
                         raw_area=raw_area, buffer_radius=r_lo)


def nikodym_approx(N: int, eta: float, level=None, alpha=Fraction(2, 3),
                   rho=None, rmax=None, max_level=8,
                   area_F_min=1e-12) -> NikodymApprox:
    """Build (E, F, assignment) with area(E) <= eta and certified segments."""
    if eta <= 0:
        raise NikodymError("eta must be positive")
    con = _construct(N, eta, level=level, alpha=alpha, rho=rho, rmax=rmax,
                     max_level=max_level)
    approx = _fatten(con, eta)
    if approx.area_F < area_F_min:
        raise NikodymError(
            f"area(F) = {approx.area_F:.3g} below area_F_min = {area_F_min}")
    return approx


def verify_assignment(approx: NikodymApprox, n_points: int = 10_000,
                      seed: int = 0, mode: str = "exact") -> dict:
    """Containment of the punctured segments through sampled points of F.

    Exact mode snaps samples to rationals and decides with integer
    arithmetic against the certified triangle; float mode tests against
    the fattened E with a one-sided inflation margin.
    """
    rng = np.random.default_rng(seed)
    n_strips = approx.n_strips
    failures = 0
    if mode == "float":
        margin = 1e-9
        geom = unary_union(
            [Polygon(p).buffer(margin, join_style=2, mitre_limit=10)
             for p in approx.E])
        shapely.prepare(geom)
    for i in range(n_points):
        k = i % n_strips
        x0, x1, y0, y1 = approx.strips[k]
        s = approx.slopes[k]
        xi1, xi2 = approx.xi_bounds[k]
        u, v = rng.random(2)
        if mode == "exact":
            wx = x0 + Fraction(int(u * 2**40), 2**40) * (x1 - x0)
            wy = y0 + Fraction(int(v * 2**40), 2**40) * (y1 - y0)
            tri = approx.raw_triangles[k]
            ok = all(pg.point_in_convex((wx + xi, wy + xi * s), tri)
                     for xi in (xi1, xi2, -xi1, -xi2))
        elif mode == "float":
            wx = float(x0) + u * float(x1 - x0)
            wy = float(y0) + v * float(y1 - y0)
            sf = float(s)
            pts = [(wx + xi, wy + xi * sf)
                   for xi in (float(xi1), float(xi2), -float(xi1), -float(xi2))]
            ok = bool(np.all(shapely.contains_xy(
                geom, [p[0] for p in pts], [p[1] for p in pts])))
        else:
            raise NikodymError(f"unknown mode: {mode}")
        if not ok:
            failures += 1
    return {"n_checked": n_points, "failures": failures, "mode": mode}


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _frac_parse(s) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def approx_to_json(approx: NikodymApprox, path) -> None:
    data = {
        "N": approx.N, "level": approx.level, "a": _frac_str(approx.a),
        "gap_radius": _frac_str(approx.gap_radius),
        "R_max": _frac_str(approx.R_max),
        "strips": [[_frac_str(v) for v in s] for s in approx.strips],
        "slopes": [_frac_str(s) for s in approx.slopes],
        "xi_bounds": [[_frac_str(a), _frac_str(b)] for a, b in approx.xi_bounds],
        "raw_triangles": [[[_frac_str(c) for c in v] for v in t]
                          for t in approx.raw_triangles],
        "E": [[[float(c) for c in v] for v in p] for p in approx.E],
        "eta": approx.eta, "area_E": approx.area_E, "area_F": approx.area_F,
        "raw_area": approx.raw_area, "buffer_radius": approx.buffer_radius,
    }
    with open(path, "w") as fh:
        json.dump(data, fh)
        fh.write("\n")


def approx_from_json(path) -> NikodymApprox:
    with open(path) as fh:
        data = json.load(fh)
    return NikodymApprox(
        N=data["N"], level=data["level"], a=_frac_parse(data["a"]),
        gap_radius=_frac_parse(data["gap_radius"]),
        R_max=_frac_parse(data["R_max"]),
        strips=tuple(tuple(_frac_parse(v) for v in s) for s in data["strips"]),
        slopes=tuple(_frac_parse(s) for s in data["slopes"]),
        xi_bounds=tuple((_frac_parse(a), _frac_parse(b))
                        for a, b in data["xi_bounds"]),
        raw_triangles=tuple(tuple(tuple(_frac_parse(c) for c in v) for v in t)
                            for t in data["raw_triangles"]),
        E=tuple(tuple(tuple(v) for v in p) for p in data["E"]),
        eta=data["eta"], area_E=data["area_E"], area_F=data["area_F"],
        raw_area=data["raw_area"], buffer_radius=data["buffer_radius"])


# ---------------------------------------------------------------------------
# slope/time correspondence and measure rotation
# ---------------------------------------------------------------------------

def slope_time(s, a=None) -> float:
    """The dilate (t, t^2) lies on the line of slope t through 0: t = s."""
    s = float(s)
    if not (0 < s < 1):
        raise NikodymError("slope must lie in (0, 1)")
    if a is not None and s < float(a) - 1e-15:
        raise NikodymError(f"slope {s} below the sector bound {float(a)}")
    return s


def rotate_measure(mu: srf.SurfaceMeasure, R) -> srf.SurfaceMeasure:
    """The pullback measure mu(R .): nodes map to R^-1 omega, weights kept."""
    R = np.asarray(R, dtype=float)
    d = mu.dim_ambient
    if R.shape != (d, d) or np.max(np.abs(R.T @ R - np.eye(d))) > 1e-12:
        raise NikodymError("R must be orthogonal")
    nodes = mu.nodes @ R           # row-wise R^T omega = R^-1 omega
    chi0 = mu.chi_fn
    chi_rot = None
    if chi0 is not None:
        def chi_rot(w):
            return chi0(np.atleast_2d(np.asarray(w, dtype=float)) @ R.T)
        chi_rot.descriptor = {"kind": "rotated",
                              "inner": getattr(chi0, "descriptor", None)}
    geom = dict(mu.geom) if mu.geom else mu.geom
    if geom and "center" in geom:
        geom["center"] = np.asarray(geom["center"], dtype=float) @ R
    return replace(mu, nodes=nodes, chi_fn=chi_rot, geom=geom)


def align_lambda(g: grp.GroupStructure, mu: srf.SurfaceMeasure):
    """Rotate coordinates so the tilt points along e_d; returns (g', mu', R)."""
    if g.m != 1:
        raise NikodymError("alignment needs a reduced (m = 1) group")
    lam = g.lam
    norm = float(np.linalg.norm(lam))
    if norm == 0:
        raise NikodymError("zero tilt: no Nikodym mechanism")
    d = g.d
    ed = np.zeros(d)
    ed[-1] = 1.0
    lam_hat = lam / norm
    if np.allclose(lam_hat, ed, atol=1e-14):
        R = np.eye(d)
    else:
        M = np.eye(d)
        M[:, 0] = lam_hat
        Q, _ = np.linalg.qr(M)
        if np.dot(Q[:, 0], lam_hat) < 0:
            Q[:, 0] = -Q[:, 0]
        R = np.roll(Q, -1, axis=1)      # last column = lam_hat
    Lambda_new = np.zeros((1, d))
    Lambda_new[0, -1] = norm
    g_new = grp.GroupStructure(d=d, m=1, J=np.zeros((1, d, d)),
                               Lambda=Lambda_new)
    return g_new, rotate_measure(mu, R), R


# ---------------------------------------------------------------------------
# the blow-up experiment
# ---------------------------------------------------------------------------

def nikodym_field(g: grp.GroupStructure, approx: NikodymApprox,
                  L: float) -> fld.Field:
    """Indicator of {|y'| <= 2+L} x E in the group, E in the (y_d, y_d+1)
    plane with the central coordinate read in units of |lambda|."""
    d = g.d
    lam_norm = float(np.linalg.norm(g.lam))
    geom = unary_union([Polygon(p) for p in approx.E])
    shapely.prepare(geom)
    half = 2.0 + L
    minx, miny, maxx, maxy = geom.bounds

    def ev(pts):
        yp = pts[:, : d - 1]
        u = pts[:, d - 1]
        v = pts[:, d] / lam_norm
        out = np.linalg.norm(yp, axis=1) <= half
        out &= shapely.contains_xy(geom, u, v)
        return out.astype(float)

    box = np.array([[-half, half]] * (d - 1)
                   + [[minx, maxx], [miny * lam_norm, maxy * lam_norm]])
    return fld.Field(evaluator=ev, support_box=box, kind="nikodym")


@dataclass(frozen=True)
class NikodymConfig:
    group: grp.GroupStructure
    surface: srf.SurfaceMeasure
    p: float
    eta_list: tuple
    N: int = 128
    n_samples: int = 256
    seed: int = 0
    level: object = None
    alpha: Fraction = Fraction(2, 3)
    area_F_min: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "eta_list",
                           tuple(float(e) for e in self.eta_list))
        if self.p < 1 or not math.isfinite(self.p):
            raise NikodymError("need 1 <= p < infinity")
        if not self.eta_list or any(e <= 0 for e in self.eta_list):
            raise NikodymError("eta_list must hold positive areas")


def _radius_window(a_r: Fraction, w_lo: float, w_hi: float):
    """Rational [rho, R_max] bracketing t w_d sqrt(1+t^2) over the sector."""
    lo_s = pg.sqrt_bounds(1 + a_r * a_r)[0]
    w_lo_r = Fraction(math.floor(w_lo * 10**9), 10**9)
    rho = a_r * lo_s * w_lo_r
    rmax = Fraction(math.ceil(w_hi * math.sqrt(2.0) * (1 + 1e-9) * 10**7), 10**7)
    return rho, rmax


def nikodym_experiment(cfg: NikodymConfig) -> ScalingReport:
    """Blow-up of the maximal ratio as the cover area eta shrinks."""
    g, mu = cfg.group, cfg.surface
    if g.m != 1:
        raise NikodymError("experiment needs a reduced (m = 1) group")
    if float(np.max(np.abs(g.J))) > 1e-14:
        raise NikodymError("experiment needs J = 0")
    g, mu, R = align_lambda(g, mu)
    d = g.d
    lam_norm = float(np.linalg.norm(g.lam))
    wd = mu.nodes[:, d - 1]
    if np.any(wd <= 0):
        raise NikodymError("supp(chi mu) must lie in {y_d > 0} after rotation")
    w_lo, w_hi = float(np.min(wd)), float(np.max(wd))
    c_mass = mu.total_mass
    L = float(np.max(np.linalg.norm(mu.nodes[:, : d - 1], axis=1))) if d > 1 else 0.0

    a_f = sector_slope(cfg.N)
    a_r = Fraction(math.ceil(a_f * 10**9), 10**9)
    rho, rmax = _radius_window(a_r, w_lo, w_hi)
    con = _construct(cfg.N, min(cfg.eta_list), level=cfg.level,
                     alpha=cfg.alpha, rho=rho, rmax=rmax)

    rng = np.random.default_rng(cfg.seed)
    areas = np.array([float((x1 - x0) * (y1 - y0))
                      for x0, x1, y0, y1 in con.strips])
    ks = rng.choice(len(con.strips), size=cfg.n_samples, p=areas / areas.sum())
    uv = rng.random((cfg.n_samples, 2))
    xp = rng.uniform(-1.0, 1.0, size=(cfg.n_samples, d - 1))

    rows = []
    lower_ok = True
    for eta in sorted(cfg.eta_list, reverse=True):
        approx = _fatten(con, eta)
        if approx.area_F < cfg.area_F_min:
            raise NikodymError("area(F) below area_F_min")
        f = nikodym_field(g, approx, L)
        geom = unary_union([Polygon(p) for p in approx.E])
        shapely.prepare(geom)
        A = np.empty(cfg.n_samples)
        miss_mass = np.empty(cfg.n_samples)
        for i, k in enumerate(ks):
            x0, x1, y0, y1 = (float(v) for v in con.strips[k])
            wx = x0 + uv[i, 0] * (x1 - x0)
            wy = y0 + uv[i, 1] * (y1 - y0)
            t = slope_time(con.slopes[k], a=con.a_r)
            x = grp.GroupPoint(np.concatenate([xp[i], [wx, lam_norm * wy]]), d)
            pts = avg.orbit_points(g, mu.nodes, x, t)
            vals = f(pts)
            A[i] = float(mu.weights @ vals)
            miss_mass[i] = float(mu.weights @ (1.0 - vals)) / c_mass
        miss_rate = float(np.mean(miss_mass))
        if np.any(A < c_mass / 2.0 * (1.0 - miss_mass) - 1e-12):
            lower_ok = False
        vol_F = 2.0 ** (d - 1) * approx.area_F * lam_norm
        mf_lower = (np.mean(A**cfg.p) * vol_F) ** (1.0 / cfg.p)
        f_norm = ((2.0 * (2.0 + L)) ** (d - 1) * approx.area_E
                  * lam_norm) ** (1.0 / cfg.p)
        rows.append([eta, approx.area_E, approx.area_F,
                     mf_lower / f_norm, miss_rate])

    fit = loglog_fit([(row[0], row[3]) for row in rows])
    pred = -1.0 / cfg.p
    meta = {"N": cfg.N, "level": con.tree.level, "a": float(con.a_r),
            "gap_radius": float(con.rho), "R_max": float(con.rmax),
            "c_mass": c_mass, "L": L, "lam_norm": lam_norm,
            "seed": cfg.seed, "n_samples": cfg.n_samples, "p": cfg.p,
            "lower_bound_ok": lower_ok, "raw_area": con.tree.union_area,
            "n_strips": len(con.strips)}
    return ScalingReport(columns=("eta", "area_E", "area_F", "ratio",
                                  "miss_rate"),
                         rows=rows, fit=fit, predicted_slope=pred,
                         metadata=meta)
