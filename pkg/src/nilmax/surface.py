"""Surface measures as quadrature rules, charts, and shell integrals.

A SurfaceMeasure discretizes chi * d(sigma) on a k-submanifold of R^d as
nodes and positive weights (the weights absorb both the surface Jacobian
and the cutoff chi).  Charts adapted to a preferred tangent direction
support the Newton solve for shell centers and the integration of thin
annular shells whose width is far below any global node spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import group as grp


class SurfaceError(ValueError):
    pass


class ShellError(RuntimeError):
    """Newton iteration for a shell center failed to converge."""


def bump(center, radius: float, order: int = 4):
    """Compactly supported polynomial bump (1 - |w-c|^2/R^2)^order."""
    center = np.asarray(center, dtype=float)

    def chi(w):
        w = np.atleast_2d(np.asarray(w, dtype=float))
        s2 = np.sum((w - center) ** 2, axis=1) / radius**2
        out = np.maximum(0.0, 1.0 - s2) ** order
        return out if out.shape[0] > 1 else float(out[0])

    chi.descriptor = {"kind": "poly-bump", "center": center.tolist(),
                      "radius": radius, "order": order}
    return chi


def _chi_eval(chi, w):
    if chi is None:
        w = np.atleast_2d(w)
        return np.ones(w.shape[0])
    out = chi(np.atleast_2d(w))
    return np.atleast_1d(np.asarray(out, dtype=float))


@dataclass(frozen=True)
class SurfaceMeasure:
    dim_ambient: int
    dim_surface: int
    nodes: np.ndarray    # n x d
    weights: np.ndarray  # n, include Jacobian and chi
    kind: str            # sphere | disk | lebesgue
    chi_fn: object = None
    geom: dict = None    # kind-specific geometry (frames, radii)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        keep = weights > 0
        nodes, weights = nodes[keep], weights[keep]
        if weights.size == 0:
            raise SurfaceError("measure has no positive-weight nodes")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def chi(self, w) -> float:
        out = _chi_eval(self.chi_fn, w)
        return float(out[0]) if np.ndim(w) == 1 else out

    def integrate(self, f) -> float:
        """Quadrature of f (batch evaluator on R^d) against the measure."""
        return float(np.sum(self.weights * np.asarray(f(self.nodes), dtype=float)))

    def on_surface(self, w, tol: float = 1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        if self.kind == "sphere":
            return abs(np.linalg.norm(w) - 1.0) < tol
        if self.kind == "disk":
            c = self.geom["center"]
            frame = self.geom["frame"]
            rel = w - c
            inplane = frame.T @ (frame @ rel)
            return (np.linalg.norm(rel - inplane) < tol
                    and np.linalg.norm(inplane) <= self.geom["radius"] + tol)
        return True  # lebesgue: full-dimensional

    def normal_frame(self, w) -> np.ndarray:
        """Orthonormal rows spanning the normal space at w."""
        w = np.asarray(w, dtype=float)
        d = self.dim_ambient
        if self.kind == "sphere":
            return (w / np.linalg.norm(w))[None, :]
        if self.kind == "disk":
            frame = self.geom["frame"]  # k x d
            U, sv, _ = np.linalg.svd(np.eye(d) - frame.T @ frame)
            return U[:, : d - frame.shape[0]].T
        return np.zeros((0, d))

    def tangent_frame(self, w) -> np.ndarray:
        """Some orthonormal rows spanning the tangent space at w."""
        w = np.asarray(w, dtype=float)
        d = self.dim_ambient
        if self.kind == "lebesgue":
            return np.eye(d)
        if self.kind == "disk":
            return self.geom["frame"]
        n = w / np.linalg.norm(w)
        U, sv, _ = np.linalg.svd(np.eye(d) - np.outer(n, n))
        return U[:, : d - 1].T


def _gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _sphere_angles(w: np.ndarray) -> np.ndarray:
    """Hyperspherical angles of a unit vector (inverse of the node map)."""
    d = w.shape[0]
    phis = np.empty(d - 1)
    sin_prod = 1.0
    for i in range(d - 2):
        c = np.clip(w[i] / sin_prod, -1.0, 1.0) if sin_prod > 1e-14 else 1.0
        phis[i] = math.acos(c)
        sin_prod *= math.sin(phis[i])
    phis[d - 2] = math.atan2(w[d - 1], w[d - 2]) % (2.0 * math.pi)
    return phis


def sphere_measure(d: int, n_res: int, chi=None, patch_center=None,
                   patch_radius=None) -> SurfaceMeasure:
    """Tensor-product Gauss-Legendre rule in hyperspherical angles on S^{d-1}.

    With patch_center/patch_radius the angular ranges are restricted to a
    box around the center; use this when chi is a narrow bump the global
    rule would miss.  The patch must contain the support of chi.
    """
    if d < 2:
        raise SurfaceError("sphere needs ambient dimension >= 2")
    if n_res < 8:
        raise SurfaceError("n_res must be at least 8")
    # angles phi_1..phi_{d-2} in [0, pi], phi_{d-1} in [0, 2 pi]
    if patch_center is not None:
        c = np.asarray(patch_center, dtype=float)
        c = c / np.linalg.norm(c)
        phic = _sphere_angles(c)
        half = 2.5 * float(patch_radius)
    grids, wgrids = [], []
    for i in range(d - 1):
        hi = 2.0 * math.pi if i == d - 2 else math.pi
        lo = 0.0
        if patch_center is not None:
            lo = max(lo, phic[i] - half) if i < d - 2 else phic[i] - half
            hi = min(hi, phic[i] + half) if i < d - 2 else phic[i] + half
        x, w = _gauss_legendre(n_res, lo, hi)
        grids.append(x)
        wgrids.append(w)
    mesh = np.meshgrid(*grids, indexing="ij")
    wmesh = np.meshgrid(*wgrids, indexing="ij")
    phis = np.stack([m.ravel() for m in mesh], axis=1)      # N x (d-1)
    wq = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)

    n = phis.shape[0]
    nodes = np.empty((n, d))
    sin_prod = np.ones(n)
    for i in range(d - 1):
        nodes[:, i] = sin_prod * np.cos(phis[:, i])
        sin_prod = sin_prod * np.sin(phis[:, i])
    nodes[:, d - 1] = sin_prod
    jac = np.ones(n)
    for i in range(d - 2):
        jac *= np.sin(phis[:, i]) ** (d - 2 - i)
    weights = wq * jac * _chi_eval(chi, nodes)
    return SurfaceMeasure(dim_ambient=d, dim_surface=d - 1, nodes=nodes,
                          weights=weights, kind="sphere", chi_fn=chi)


def disk_measure(d: int, frame, center, radius: float, n_res: int, chi=None) -> SurfaceMeasure:
    """Flat k-disk spanned by orthonormal frame rows, centered at center."""
    frame = np.asarray(frame, dtype=float)
    center = np.asarray(center, dtype=float)
    k = frame.shape[0]
    if k == 1:
        u, w = _gauss_legendre(n_res, -radius, radius)
        U = u[:, None]
    elif k == 2:
        rr, wr = _gauss_legendre(n_res, 0.0, radius)
        th = 2 * math.pi * np.arange(n_res) / n_res
        wth = np.full(n_res, 2 * math.pi / n_res)
        R, T = np.meshgrid(rr, th, indexing="ij")
        WR, WT = np.meshgrid(wr, wth, indexing="ij")
        U = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=1)
        w = (WR * WT * R).ravel()
    else:
        xs, ws = _gauss_legendre(n_res, -radius, radius)
        mesh = np.meshgrid(*([xs] * k), indexing="ij")
        wmesh = np.meshgrid(*([ws] * k), indexing="ij")
        U = np.stack([m.ravel() for m in mesh], axis=1)
        w = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
        w = w * (np.linalg.norm(U, axis=1) <= radius)
    nodes = center + U @ frame
    weights = w * _chi_eval(chi, nodes)
    geom = {"center": center, "frame": frame, "radius": radius}
    return SurfaceMeasure(dim_ambient=d, dim_surface=k, nodes=nodes,
                          weights=weights, kind="disk", chi_fn=chi, geom=geom)


def lebesgue_measure(d: int, center, radius: float, n_res: int, chi=None) -> SurfaceMeasure:
    """Full-dimensional cutoff Lebesgue measure on a box around center."""
    center = np.asarray(center, dtype=float)
    xs, ws = _gauss_legendre(n_res, -radius, radius)
    mesh = np.meshgrid(*([xs] * d), indexing="ij")
    wmesh = np.meshgrid(*([ws] * d), indexing="ij")
    nodes = center + np.stack([m.ravel() for m in mesh], axis=1)
    w = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    weights = w * _chi_eval(chi, nodes)
    return SurfaceMeasure(dim_ambient=d, dim_surface=d, nodes=nodes,
                          weights=weights, kind="lebesgue", chi_fn=chi)


@dataclass(frozen=True)
class Chart:
    """Local parametrization u -> Gamma(u) with orthonormal frame at u = 0."""

    base: np.ndarray
    frame: np.ndarray       # k x d, rows tau_i; tau_1 = lambda/|lambda| if tilted
    kind: str               # sphere-exp | flat
    param_radius: float

    @property
    def k(self) -> int:
        return self.frame.shape[0]

    def gamma(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        v = u @ self.frame                       # N x d
        if self.kind == "flat":
            return self.base + v
        rho = np.linalg.norm(u, axis=1)
        g1 = np.sinc(rho / math.pi)              # sin(rho)/rho
        return np.cos(rho)[:, None] * self.base + g1[:, None] * v

    def dgamma(self, u) -> np.ndarray:
        """Batched derivative, shape N x d x k."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        N, k = u.shape
        if self.kind == "flat":
            return np.broadcast_to(self.frame.T, (N, self.frame.shape[1], k)).copy()
        v = u @ self.frame
        rho = np.linalg.norm(u, axis=1)
        g1 = np.sinc(rho / math.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            g2 = np.where(rho > 1e-6,
                          (rho * np.cos(rho) - np.sin(rho)) / np.maximum(rho, 1e-300) ** 3,
                          -1.0 / 3.0 + rho**2 / 30.0)
        # dGamma/du_j = tau_j*g1 + v*g2*u_j - base*g1*u_j
        return (g1[:, None, None] * self.frame.T[None, :, :]
                + (g2[:, None] * v)[:, :, None] * u[:, None, :]
                - self.base[None, :, None] * (g1[:, None] * u)[:, None, :])

    def metric_jacobian(self, u) -> np.ndarray:
        """sqrt(det(DGamma^T DGamma)), batched."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if self.kind == "flat":
            return np.ones(u.shape[0])
        D = self.dgamma(u)
        G = np.einsum("ndi,ndj->nij", D, D)
        det = np.linalg.det(G)
        return np.sqrt(np.maximum(det, 0.0))


def chart_at(surface: SurfaceMeasure, omega0, directions=None) -> Chart:
    """Orthonormal tangent frame at omega0, preferred directions first.

    directions may be a single vector (the tilt) or a list of vectors; the
    projections onto the tangent space are orthonormalized in order and
    then completed to a full tangent frame.
    """
    omega0 = np.asarray(omega0, dtype=float)
    if not surface.on_surface(omega0, tol=1e-9):
        raise SurfaceError("omega0 does not lie on the surface")
    k = surface.dim_surface
    d = surface.dim_ambient
    tan = surface.tangent_frame(omega0)  # k x d
    P = tan.T @ tan                      # projector onto tangent space

    rows = []
    if directions is not None:
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        for v in dirs:
            w = P @ v
            for r in rows:
                w = w - (r @ w) * r
            nrm = np.linalg.norm(w)
            if nrm < 1e-10:
                if not rows:
                    raise SurfaceError("tilt direction is normal to the surface at omega0")
                continue  # dependent preferred direction, already spanned
            rows.append(w / nrm)
    for v in tan:
        w = v.copy()
        for r in rows:
            w = w - (r @ w) * r
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            rows.append(w / nrm)
        if len(rows) == k:
            break
    frame = np.array(rows[:k])
    kind = "sphere-exp" if surface.kind == "sphere" else "flat"
    radius = 0.45 * math.pi if kind == "sphere-exp" else surface.geom["radius"]
    return Chart(base=omega0, frame=frame, kind=kind, param_radius=radius)


def _projection_basis(g: grp.GroupStructure) -> np.ndarray:
    """Orthonormal rows spanning range(S^T) for an m = 1 group."""
    if g.m != 1:
        raise SurfaceError("shell machinery needs a reduced (m = 1) group")
    return grp.range_basis(g, grp.ThetaFunctional(np.array([1.0])))


def shell_center_batch(chart: Chart, B: np.ndarray, x, t: float, U2: np.ndarray,
                       tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """Solve B (x - t Gamma(u', u'')) = 0 for u', batched over rows of U2."""
    x = np.asarray(x, dtype=float)
    r = B.shape[0]
    M = U2.shape[0]
    H = np.zeros((M, r))
    for _ in range(max_iter):
        u = np.concatenate([H, U2], axis=1)
        F = (x[None, :] - t * chart.gamma(u)) @ B.T         # M x r
        res = np.linalg.norm(F, axis=1)
        if np.all(res < tol):
            return H
        D = chart.dgamma(u)                                  # M x d x k
        Jf = -t * np.einsum("ri,nij->nrj", B, D[:, :, :r])
        H = H - np.linalg.solve(Jf, F[:, :, None])[:, :, 0]
    raise ShellError(f"shell center Newton did not converge (max residual {res.max():.3e})")


def shell_center(chart: Chart, g: grp.GroupStructure, x, t: float, u2=None,
                 tol: float = 1e-12) -> np.ndarray:
    """Newton solve from u' = 0 for the center of the projected shell."""
    B = _projection_basis(g)
    if u2 is None or np.size(u2) == 0:
        U2 = np.zeros((1, chart.k - B.shape[0]))
    else:
        U2 = np.atleast_2d(np.asarray(u2, dtype=float))
    return shell_center_batch(chart, B, x, t, U2, tol=tol)[0]


def _angle_dirs(r: int, n_angle: int):
    """Unit directions and weights for the polar integration in u'."""
    if r == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if r == 2:
        th = 2 * math.pi * (np.arange(n_angle) + 0.5) / n_angle
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        return dirs, np.full(n_angle, 2 * math.pi / n_angle)
    raise SurfaceError(f"polar shell integration supports rank 1 or 2, got {r}")


def _u2_nodes(k_minus_r: int, half_width: float, n_u2: int):
    if k_minus_r == 0:
        return np.zeros((1, 0)), np.ones(1)
    xs, ws = _gauss_legendre(n_u2, -half_width, half_width)
    mesh = np.meshgrid(*([xs] * k_minus_r), indexing="ij")
    wmesh = np.meshgrid(*([ws] * k_minus_r), indexing="ij")
    U2 = np.stack([m.ravel() for m in mesh], axis=1)
    W2 = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    return U2, W2


def _bracket_rho(chart: Chart, B, x, t, H, U2, dirs, level: float, rho_cap: float):
    """Radii where |B (x - t Gamma(h + rho e, u2))| crosses `level`, per (u2, dir).

    Bisection on a function that is strictly increasing near the center;
    returns rho capped at rho_cap where the level is not reached.
    """
    M, n_dir = H.shape[0], dirs.shape[0]
    r = dirs.shape[1]

    def psi(rho):  # rho: (M, n_dir)
        up = H[:, None, :] + rho[:, :, None] * dirs[None, :, :]
        u = np.concatenate([up, np.broadcast_to(U2[:, None, :], (M, n_dir, U2.shape[1]))], axis=2)
        flat = u.reshape(-1, u.shape[2])
        F = (x[None, :] - t * chart.gamma(flat)) @ B.T
        return np.linalg.norm(F, axis=1).reshape(M, n_dir)

    lo = np.zeros((M, n_dir))
    hi = np.full((M, n_dir), rho_cap)
    # expand a tentative upper bound; keep rho_cap where never reached
    val_cap = psi(hi)
    capped = val_cap < level
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        v = psi(mid)
        below = v < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return np.where(capped, rho_cap, out)


def integrate_shell(surface: SurfaceMeasure, chart: Chart, g: grp.GroupStructure,
                    x, t: float, delta: float, eps: float,
                    integrand=None, n_u2: int = 12, n_angle: int = 32,
                    n_rad: int = 10, c2: float = 0.5, tol: float = 1e-12) -> float:
    """Chart-coordinate integral of chi d(sigma) over the projected shell.

    The shell is the set of surface points where |Pi(x - t omega)| lies in
    (delta/2, delta].  With integrand=None the factor indicator(|omega -
    base| <= eps) is applied (the shell-measure of the annular cap);
    otherwise `integrand(omega_points)` replaces it, which turns the same
    machinery into a locally refined average of a thin-slab field.
    """
    x = np.asarray(x, dtype=float)
    B = _projection_basis(g)
    r = B.shape[0]
    k = chart.k
    if r > k:
        raise SurfaceError("projection rank exceeds surface dimension")
    U2, W2 = _u2_nodes(k - r, c2 * eps, n_u2)
    H = shell_center_batch(chart, B, x, t, U2, tol=tol)
    dirs, wdir = _angle_dirs(r, n_angle)
    rho_cap = chart.param_radius

    rho_lo = _bracket_rho(chart, B, x, t, H, U2, dirs, delta / 2.0, rho_cap)
    rho_hi = _bracket_rho(chart, B, x, t, H, U2, dirs, delta, rho_cap)

    xg, wg = np.polynomial.legendre.leggauss(n_rad)
    mid = 0.5 * (rho_hi + rho_lo)
    half = 0.5 * (rho_hi - rho_lo)
    # rho nodes: (M, n_dir, n_rad)
    rho = mid[:, :, None] + half[:, :, None] * xg[None, None, :]
    wr = half[:, :, None] * wg[None, None, :]

    M, n_dir = H.shape[0], dirs.shape[0]
    up = H[:, None, None, :] + rho[:, :, :, None] * dirs[None, :, None, :]
    u2b = np.broadcast_to(U2[:, None, None, :], (M, n_dir, n_rad, U2.shape[1]))
    u = np.concatenate([up, u2b], axis=3).reshape(-1, k)
    omega = chart.gamma(u)
    F = (x[None, :] - t * omega) @ B.T
    pin = np.linalg.norm(F, axis=1)
    inside = (pin > delta / 2.0) & (pin <= delta * (1 + 1e-12))
    vals = _chi_eval(surface.chi_fn, omega) * chart.metric_jacobian(u) * inside
    if integrand is None:
        vals = vals * (np.linalg.norm(omega - chart.base[None, :], axis=1) <= eps)
    else:
        vals = vals * np.asarray(integrand(omega), dtype=float)
    vals = vals.reshape(M, n_dir, n_rad)
    radial = np.sum(vals * wr * rho ** (r - 1), axis=2)         # M x n_dir
    angular = radial @ wdir                                      # M
    return float(angular @ W2)


def w_delta_measure(surface: SurfaceMeasure, chart: Chart, g: grp.GroupStructure,
                    x, t: float, delta: float, eps: float, **kw) -> float:
    """Surface measure (against chi) of the shell W_delta(x, t)."""
    if delta >= eps:
        raise SurfaceError(f"shell width delta={delta} must be below eps={eps}")
    return integrate_shell(surface, chart, g, x, t, delta, eps, integrand=None, **kw)


def w_delta_measure_mc(surface: SurfaceMeasure, chart: Chart, g: grp.GroupStructure,
                       x, t: float, delta: float, eps: float,
                       n_samples: int = 10**6, seed: int = 0, c2: float = 0.5) -> float:
    """Stratified Monte-Carlo cross-check of the shell measure.

    Jittered-lattice sampling in chart coordinates over a box bracketing
    the annulus; independent of the polar integration path.
    """
    x = np.asarray(x, dtype=float)
    B = _projection_basis(g)
    r = B.shape[0]
    k = chart.k
    U2c, _ = _u2_nodes(k - r, c2 * eps, 4)
    H = shell_center_batch(chart, B, x, t, U2c)
    pad = 3.0 * delta
    lo = np.concatenate([H.min(axis=0) - pad, np.full(k - r, -c2 * eps)])
    hi = np.concatenate([H.max(axis=0) + pad, np.full(k - r, c2 * eps)])
    vol = float(np.prod(hi - lo))

    rng = np.random.default_rng(seed)
    n_per_axis = max(2, round(n_samples ** (1.0 / k)))
    shape = (n_per_axis,) * k
    total = int(np.prod(shape))
    acc = 0.0
    # jittered lattice, streamed in slabs along the first axis
    edges = [np.linspace(lo[i], hi[i], shape[i] + 1)[:-1] for i in range(k)]
    steps = (hi - lo) / np.array(shape)
    chunk = max(1, 10**6 // max(1, total // shape[0]))
    for start in range(0, shape[0], chunk):
        stop = min(shape[0], start + chunk)
        mesh = np.meshgrid(edges[0][start:stop], *edges[1:], indexing="ij")
        base_pts = np.stack([m.ravel() for m in mesh], axis=1)
        u = base_pts + rng.random(base_pts.shape) * steps[None, :]
        omega = chart.gamma(u)
        F = (x[None, :] - t * omega) @ B.T
        pin = np.linalg.norm(F, axis=1)
        inside = (pin > delta / 2.0) & (pin <= delta)
        inside &= np.linalg.norm(omega - chart.base[None, :], axis=1) <= eps
        if np.any(inside):
            vals = (_chi_eval(surface.chi_fn, omega[inside])
                    * chart.metric_jacobian(u[inside]))
            acc += float(np.sum(vals))
    return acc * vol / total
