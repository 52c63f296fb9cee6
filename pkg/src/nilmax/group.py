"""Two-step nilpotent group structures in coordinates.

A group element is a pair (x, u) with x in R^d and u in R^m; the product
twists the central coordinates by skew bilinear forms x^T J_i y.  A tilt
matrix Lambda (rows lambda_i) describes the non-invariant plane carrying
the averaging surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

SKEW_TOL = 1e-12
RANK_TOL = 1e-9


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupStructure:
    """Dimensions (d, m), skew matrices J_1..J_m and tilt rows lambda_1..lambda_m."""

    d: int
    m: int
    J: tuple  # m skew d x d matrices
    Lambda: np.ndarray  # m x d, row i = lambda_i^T

    def __post_init__(self):
        if self.d < 2 or self.m < 1:
            raise GroupError(f"need d >= 2 and m >= 1, got d={self.d}, m={self.m}")
        Js = []
        for i, Ji in enumerate(self.J):
            Ji = np.asarray(Ji, dtype=float)
            if Ji.shape != (self.d, self.d):
                raise GroupError(f"J[{i}] has shape {Ji.shape}, expected ({self.d}, {self.d})")
            asym = np.max(np.abs(Ji + Ji.T))
            if asym > SKEW_TOL:
                raise GroupError(f"J[{i}] is not skew-symmetric (asymmetry {asym:.3e})")
            Ji = 0.5 * (Ji - Ji.T)  # symmetrize away roundoff
            Ji.setflags(write=False)
            Js.append(Ji)
        object.__setattr__(self, "J", tuple(Js))
        Lam = np.asarray(self.Lambda, dtype=float)
        if Lam.shape != (self.m, self.d):
            raise GroupError(f"Lambda has shape {Lam.shape}, expected ({self.m}, {self.d})")
        Lam.setflags(write=False)
        object.__setattr__(self, "Lambda", Lam)

    @property
    def lam(self) -> np.ndarray:
        """The single tilt vector; only meaningful for m == 1."""
        if self.m != 1:
            raise GroupError("lam is only defined for m = 1")
        return self.Lambda[0]

    @property
    def J1(self) -> np.ndarray:
        if self.m != 1:
            raise GroupError("J1 shortcut is only defined for m = 1")
        return self.J[0]


@dataclass(frozen=True)
class GroupPoint:
    """A point of the group, stored as the stacked vector (x, u) in R^{d+m}."""

    xu: np.ndarray
    d: int

    def __post_init__(self):
        xu = np.asarray(self.xu, dtype=float)
        if xu.ndim != 1 or not np.all(np.isfinite(xu)):
            raise GroupError("group point must be a finite 1-d vector")
        xu.setflags(write=False)
        object.__setattr__(self, "xu", xu)

    @property
    def x(self) -> np.ndarray:
        return self.xu[: self.d]

    @property
    def u(self) -> np.ndarray:
        return self.xu[self.d:]


def point(g: GroupStructure, x, u) -> GroupPoint:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if x.shape != (g.d,) or u.shape != (g.m,):
        raise GroupError("point dimensions do not match group")
    return GroupPoint(np.concatenate([x, u]), g.d)


@dataclass(frozen=True)
class ThetaFunctional:
    """A functional on the central layer, given by its coefficient vector."""

    theta: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)

    @property
    def m(self) -> int:
        return self.theta.shape[0]

    def is_zero(self) -> bool:
        return bool(np.all(self.theta == 0.0))


@dataclass(frozen=True)
class HypothesisResult:
    holds: bool
    r: int
    theta: ThetaFunctional
    omega0: np.ndarray
    basis_V: np.ndarray  # r x d, orthonormal rows spanning V
    diagnostics: dict = field(default_factory=dict)


def multiply(g: GroupStructure, a: GroupPoint, b: GroupPoint) -> GroupPoint:
    """Group product (x+y, u+v+(x^T J_1 y, ..., x^T J_m y))."""
    if a.xu.shape != (g.d + g.m,) or b.xu.shape != (g.d + g.m,):
        raise GroupError("point dimensions do not match group")
    x, y = a.x, b.x
    twist = np.array([x @ Ji @ y for Ji in g.J])
    return GroupPoint(np.concatenate([x + y, a.u + b.u + twist]), g.d)


def inverse(g: GroupStructure, a: GroupPoint) -> GroupPoint:
    return GroupPoint(-a.xu, g.d)


def dilate(g: GroupStructure, s: float, a: GroupPoint) -> GroupPoint:
    """Automorphic dilation (x, u) -> (s x, s^2 u)."""
    if s <= 0:
        raise GroupError(f"dilation parameter must be positive, got {s}")
    return GroupPoint(np.concatenate([s * a.x, s * s * a.u]), g.d)


def s_matrix(g: GroupStructure, theta: ThetaFunctional) -> np.ndarray:
    """The (d+1) x d matrix [sum theta_i J_i ; sum theta_i lambda_i^T]."""
    th = theta.theta
    if th.shape != (g.m,):
        raise GroupError("theta length does not match m")
    top = sum(t * Ji for t, Ji in zip(th, g.J))
    if np.isscalar(top):  # all-zero theta with generator sum() fallback
        top = np.zeros((g.d, g.d))
    bottom = th @ g.Lambda
    return np.vstack([top, bottom])


def rank_r(g: GroupStructure, theta: ThetaFunctional, tol: float = RANK_TOL) -> int:
    """Numerical rank of the stacked matrix, via singular values."""
    if theta.is_zero():
        raise GroupError("rank invariant requires theta != 0")
    S = s_matrix(g, theta)
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def range_basis(g: GroupStructure, theta: ThetaFunctional, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the column space of S^T in R^d."""
    St = s_matrix(g, theta).T  # d x (d+1)
    U, sv, _ = np.linalg.svd(St)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((0, g.d))
    r = int(np.count_nonzero(sv > tol * sv[0]))
    return U[:, :r].T


def check_hypothesis(g: GroupStructure, surface, theta: ThetaFunctional,
                     omega0, tol: float = 1e-9) -> HypothesisResult:
    """Test the three conditions locating a tangential subspace at omega0.

    The subspace is range(sum theta_i J_i) + span(sum theta_i lambda_i),
    i.e. the column space of the transposed stacked matrix; it must lie
    inside the tangent space of the surface at omega0, the tilt component
    must be nonzero, and the cutoff must not vanish at omega0.
    """
    omega0 = np.asarray(omega0, dtype=float)
    if not surface.on_surface(omega0, tol=1e-9):
        raise GroupError("omega0 does not lie on the surface")
    tilt = theta.theta @ g.Lambda
    cond_tilt = bool(np.linalg.norm(tilt) > tol)
    cond_chi = bool(abs(surface.chi(omega0)) > 0)

    basis = range_basis(g, theta)
    r = basis.shape[0]
    normals = surface.normal_frame(omega0)  # (d-k) x d orthonormal rows
    if normals.shape[0]:
        resid = float(np.max(np.abs(basis @ normals.T))) if r else 0.0
    else:
        resid = 0.0
    cond_tangent = resid < tol

    diagnostics = {
        "tilt_nonzero": cond_tilt,
        "tangent": cond_tangent,
        "chi_nonzero": cond_chi,
        "tangent_residual": resid,
    }
    holds = cond_tilt and cond_tangent and cond_chi and 1 <= r <= surface.dim_surface
    return HypothesisResult(holds=holds, r=r, theta=theta, omega0=omega0,
                            basis_V=basis, diagnostics=diagnostics)


def _exact_det(M: np.ndarray) -> Fraction:
    """Determinant over the rationals (floats are exact rationals)."""
    n = M.shape[0]
    A = [[Fraction(float(M[i, j])) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        inv = Fraction(1) / A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] * inv
            if f:
                for c in range(col, n):
                    A[r][c] -= f * A[col][c]
    return det


def is_metivier(g: GroupStructure, n_sample: int = 4096) -> bool:
    """Whether sum theta_i J_i is invertible for every nonzero theta.

    For m = 1 this is decided exactly (rational determinant of J_1).  For
    m >= 2 a deterministic low-discrepancy sample of the unit sphere in
    theta-space is tested; a False answer is certain, a True answer is a
    sampling-based necessary check only.
    """
    if g.m == 1:
        return _exact_det(g.J[0]) != 0
    sampler = qmc.Halton(d=g.m, scramble=False, seed=0)
    pts = sampler.random(n_sample)
    # map the unit cube to the sphere through the normal quantile
    from scipy.special import ndtri
    z = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(z, axis=1)
    keep = norms > 1e-8
    thetas = z[keep] / norms[keep, None]
    for th in thetas:
        Jt = sum(t * Ji for t, Ji in zip(th, g.J))
        sv = np.linalg.svd(Jt, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] <= RANK_TOL * sv[0]:
            return False
    return True


def reduce_to_m1(g: GroupStructure, theta: ThetaFunctional):
    """Collapse the central layer along theta.

    Returns the (d+1)-dimensional group with J~ = sum theta^_i J_i and
    tilt lambda~ = sum theta^_i lambda_i (theta^ the normalization of
    theta), together with the orthogonal matrix whose first column is
    theta^.  The rank invariant is preserved.
    """
    th = theta.theta
    if th.shape != (g.m,):
        raise GroupError("theta length does not match m")
    nrm = np.linalg.norm(th)
    if nrm == 0:
        raise GroupError("theta must be nonzero")
    that = th / nrm
    lam_new = that @ g.Lambda
    if np.linalg.norm(lam_new) == 0:
        raise GroupError("theta o Lambda = 0: reduction needs a nonzero tilt")
    J_new = sum(t * Ji for t, Ji in zip(that, g.J))
    # orthogonal completion of theta^ to a basis of R^m
    A = np.eye(g.m)
    A[:, 0] = that
    Q, R = np.linalg.qr(A)
    if Q[:, 0] @ that < 0:
        Q = -Q
    g1 = GroupStructure(d=g.d, m=1, J=(J_new,), Lambda=lam_new[None, :])
    return g1, Q
