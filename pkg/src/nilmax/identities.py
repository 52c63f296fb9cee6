"""Structural identity checks: parabolic scaling and the m = 1 reduction.

Both identities hold nodewise at the quadrature level, so the reported
errors are pure floating-point noise; the suite records them against
explicit tolerances and fails loudly when one is exceeded.
"""

from __future__ import annotations

import numpy as np

from . import averaging as avg
from . import fields as fld
from . import group as grp
from . import surface as srf

SCALING_TOL = 1e-12
REDUCTION_TOL = 1e-8


def gaussian_field(dim: int, width: float = 1.0) -> fld.Field:
    def ev(pts):
        return np.exp(-np.sum(pts**2, axis=1) / width**2)

    box = np.array([[-8.0 * width, 8.0 * width]] * dim)
    return fld.Field(evaluator=ev, support_box=box, kind="custom")


def random_group(d: int, m: int, seed: int = 0) -> grp.GroupStructure:
    rng = np.random.default_rng(seed)
    J = rng.standard_normal((m, d, d))
    J = J - np.swapaxes(J, 1, 2)
    Lam = rng.standard_normal((m, d))
    return grp.GroupStructure(d=d, m=m, J=J, Lambda=Lam)


def scaling_suite(g: grp.GroupStructure, mu: srf.SurfaceMeasure,
                  s_list=(1.0 / 3.0, 0.5, 2.0, 5.0), n_samples: int = 100,
                  seed: int = 0):
    """Max nodewise error of the parabolic scaling identity per s."""
    f = gaussian_field(g.d + g.m)
    rows = []
    for s in s_list:
        err = avg.scaling_identity_check(g, mu, f, s, n_samples=n_samples,
                                         seed=seed)
        rows.append(["scaling", float(s), err, SCALING_TOL,
                     "pass" if err <= SCALING_TOL else "FAIL"])
    return rows


def reduction_check(g: grp.GroupStructure, theta: grp.ThetaFunctional,
                    mu: srf.SurfaceMeasure, n_samples: int = 50,
                    seed: int = 0) -> float:
    """Error of A_t f = A~_t F for theta-collapsed product test functions.

    For f(y, u) = g1(y) g2(theta^ . u), the average on the m-layer group
    equals the average of F(y, v) = g1(y) g2(v) on the reduced group at
    (x, theta^ . x_central).
    """
    g1tilde, _ = grp.reduce_to_m1(g, theta)
    that = theta.theta / np.linalg.norm(theta.theta)

    def f_ev(pts):
        y, u = pts[:, : g.d], pts[:, g.d:]
        return np.exp(-np.sum(y**2, axis=1)) * np.exp(-(u @ that) ** 2)

    f = fld.Field(evaluator=f_ev,
                  support_box=np.array([[-8.0, 8.0]] * (g.d + g.m)),
                  kind="custom")
    F = gaussian_field(g.d + 1)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = grp.GroupPoint(rng.standard_normal(g.d + g.m), g.d)
        t = float(rng.uniform(0.5, 2.0))
        lhs = avg.average(g, mu, f, x, t)
        xr = grp.GroupPoint(np.concatenate([x.x, [that @ x.u]]), g.d)
        rhs = avg.average(g1tilde, mu, F, xr, t)
        worst = max(worst, abs(lhs - rhs))
    return worst


def identity_suite(s_list=(1.0 / 3.0, 0.5, 2.0, 5.0), n_samples: int = 100,
                   n_res_reduction: int = 64, seed: int = 0):
    """Full suite: scaling on a Heisenberg-type group, reduction at m = 3.

    Returns rows (check, parameter, error, tolerance, status).
    """
    d = 2
    J = np.array([[[0.0, 1.0], [-1.0, 0.0]]])
    Lam = np.array([[1.0, 0.0]])
    g_heis = grp.GroupStructure(d=d, m=1, J=J, Lambda=Lam)
    mu2 = srf.sphere_measure(d, 128, None)
    rows = scaling_suite(g_heis, mu2, s_list=s_list, n_samples=n_samples,
                         seed=seed)

    d_red, m_red = 4, 3
    g_red = random_group(d_red, m_red, seed=seed + 1)
    theta = grp.ThetaFunctional(
        np.random.default_rng(seed + 2).standard_normal(m_red))
    mu4 = srf.sphere_measure(d_red, n_res_reduction, None)
    err = reduction_check(g_red, theta, mu4, n_samples=50, seed=seed + 3)
    rows.append(["reduction-m1", float(m_red), err, REDUCTION_TOL,
                 "pass" if err <= REDUCTION_TOL else "FAIL"])
    return rows
