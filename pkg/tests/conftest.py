"""Shared fixtures: the two reference scenarios used across the suite."""

import numpy as np
import pytest

from nilmax import group as grp
from nilmax import surface as srf


def make_scenario_a(eps=1.0 / 16.0, n_res=16):
    """d = 4, m = 1, rank-2 setup: J twists (e1, e2), tilt e1, base point e4."""
    d = 4
    J = np.zeros((1, d, d))
    J[0, 0, 1], J[0, 1, 0] = 1.0, -1.0
    lam = np.zeros((1, d))
    lam[0, 0] = 1.0
    g = grp.GroupStructure(d=d, m=1, J=J, Lambda=lam)
    om = np.zeros(d)
    om[3] = 1.0
    chi = srf.bump(om, eps, 4)
    mu = srf.sphere_measure(d, n_res, chi, patch_center=om, patch_radius=eps)
    return g, mu, om


def make_heisenberg():
    J = np.array([[[0.0, 1.0], [-1.0, 0.0]]])
    Lam = np.array([[1.0, 0.0]])
    return grp.GroupStructure(d=2, m=1, J=J, Lambda=Lam)


def random_point(g, rng, scale=1.0):
    return grp.GroupPoint(scale * rng.standard_normal(g.d + g.m), g.d)


@pytest.fixture(scope="session")
def scenario_a():
    return make_scenario_a()


@pytest.fixture(scope="session")
def heisenberg():
    return make_heisenberg()
