"""Group algebra, rank invariant, hypothesis check, and the m = 1 reduction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilmax import group as grp
from nilmax.identities import random_group

from conftest import make_heisenberg, make_scenario_a, random_point


def _max_err(a, b):
    return float(np.max(np.abs(a.xu - b.xu)))


class TestAlgebra:
    def test_heisenberg_product(self):
        g = make_heisenberg()
        a = grp.point(g, [1.0, 0.0], [0.0])
        b = grp.point(g, [0.0, 1.0], [0.0])
        ab = grp.multiply(g, a, b)
        assert np.allclose(ab.xu, [1.0, 1.0, 1.0])
        ba = grp.multiply(g, b, a)
        assert np.allclose(ba.xu, [1.0, 1.0, -1.0])

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=50, deadline=None)
    def test_associativity(self, seed):
        rng = np.random.default_rng(seed)
        g = random_group(4, 3, seed=seed % 1000)
        a, b, c = (random_point(g, rng) for _ in range(3))
        lhs = grp.multiply(g, grp.multiply(g, a, b), c)
        rhs = grp.multiply(g, a, grp.multiply(g, b, c))
        assert _max_err(lhs, rhs) < 1e-12

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=50, deadline=None)
    def test_inverse(self, seed):
        rng = np.random.default_rng(seed)
        g = random_group(3, 2, seed=seed % 1000)
        a = random_point(g, rng)
        e = grp.multiply(g, a, grp.inverse(g, a))
        assert float(np.max(np.abs(e.xu))) < 1e-12

    @given(st.integers(0, 2**31 - 1),
           st.floats(0.1, 10.0, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_dilation_automorphism(self, seed, s):
        rng = np.random.default_rng(seed)
        g = random_group(3, 2, seed=seed % 1000)
        a, b = random_point(g, rng), random_point(g, rng)
        lhs = grp.dilate(g, s, grp.multiply(g, a, b))
        rhs = grp.multiply(g, grp.dilate(g, s, a), grp.dilate(g, s, b))
        assert _max_err(lhs, rhs) < 1e-9 * max(1.0, s * s)

    def test_skew_symmetry_enforced(self):
        J = np.zeros((1, 2, 2))
        J[0, 0, 1] = 1.0  # J + J^T far from zero
        with pytest.raises(grp.GroupError):
            grp.GroupStructure(d=2, m=1, J=J, Lambda=np.zeros((1, 2)))

    def test_shape_validation(self):
        with pytest.raises(grp.GroupError):
            grp.GroupStructure(d=2, m=1, J=np.zeros((1, 3, 3)),
                               Lambda=np.zeros((1, 2)))
        with pytest.raises(grp.GroupError):
            grp.GroupStructure(d=2, m=1, J=np.zeros((1, 2, 2)),
                               Lambda=np.zeros((2, 2)))

    def test_dilate_rejects_nonpositive(self):
        g = make_heisenberg()
        with pytest.raises(grp.GroupError):
            grp.dilate(g, 0.0, grp.point(g, [1.0, 0.0], [0.0]))


class TestRank:
    def test_pure_tilt_rank_one(self):
        # J = 0, nonzero tilt: the stacked matrix has a single nonzero row
        d = 3
        g = grp.GroupStructure(d=d, m=1, J=np.zeros((1, d, d)),
                               Lambda=np.array([[0.0, 0.0, 2.0]]))
        th = grp.ThetaFunctional(np.array([1.0]))
        assert grp.rank_r(g, th) == 1

    def test_scenario_a_rank_two(self):
        g, _, _ = make_scenario_a()
        assert grp.rank_r(g, grp.ThetaFunctional(np.array([1.0]))) == 2

    def test_zero_theta_rejected(self):
        g = make_heisenberg()
        with pytest.raises(grp.GroupError):
            grp.rank_r(g, grp.ThetaFunctional(np.array([0.0])))

    @given(st.integers(0, 2**31 - 1),
           st.floats(0.01, 100.0, allow_nan=False))
    @settings(max_examples=40, deadline=None)
    def test_rank_scale_invariance(self, seed, c):
        g = random_group(4, 2, seed=seed % 1000)
        th = np.random.default_rng(seed).standard_normal(2)
        r1 = grp.rank_r(g, grp.ThetaFunctional(th))
        r2 = grp.rank_r(g, grp.ThetaFunctional(c * th))
        assert r1 == r2

    def test_rank_even_when_tilt_vanishes(self):
        # Lambda = 0 leaves only the skew block; skew matrices have even rank
        rng = np.random.default_rng(7)
        for _ in range(100):
            d, m = int(rng.integers(2, 6)), int(rng.integers(1, 4))
            A = rng.standard_normal((m, d, d))
            g = grp.GroupStructure(d=d, m=m, J=A - np.swapaxes(A, 1, 2),
                                   Lambda=np.zeros((m, d)))
            th = grp.ThetaFunctional(rng.standard_normal(m))
            assert grp.rank_r(g, th) % 2 == 0

    def test_range_basis_orthonormal(self):
        g, _, _ = make_scenario_a()
        B = grp.range_basis(g, grp.ThetaFunctional(np.array([1.0])))
        assert B.shape == (2, 4)
        assert np.allclose(B @ B.T, np.eye(2), atol=1e-12)


class TestMetivier:
    def test_heisenberg_is_metivier(self):
        assert grp.is_metivier(make_heisenberg())

    def test_zero_twist_is_not(self):
        g = grp.GroupStructure(d=2, m=1, J=np.zeros((1, 2, 2)),
                               Lambda=np.array([[1.0, 0.0]]))
        assert not grp.is_metivier(g)

    def test_rank_deficient_d4_is_not(self):
        g, _, _ = make_scenario_a()  # J1 has rank 2 < 4
        assert not grp.is_metivier(g)


class TestReduction:
    def test_m1_identity(self):
        g = make_heisenberg()
        g1, Q = grp.reduce_to_m1(g, grp.ThetaFunctional(np.array([1.0])))
        assert np.allclose(g1.J1, g.J1)
        assert np.allclose(g1.lam, g.lam)
        assert np.allclose(Q, np.eye(1))

    def test_m2_selects_component(self):
        d = 2
        J = np.zeros((2, d, d))
        J[1, 0, 1], J[1, 1, 0] = 1.0, -1.0
        Lam = np.array([[1.0, 0.0], [0.0, 3.0]])
        g = grp.GroupStructure(d=d, m=2, J=J, Lambda=Lam)
        g1, Q = grp.reduce_to_m1(g, grp.ThetaFunctional(np.array([0.0, 1.0])))
        assert np.allclose(g1.J1, J[1])
        assert np.allclose(g1.lam, Lam[1])
        assert np.allclose(Q[:, 0], [0.0, 1.0])

    def test_rank_preserved(self):
        rng = np.random.default_rng(3)
        for seed in range(20):
            g = random_group(4, 3, seed=seed)
            th = grp.ThetaFunctional(rng.standard_normal(3))
            g1, _ = grp.reduce_to_m1(g, th)
            assert (grp.rank_r(g1, grp.ThetaFunctional(np.array([1.0])))
                    == grp.rank_r(g, th))

    def test_zero_theta_rejected(self):
        g = random_group(3, 2, seed=0)
        with pytest.raises(grp.GroupError):
            grp.reduce_to_m1(g, grp.ThetaFunctional(np.zeros(2)))


class TestHypothesis:
    def test_scenario_a_holds(self, scenario_a):
        g, mu, om = scenario_a
        res = grp.check_hypothesis(g, mu, grp.ThetaFunctional(np.array([1.0])), om)
        assert res.holds
        assert res.r == 2
        # V = range(S^T) must be tangent at omega0 = e4
        assert np.max(np.abs(res.basis_V @ om)) < 1e-9

    def test_fails_outside_cutoff(self, scenario_a):
        g, mu, _ = scenario_a
        far = np.array([1.0, 0.0, 0.0, 0.0])  # on S^3, chi vanishes there
        res = grp.check_hypothesis(g, mu, grp.ThetaFunctional(np.array([1.0])), far)
        assert not res.holds
        assert not res.diagnostics["chi_nonzero"]

    def test_off_surface_point_rejected(self, scenario_a):
        g, mu, _ = scenario_a
        with pytest.raises(grp.GroupError):
            grp.check_hypothesis(g, mu, grp.ThetaFunctional(np.array([1.0])),
                                 np.array([0.0, 0.0, 0.0, 2.0]))
