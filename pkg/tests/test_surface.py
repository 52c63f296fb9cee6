"""Surface measures, charts, and the projected-shell integration."""

import math

import numpy as np
import pytest

from nilmax import group as grp
from nilmax import surface as srf

from conftest import make_scenario_a


class TestQuadratureOracles:
    def test_circle_circumference(self):
        mu = srf.sphere_measure(2, 64, None)
        assert abs(mu.total_mass - 2.0 * math.pi) < 1e-10

    def test_s2_second_moment(self):
        # int omega_1^2 dsigma over S^2 = (4 pi / 3), by symmetry
        mu = srf.sphere_measure(3, 64, None)
        val = mu.integrate(lambda w: w[:, 0] ** 2)
        assert abs(val - 4.0 * math.pi / 3.0) < 1e-8

    def test_s3_quartic_self_convergence(self):
        def f(w):
            return w[:, 0] ** 4 + w[:, 1] ** 4

        lo = srf.sphere_measure(4, 32, None).integrate(f)
        hi = srf.sphere_measure(4, 64, None).integrate(f)
        assert abs(lo - hi) < 1e-8

    def test_s3_total_mass(self):
        mu = srf.sphere_measure(4, 32, None)
        assert abs(mu.total_mass - 2.0 * math.pi**2) < 1e-8


class TestMeasures:
    def test_bump_support_and_peak(self):
        c = np.array([0.0, 1.0])
        chi = srf.bump(c, 0.5, 4)
        assert chi(c[None, :]) == 1.0
        assert chi(np.array([[0.0, 0.2]])) == 0.0
        inside = chi(np.array([[0.0, 0.8]]))
        assert 0.0 < inside < 1.0

    def test_patch_resolves_narrow_bump(self):
        c = np.array([0.0, 0.0, 1.0])
        chi = srf.bump(c, 0.2, 4)
        patch32 = srf.sphere_measure(3, 32, chi, patch_center=c, patch_radius=0.2)
        patch64 = srf.sphere_measure(3, 64, chi, patch_center=c, patch_radius=0.2)
        full = srf.sphere_measure(3, 64, chi)
        # the bump is C^3 at its support edge, so convergence is polynomial
        assert abs(patch32.total_mass - patch64.total_mass) < 1e-3 * patch64.total_mass
        assert abs(full.total_mass - patch64.total_mass) < 0.01 * patch64.total_mass
        assert patch64.total_mass > 0

    def test_disk_measure_area(self):
        frame = np.eye(3)[:2]
        mu = srf.disk_measure(3, frame, np.zeros(3), 0.7, 32)
        assert abs(mu.total_mass - math.pi * 0.49) < 1e-8

    def test_lebesgue_measure_volume(self):
        mu = srf.lebesgue_measure(2, np.zeros(2), 0.5, 16)
        assert abs(mu.total_mass - 1.0) < 1e-12

    def test_on_surface_and_frames(self):
        mu = srf.sphere_measure(3, 16, None)
        w = np.array([0.0, 0.0, 1.0])
        assert mu.on_surface(w)
        assert not mu.on_surface(2.0 * w)
        nrm = mu.normal_frame(w)
        tan = mu.tangent_frame(w)
        assert np.allclose(nrm @ tan.T, 0.0, atol=1e-12)
        assert np.allclose(tan @ tan.T, np.eye(2), atol=1e-12)

    def test_validation(self):
        with pytest.raises(srf.SurfaceError):
            srf.sphere_measure(1, 16, None)
        with pytest.raises(srf.SurfaceError):
            srf.sphere_measure(3, 4, None)


class TestChart:
    def test_frame_at_base_point(self, scenario_a):
        g, mu, om = scenario_a
        chart = srf.chart_at(mu, om, directions=g.lam)
        # tau_1 is the tangential projection of the tilt e1; at e4 that is e1
        assert np.allclose(chart.frame[0], [1.0, 0.0, 0.0, 0.0], atol=1e-10)
        assert np.allclose(chart.gamma(np.zeros((1, 3)))[0], om, atol=1e-12)
        D = chart.dgamma(np.zeros((1, 3)))[0]
        assert np.allclose(D[:, 0], chart.frame[0], atol=1e-10)

    def test_gamma_stays_on_sphere(self, scenario_a):
        _, mu, om = scenario_a
        chart = srf.chart_at(mu, om)
        rng = np.random.default_rng(0)
        u = 0.4 * rng.standard_normal((1000, 3))
        assert np.max(np.abs(np.linalg.norm(chart.gamma(u), axis=1) - 1.0)) < 1e-12

    def test_dgamma_matches_finite_differences(self, scenario_a):
        _, mu, om = scenario_a
        chart = srf.chart_at(mu, om)
        rng = np.random.default_rng(1)
        u = 0.3 * rng.standard_normal((20, 3))
        D = chart.dgamma(u)
        h = 1e-6
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            fd = (chart.gamma(u + e) - chart.gamma(u - e)) / (2.0 * h)
            assert np.max(np.abs(fd - D[:, :, j])) < 1e-6

    def test_normal_tilt_rejected(self, scenario_a):
        _, mu, om = scenario_a
        with pytest.raises(srf.SurfaceError):
            srf.chart_at(mu, om, directions=om)


@pytest.fixture(scope="module")
def setup():
    g, mu, om = make_scenario_a(eps=0.5, n_res=16)
    th = grp.ThetaFunctional(np.array([1.0]))
    hyp = grp.check_hypothesis(g, mu, th, om)
    chart = srf.chart_at(mu, om,
                         directions=np.vstack([g.lam[None, :], hyp.basis_V]))
    return g, mu, om, chart


class TestShell:

    def test_center_at_base(self, setup):
        g, mu, om, chart = setup
        h = srf.shell_center(chart, g, om, 1.0)
        assert np.max(np.abs(h)) < 1e-12

    def test_center_newton_residual(self, setup):
        g, mu, om, chart = setup
        x = om + np.array([0.01, 0.0, 0.0, 0.0])
        h = srf.shell_center(chart, g, x, 1.0)
        B = grp.range_basis(g, grp.ThetaFunctional(np.array([1.0])))
        u = np.concatenate([h, np.zeros(1)])
        resid = B @ (x - chart.gamma(u[None, :])[0])
        assert np.max(np.abs(resid)) < 1e-10

    def test_measure_positive_and_shrinking(self, setup):
        g, mu, om, chart = setup
        x = om + np.array([0.004, 0.002, -0.003, 0.001])
        s1 = srf.w_delta_measure(mu, chart, g, x, 1.01, 1.0 / 16.0, 0.5)
        s2 = srf.w_delta_measure(mu, chart, g, x, 1.01, 1.0 / 32.0, 0.5)
        assert s1 > 0 and s2 > 0
        # rank 2: halving delta should cut the measure by roughly 4
        assert 2.0 < s1 / s2 < 8.0

    def test_dyadic_shells_nest(self, setup):
        # the radial level-set brackets grow strictly with the level, so
        # dyadic annuli (delta/2, delta] tile without overlap
        g, mu, om, chart = setup
        x = om + np.array([0.004, 0.002, -0.003, 0.001])
        t, delta = 1.01, 1.0 / 16.0
        B = grp.range_basis(g, grp.ThetaFunctional(np.array([1.0])))
        U2, _ = srf._u2_nodes(1, 0.25, 8)
        H = srf.shell_center_batch(chart, B, x, t, U2)
        dirs, _ = srf._angle_dirs(2, 16)
        levels = [delta / 4.0, delta / 2.0, delta]
        brackets = [srf._bracket_rho(chart, B, x, t, H, U2, dirs, lev,
                                     chart.param_radius) for lev in levels]
        assert np.all(brackets[0] < brackets[1])
        assert np.all(brackets[1] < brackets[2])

    def test_delta_must_be_below_eps(self, setup):
        g, mu, om, chart = setup
        with pytest.raises(srf.SurfaceError):
            srf.w_delta_measure(mu, chart, g, om, 1.0, 0.5, 0.5)
