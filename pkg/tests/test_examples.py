"""Small worked cases with closed forms, one assertion group each."""

import math

import numpy as np
import pytest

from gpjflow import (ModelParams, flow_F, flow_Fxi, gradient_hat, improved_root, make_profile, reverse_bernoulli_gap,
                     solve_eta, velocity_hat)
from gpjflow import reference as ref
from gpjflow.bracket import bracket_value, integral_I, integral_J, integral_W


@pytest.fixture(scope="module")
def parabola():
    return make_profile("parabola")


class TestBracketCases:
    def test_cosine_at_left_wall(self):
        p, m = make_profile("cosine"), ModelParams(1.0)
        for eta in (0.1, 0.5, 1.0):
            assert bracket_value(p, m, eta, 0.0) == pytest.approx(1.0 - eta * 8.0 / math.pi**2, abs=1e-14)

    @pytest.mark.parametrize("eta", [0.5, 1.5, 1.99])
    def test_hunter_saxton_I(self, parabola, eta):
        assert integral_I(parabola, ModelParams(-2.0), eta) == pytest.approx(1.0 + eta**2 / 12.0, abs=1e-12)

    def test_hunter_saxton_J_at_one(self, parabola):
        assert integral_J(parabola, ModelParams(-2.0), 1.2, 1.0) == pytest.approx(1.0 + 1.2**2 / 12.0, abs=1e-12)

    @pytest.mark.parametrize("kind", ["parabola", "zigzag", "cosine"])
    def test_burgers_W_is_the_datum(self, kind):
        p = make_profile(kind)
        for xi in (0.2, 0.5, 0.9):
            assert integral_W(p, ModelParams(-3.0), 0.4, xi) == pytest.approx(float(p.u(xi)), abs=1e-12)

    def test_W_at_rest(self, parabola):
        assert integral_W(parabola, ModelParams(0.0), 0.0, 0.5) == pytest.approx(-0.25, abs=1e-14)
        assert integral_W(parabola, ModelParams(1.0), 0.0, 1.0) == pytest.approx(0.0, abs=1e-14)


class TestFlowCases:
    def test_burgers_snapshot(self, parabola):
        m = ModelParams(-3.0)
        traj = solve_eta(parabola, m, 0.9)
        assert flow_F(parabola, m, traj, 0.5, 0.5) == pytest.approx(0.375, abs=1e-9)
        assert velocity_hat(parabola, m, traj, 0.5, 0.5) == pytest.approx(-0.25, abs=1e-9)

    @pytest.mark.parametrize("xi", [0.1, 0.5, 0.8])
    def test_burgers_gradient(self, parabola, xi):
        m = ModelParams(-3.0)
        traj = solve_eta(parabola, m, 0.9)
        t = 0.6
        s = 2 * xi - 1
        assert gradient_hat(parabola, m, traj, xi, t) == pytest.approx(s / (1 + t * s), rel=1e-8)

    def test_hunter_saxton_label_derivative(self, parabola):
        m = ModelParams(-2.0)
        traj = solve_eta(parabola, m, 10.0)
        t_star = ref.hs_tstar(parabola)
        for t in (0.3, 1.5, 0.9 * t_star):
            for xi in (0.0, 0.3, 0.7):
                eta = ref.hs_eta(parabola, t)
                want = math.cos(t / (2 * math.sqrt(3))) ** 2 * (1 + eta * (2 * xi - 1) / 2) ** 2
                assert flow_Fxi(parabola, m, traj, xi, t) == pytest.approx(want, rel=1e-7)

    def test_hunter_saxton_gradient_collapses(self, parabola):
        m = ModelParams(-2.0)
        traj = solve_eta(parabola, m, 10.0)
        t_star = traj.t_star
        values = [gradient_hat(parabola, m, traj, 0.0, t_star * (1 - d)) for d in (1e-2, 1e-3, 1e-4)]
        # u_x at the left wall grows like -1/(t* - t)
        assert values[0] < 0 and values[1] < 5 * values[0] and values[2] < 5 * values[1]
        assert ref.hs_eta(parabola, t_star * (1 - 1e-9)) == pytest.approx(2.0, abs=1e-6)


class TestOracleLimits:
    def test_constant_curvature_tends_to_crit(self):
        assert ref.cc_eta(2.0, 1e6) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
    def test_zigzag_rhs_vanishes_at_crit(self, a):
        crit = 2.0 / (a + 1.0)
        near = [ref.zigzag_eta_rhs_closed(1.0, a, crit * (1 - d)) for d in (1e-2, 1e-6, 1e-14)]
        assert all(v > 0 for v in near) and near[0] > near[1] > near[2]
        # at a = 1 the decay is only logarithmic: (2 / log(2 / d))^2
        assert near[2] < 5e-3

    def test_zigzag_rhs_stays_positive_above_one(self):
        # for a > 1 the bracket integral stays finite at closure: I -> (3/2) 2^(1/3) at a = 2
        near = ref.zigzag_eta_rhs_closed(1.0, 2.0, (2.0 / 3.0) * (1 - 1e-14))
        assert near == pytest.approx(4.0 / 27.0, rel=1e-4)


class TestCriteriaCases:
    def test_reverse_bernoulli_values(self):
        assert reverse_bernoulli_gap(0.0, 0.5) == pytest.approx(0.375, abs=1e-15)
        assert reverse_bernoulli_gap(1.0, 0.5) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)

    def test_zero_profile_has_no_root(self):
        p = make_profile("fourier", 1.0, coeffs=[(0.0, 0.0)])
        assert improved_root(p, ModelParams(1.0), 2) is None


class TestProfileCases:
    def test_zigzag_slopes(self):
        p = make_profile("zigzag")
        assert p.ux(np.array([0.0, 0.25, 0.5])) == pytest.approx([1.0, 0.0, -1.0], abs=1e-14)

    def test_single_mode_fourier_zigzag_is_the_cosine(self):
        fz, cos = make_profile("fourier_zigzag", n_modes=1), make_profile("cosine")
        x = np.linspace(0, 1, 41)
        assert np.allclose(fz.u(x), cos.u(x), atol=1e-14)
        assert np.allclose(fz.ux(x), cos.ux(x), atol=1e-14)
