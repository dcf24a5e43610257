import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import gpjflow.eta as eta_mod
from gpjflow import BeyondBlowup, DomainError, ModelParams, integral_I, make_profile, solve_eta
from gpjflow import reference as ref
from gpjflow.eta import closure_reachable, eta_rhs, min_bracket_along

# t* for a slope uniformly distributed on [-1, 1] (parabola and zigzag alike),
# from an extended-precision double quadrature of I(eta)^(a+1) over [0, eta_crit]
UNIFORM_TSTAR = {-2.5: 1.2847345724705864, -1.5: 3.2198390039990973, 1.0: 1.6449340668482264,
                 2.0: 0.9413980927026533}


@pytest.fixture(scope="module", params=[("parabola", -2.0), ("zigzag", 1.0), ("cosine", 0.5),
                                        ("fourier_zigzag", 3.0)], ids=str)
def case(request):
    kind, a = request.param
    p, m = make_profile(kind, 1.0, n_modes=3 if kind == "fourier_zigzag" else None), ModelParams(a)
    return p, m, solve_eta(p, m, 4.0)


class TestTrajectory:
    def test_defining_relation_at_nodes(self, case):
        p, m, traj = case
        for e, ep in zip(traj.eta, traj.eta_prime):
            assert abs(ep ** (1.0 / (m.a + 1.0)) * integral_I(p, m, min(e, traj.eta_crit * (1 - 1e-9))) - 1.0) <= 1e-8

    def test_monotone(self, case):
        _, _, traj = case
        assert np.all(np.diff(traj.eta) > 0)
        assert np.all(traj.eta_prime > 0)
        assert np.all(traj.eta < traj.eta_crit)

    def test_bracket_shrinks(self, case):
        p, m, traj = case
        mb = min_bracket_along(p, m, traj)
        assert np.all(np.diff(mb) < 0) and np.all(mb > 0)

    def test_deterministic(self, case):
        p, m, traj = case
        again = solve_eta(p, m, 4.0)
        assert np.array_equal(traj.times, again.times) and np.array_equal(traj.eta, again.eta)


class TestBlowupTimes:
    @pytest.mark.parametrize("a", sorted(UNIFORM_TSTAR))
    @pytest.mark.parametrize("kind", ["parabola", "zigzag"])
    def test_uniform_slope(self, kind, a):
        traj = solve_eta(make_profile(kind, 1.0), ModelParams(a), 6.0)
        assert traj.status == "blowup" and traj.mechanism == "bracket_closure"
        assert traj.t_star == pytest.approx(UNIFORM_TSTAR[a], abs=1e-6)

    def test_scaling_with_gamma(self):
        # u0 -> g u0 rescales time by 1/g
        traj = solve_eta(make_profile("parabola", 2.0), ModelParams(1.0), 3.0)
        assert traj.t_star == pytest.approx(UNIFORM_TSTAR[1.0] / 2.0, abs=1e-6)
        assert traj.t_star == pytest.approx(ref.pj_tstar(2.0), abs=1e-6)

    def test_hunter_saxton_clock(self):
        p = make_profile("parabola", 1.0)
        traj = solve_eta(p, ModelParams(-2.0), 3.0)
        ts = np.linspace(0.0, 0.9 * traj.t_star, 300)
        exact = np.array([ref.hs_eta(p, t) for t in ts])
        assert np.max(np.abs(traj.eta_at(ts) - exact)) <= 1e-6

    def test_tolerance_refinement(self):
        p, m = make_profile("fourier_zigzag", 1.0, n_modes=3), ModelParams(2.0)
        loose = solve_eta(p, m, 3.0, tol=1e-7).t_star
        tight = solve_eta(p, m, 3.0, tol=1e-11).t_star
        assert loose == pytest.approx(tight, abs=1e-6)


@pytest.fixture(scope="module")
def cosine():
    p, m = make_profile("cosine", 1.0), ModelParams(1.0)
    return p, m, solve_eta(p, m, 20.0)


class TestAsymptoticApproach:
    def test_not_a_blowup(self, cosine):
        p, m, traj = cosine
        assert traj.status == "reached_t_end"
        assert traj.closure_reachable is False
        assert closure_reachable(p, m)[0] is False

    def test_saturates_below_crit(self, cosine):
        _, _, traj = cosine
        assert traj.saturated_at is not None and traj.saturated_at < 20.0
        assert traj.eta_at(19.0) == traj.eta[-1] < traj.eta_crit
        assert traj.eta_at(19.0) == pytest.approx(ref.cosine_eta_closed(1.0, 19.0), abs=1e-6)

    def test_closure_reachable_for_uniform_slope(self):
        assert closure_reachable(make_profile("zigzag"), ModelParams(1.0))[0] is True
        assert closure_reachable(make_profile("parabola"), ModelParams(-2.0)) == (True, "bounded-integrand")


class TestDegenerate:
    @settings(max_examples=10, deadline=None)
    @given(st.floats(-5.0, 5.0).filter(lambda a: abs(a + 1) > 1e-3))
    def test_zero_profile_clock_is_time(self, a):
        traj = solve_eta(make_profile("parabola", 0.0), ModelParams(a), 3.0)
        assert traj.status == "reached_t_end"
        assert np.allclose(traj.eta, traj.times, atol=1e-14)
        assert math.isinf(traj.eta_crit)

    def test_eta_escape_is_labelled(self, monkeypatch):
        # synthetic clock eta' = 1 + eta^2 (eta = tan t) with no bracket closure: eta' passes 1e12 near pi/2
        monkeypatch.setattr(eta_mod, "eta_rhs", lambda p, m, y, tol=None: 1.0 + y * y)
        traj = solve_eta(make_profile("parabola", 0.0), ModelParams(1.0), 5.0)
        assert traj.status == "blowup" and traj.mechanism == "eta_escape"
        assert traj.eta_prime[-1] > eta_mod.ESCAPE
        assert traj.t_star == pytest.approx(math.pi / 2, abs=1e-5)

    def test_power_singularity_underflows(self, monkeypatch):
        # eta' = (1/2 - eta)^-2 needs steps below 1e-14 long before eta' reaches 1e12
        monkeypatch.setattr(eta_mod, "eta_rhs", lambda p, m, y, tol=None: (0.5 - y) ** -2 if y < 0.5 else math.inf)
        traj = solve_eta(make_profile("parabola", 0.0), ModelParams(1.0), 5.0)
        assert traj.status == "numerical_failure" and "underflow" in traj.reason
        assert traj.times[-1] == pytest.approx(1.0 / 24.0, abs=1e-4)


class TestErrors:
    def test_minus_one_rejected(self):
        with pytest.raises(DomainError):
            solve_eta(make_profile("parabola"), ModelParams(-1.0), 1.0)
        with pytest.raises(DomainError):
            eta_rhs(make_profile("parabola"), ModelParams(-1.0), 0.1)

    @pytest.mark.parametrize("t_end", [0.0, -1.0, math.nan])
    def test_bad_t_end(self, t_end):
        with pytest.raises(DomainError):
            solve_eta(make_profile("parabola"), ModelParams(1.0), t_end)

    def test_queries_past_blowup(self):
        traj = solve_eta(make_profile("parabola"), ModelParams(-3.0), 2.0)
        with pytest.raises(BeyondBlowup):
            traj.eta_at(traj.t_star)
        with pytest.raises(BeyondBlowup):
            traj.eta_prime_at(1.5)
        with pytest.raises(DomainError):
            traj.eta_at(-0.1)
        assert traj.horizon == traj.t_star
