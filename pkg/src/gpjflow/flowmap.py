"""Flow map F(xi, t) and the velocity field along particle paths.

For a != -1 everything is explicit in the clock eta(t):

    F     = eta'^(1/(a+1)) * J(xi; eta)
    F_xi  = eta'^(1/(a+1)) * B^alpha
    u_hat = eta'' / ((a+1) eta') * F + eta'^((a+2)/(a+1)) * W(xi; eta)
    ux_hat  = eta'' / ((a+1) eta') + eta' * u0_x / B
    uxx_hat = u0_xx * F_xi^a

with eta'' = -(a+1) I^-(a+2) W(1; eta) eta'.  eta is read from the dense
output and eta' is re-evaluated as I(eta)^-(a+1), so F(1, t) = J(1)/I = 1
holds to quadrature accuracy regardless of interpolation error.

At a = -1 the map is F = N(xi, t) / N(1, t) with N = integral of
exp(u0_x t) over [0, xi]; no clock is needed.
"""

from dataclasses import dataclass

import numpy as np

from .bracket import _Bracket, bracket_columns
from .errors import BeyondBlowup, DomainError
from .quadrature import cumulative_integrate, integrate

QUAD_TOL = 1e-11


@dataclass
class FlowSnapshot:
    """The Lagrangian state at time t on a label grid xi.

    `modulo_translation` is set for periodic runs, whose positions F are
    only defined up to a rigid shift.
    """

    t: float
    xi: np.ndarray
    F: np.ndarray
    F_xi: np.ndarray
    u_hat: np.ndarray
    ux_hat: np.ndarray
    uxx_hat: np.ndarray
    modulo_translation: bool = False

    COLUMNS = ("xi", "F", "F_xi", "u", "u_x", "u_xx")

    def table(self):
        return np.column_stack([self.xi, self.F, self.F_xi, self.u_hat, self.ux_hat, self.uxx_hat])


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(xi)) or np.any((xi < 0.0) | (xi > 1.0)):
        raise DomainError("xi must lie in [0, 1]")
    return xi


def _uxx(profile, xi):
    # one-sided value at breakpoints; left limit at xi = 1
    right = profile.uxx(xi)
    return np.where(xi == 1.0, profile.uxx(xi, side="left"), right)


class _Clock:
    """eta, eta', eta'' and I at time t for a != -1."""

    def __init__(self, profile, params, traj, t, tol):
        if traj is None:
            raise DomainError("a trajectory is required for a != -1")
        t = float(t)
        if traj.status == "blowup" and t >= traj.t_star:
            raise BeyondBlowup(f"t={t!r} is at or past the singular time {traj.t_star!r}")
        a = params.a
        self.t = t
        self.eta = traj.eta_at(t) if t > 0 else 0.0
        self.br = _Bracket(profile, params, self.eta)
        I = self.br.integrate(params.alpha, tol=tol)
        W1 = self.br.integrate(params.alpha - 1.0, weighted=True, tol=tol)
        self.I = I
        self.eta_p = I ** (-(a + 1.0))
        self.eta_pp = -(a + 1.0) * I ** (-(a + 2.0)) * W1 * self.eta_p
        self.scale = self.eta_p ** (1.0 / (a + 1.0))
        self.drift = self.eta_pp / ((a + 1.0) * self.eta_p)
        self.w_scale = self.eta_p ** ((a + 2.0) / (a + 1.0))


class _MinusOne:
    """The a = -1 flow: weights exp((u0_x - u_max) t), normalised by their integral."""

    def __init__(self, profile, t, tol):
        self.profile = profile
        self.t = float(t)
        self.shift = profile.u_max
        self.tol = tol
        self.splits = profile.split_points()
        self.D = self._integrate(0, 1.0)
        self.Dt = self._integrate(1, 1.0)

    def weight(self, s):
        return np.exp((self.profile.ux(s) - self.shift) * self.t)

    def _integrand(self, moment):
        if moment == 0:
            return self.weight
        return lambda s: self.profile.ux(s) * self.weight(s)

    def _integrate(self, moment, upper):
        val, _ = integrate(self._integrand(moment), 0.0, upper, tol=self.tol, rtol=self.tol, splits=self.splits)
        return val

    def cumulative(self, moment, xi):
        return cumulative_integrate(self._integrand(moment), xi, tol=self.tol, rtol=self.tol, splits=self.splits)


def _check_t(t):
    t = float(t)
    if not t >= 0:
        raise DomainError("t must be nonnegative")
    return t


def flow_F(profile, params, traj, xi, t, tol=QUAD_TOL):
    """Position at time t of the particle with label xi."""
    xi = float(_check_xi(xi))
    t = _check_t(t)
    if params.is_minus_one:
        m = _MinusOne(profile, t, tol)
        return m._integrate(0, xi) / m.D
    c = _Clock(profile, params, traj, t, tol)
    return c.scale * c.br.integrate(params.alpha, upper=xi, tol=tol)


def flow_Fxi(profile, params, traj, xi, t, tol=QUAD_TOL):
    """Label derivative F_xi(xi, t) > 0."""
    xi = float(_check_xi(xi))
    t = _check_t(t)
    if params.is_minus_one:
        m = _MinusOne(profile, t, tol)
        return float(m.weight(xi) / m.D)
    c = _Clock(profile, params, traj, t, tol)
    return float(c.scale * c.br(xi) ** params.alpha)


def velocity_hat(profile, params, traj, xi, t, tol=QUAD_TOL):
    """u(F(xi, t), t), the velocity carried by particle xi."""
    xi = float(_check_xi(xi))
    t = _check_t(t)
    if params.is_minus_one:
        m = _MinusOne(profile, t, tol)
        F = m._integrate(0, xi) / m.D
        return (m._integrate(1, xi) - F * m.Dt) / m.D
    c = _Clock(profile, params, traj, t, tol)
    F = c.scale * c.br.integrate(params.alpha, upper=xi, tol=tol)
    W = c.br.integrate(params.alpha - 1.0, upper=xi, weighted=True, tol=tol)
    return c.drift * F + c.w_scale * W


def gradient_hat(profile, params, traj, xi, t, tol=QUAD_TOL):
    """u_x(F(xi, t), t)."""
    xi = float(_check_xi(xi))
    t = _check_t(t)
    if params.is_minus_one:
        m = _MinusOne(profile, t, tol)
        return float(profile.ux(xi) - m.Dt / m.D)
    c = _Clock(profile, params, traj, t, tol)
    return float(c.drift + c.eta_p * profile.ux(xi) / c.br(xi))


def curvature_hat(profile, params, traj, xi, t, tol=QUAD_TOL, side="right"):
    """u_xx(F(xi, t), t) = u0_xx(xi) F_xi^a (one-sided at breakpoints)."""
    Fxi = flow_Fxi(profile, params, traj, xi, t, tol=tol)
    a = -1.0 if params.is_minus_one else params.a
    return float(profile.uxx(np.asarray(float(xi)), side=side) * Fxi ** a)


def sample_eulerian(profile, params, traj, t, N, tol=QUAD_TOL):
    """FlowSnapshot on the uniform label grid xi_i = i/(N-1).

    Since F is increasing, the pairs (F, u_hat) form the graph of u(., t).
    """
    N = int(N)
    if N < 16:
        raise DomainError("N must be at least 16")
    t = _check_t(t)
    xi = np.linspace(0.0, 1.0, N)
    uxx0 = _uxx(profile, xi)
    if params.is_minus_one:
        m = _MinusOne(profile, t, tol)
        N0 = m.cumulative(0, xi)
        N1 = m.cumulative(1, xi)
        F = N0 / N0[-1]
        F_xi = m.weight(xi) / N0[-1]
        u = (N1 - F * N1[-1]) / N0[-1]
        ux = profile.ux(xi) - N1[-1] / N0[-1]
        uxx = uxx0 / F_xi
    else:
        c = _Clock(profile, params, traj, t, tol)
        J, W, B = bracket_columns(profile, params, c.eta, xi, tol=tol)
        F = c.scale * J
        F_xi = c.scale * B ** params.alpha
        u = c.drift * F + c.w_scale * W
        ux = c.drift + c.eta_p * profile.ux(xi) / B
        uxx = uxx0 * F_xi ** params.a
    return FlowSnapshot(t, xi, F, F_xi, u, ux, uxx, modulo_translation=params.bc == "periodic_meanfree")
