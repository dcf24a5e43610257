"""Method-of-lines solver for the mock-vorticity form.

    omega_t + u omega_x = a u_x omega,    omega = u_xx,  u(0) = u(1) = 0

The velocity is recovered from omega by two cumulative trapezoid
integrations, omega_x uses fourth-order differences, and time stepping is
classical RK4.  This solver shares no code with the Lagrangian pipeline;
it exists to cross-check it.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

log = logging.getLogger(__name__)

GRADIENT_CAP = 1e6


@dataclass
class VorticityState:
    t: float
    x: np.ndarray
    omega: np.ndarray
    u: np.ndarray
    u_x: np.ndarray


@dataclass
class EulerianRun:
    """States saved during `evolve` plus the termination status.

    status: ok, gradient_blowup or numerical_failure; on failure the last
    saved state is the last finite one.
    """

    states: list = field(default_factory=list)
    status: str = "ok"
    reason: str | None = None
    n_steps: int = 0

    @property
    def final(self):
        return self.states[-1]


def recover_velocity(omega, x):
    """(u, u_x) with u_xx = omega and u(0) = u(1) = 0, by trapezoid sums."""
    omega = np.asarray(omega, dtype=float)
    x = np.asarray(x, dtype=float)
    if omega.size < 16 or omega.shape != x.shape:
        raise DomainError("need at least 16 grid points matching omega")
    V = cumulative_trapezoid(omega, x, initial=0.0)
    U = cumulative_trapezoid(V, x, initial=0.0)
    # x runs over [0, 1]; the linear term fixes u(1) = 0
    return U - x * U[-1], V - U[-1]


def ddx(f, h):
    """Fourth-order first derivative on a uniform grid (one-sided near the ends)."""
    d = np.empty_like(f)
    d[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


def evolve(profile, params, t_end, N=512, cfl=0.4, save_every=None):
    """Integrate from u0 to t_end on N uniform points.

    The step is cfl * dx / max|u| (also capped by the stretching rate).
    Stops early with status gradient_blowup once max|u_x| exceeds 1e6, or
    numerical_failure on non-finite values.  Saves the initial and final
    states, and every `save_every` steps if given.
    """
    if params.bc != "dirichlet":
        raise DomainError("the Eulerian cross-check supports Dirichlet boundaries only")
    N = int(N)
    if N < 128:
        raise DomainError("N must be at least 128")
    if not 0 < cfl <= 0.5:
        raise DomainError("cfl must lie in (0, 0.5]")
    t_end = float(t_end)
    if t_end < 0:
        raise DomainError("t_end must be nonnegative")
    a = params.a
    x = np.linspace(0.0, 1.0, N)
    h = x[1] - x[0]
    omega = profile.uxx(x)
    omega[-1] = profile.uxx(x[-1:], side="left")[0]

    def rhs(w):
        u, ux = recover_velocity(w, x)
        return -u * ddx(w, h) + a * ux * w

    run = EulerianRun()
    run.states.append(VorticityState(0.0, x, omega.copy(), profile.u(x), profile.ux(x)))
    t = 0.0
    steps = 0
    while t < t_end:
        u, ux = recover_velocity(omega, x)
        speed = np.max(np.abs(u))
        stretch = abs(a) * np.max(np.abs(ux)) + np.max(np.abs(ux))
        dt = min(cfl * h / speed if speed > 0 else np.inf,
                 0.2 / stretch if stretch > 0 else np.inf, t_end - t)
        k1 = rhs(omega)
        k2 = rhs(omega + 0.5 * dt * k1)
        k3 = rhs(omega + 0.5 * dt * k2)
        k4 = rhs(omega + dt * k3)
        new = omega + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        steps += 1
        t = t_end if t_end - t <= dt else t + dt
        if not np.all(np.isfinite(new)):
            run.status, run.reason = "numerical_failure", f"non-finite vorticity at t={t!r}"
            break
        omega = new
        u, ux = recover_velocity(omega, x)
        gmax = np.max(np.abs(ux))
        if gmax > GRADIENT_CAP:
            run.status, run.reason = "gradient_blowup", f"max|u_x| = {gmax:.3g} at t={t!r}"
            run.states.append(VorticityState(t, x, omega.copy(), u, ux))
            break
        if t == t_end or (save_every and steps % save_every == 0):
            run.states.append(VorticityState(t, x, omega.copy(), u, ux))
    run.n_steps = steps
    log.debug("eulerian: %d steps, status %s", steps, run.status)
    return run


def compare(snapshot, state):
    """Errors of the Eulerian state against the Lagrangian graph (F, u_hat)."""
    if abs(snapshot.t - state.t) > 1e-12:
        raise DomainError(f"time mismatch: snapshot t={snapshot.t!r}, state t={state.t!r}")
    u_lag = PchipInterpolator(snapshot.F, snapshot.u_hat)(state.x)
    ux_lag = PchipInterpolator(snapshot.F, snapshot.ux_hat)(state.x)
    du = u_lag - state.u
    return {
        "linf_u": float(np.max(np.abs(du))),
        "l2_u": float(np.sqrt(trapezoid(du**2, state.x))),
        "linf_ux": float(np.max(np.abs(ux_lag - state.u_x))),
    }
