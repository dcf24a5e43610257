"""The conformal clock eta(t).

eta solves eta' = I(eta)^-(a+1) with eta(0) = 0, where I is the bracket
integral.  The clock runs until the bracket closes (min B reaches the
event threshold), eta' escapes, or t_end is reached.

For a > -1 the closure time is t(eta_crit) = integral of I^(a+1) over
[0, eta_crit], which may be infinite even though eta creeps up to
eta_crit (the cosine profile at a = 1 is the standard example).  Before
integrating, the tail of that integral is classified; when it diverges the
closure event is disarmed and the solution is followed as an asymptotic
approach.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import bisect

from .bracket import critical_eta, integral_I, min_bracket
from .errors import BeyondBlowup, BracketNonpositive, DomainError, QuadratureFailure, Undecidable
from .quadrature import classify_tail

log = logging.getLogger(__name__)

EVENT_EPS = 1e-9
CLAMP = 1e-12
FREEZE = 1e-11
ESCAPE = 1e12
QUAD_TOL = 1e-11

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def eta_crit(profile, params):
    """Smallest eta > 0 where min_xi B(xi; eta) = 0 (inf if never)."""
    return critical_eta(profile, params)


def eta_rhs(profile, params, eta, tol=QUAD_TOL):
    """eta' = I(eta)^-(a+1); raises BracketNonpositive past eta_crit."""
    if params.alpha is None:
        raise DomainError("the eta clock is undefined at a = -1")
    return integral_I(profile, params, eta, tol=tol) ** (-(params.a + 1.0))


@dataclass
class EtaTrajectory:
    """A solved clock: nodes, status and a cubic Hermite dense output.

    status is one of reached_t_end, blowup or numerical_failure.  For
    blowup, t_star/eta_star give the event and `mechanism` is
    bracket_closure or eta_escape.  `closure_reachable` records the tail
    classification for a > -1; when False the bracket only closes
    asymptotically and `saturated_at` (if set) is the time after which eta
    sits within 1e-11 relative of eta_crit and is held constant.
    """

    times: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    eta_crit: float
    status: str
    t_end: float
    t_star: float | None = None
    eta_star: float | None = None
    mechanism: str | None = None
    reason: str | None = None
    closure_reachable: bool = True
    closure_rule: str = ""
    saturated_at: float | None = None
    n_rejected: int = 0
    dense: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        self.dense = CubicHermiteSpline(self.times, self.eta, self.eta_prime)

    @property
    def horizon(self):
        return self.t_star if self.status == "blowup" else self.t_end

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("t must be nonnegative")
        if self.status == "blowup" and np.any(t >= self.t_star):
            raise BeyondBlowup(f"t={t!r} is at or past the singular time {self.t_star!r}")
        if np.any(t > self.times[-1]) and self.saturated_at is None:
            raise DomainError(f"t beyond the solved range [0, {self.times[-1]!r}]")
        return t

    def eta_at(self, t):
        t = self._check(t)
        out = np.where(t > self.times[-1], self.eta[-1], self.dense(np.minimum(t, self.times[-1])))
        return float(out) if out.ndim == 0 else out

    def eta_prime_at(self, t):
        t = self._check(t)
        out = np.where(t > self.times[-1], self.eta_prime[-1],
                       self.dense(np.minimum(t, self.times[-1]), 1))
        return float(out) if out.ndim == 0 else out


def closure_reachable(profile, params, tol=1e-9):
    """(reachable, rule): is integral of I^(a+1) over [0, eta_crit] finite?

    Always reachable for a < -1 (I stays bounded); for a > -1 decided by
    the dyadic tail test.  An undecided test falls back to reachable.
    """
    crit = critical_eta(profile, params)
    if math.isinf(crit):
        return False, "no-closure"
    if params.a < -1:
        return True, "bounded-integrand"
    p = params.a + 1.0
    try:
        verdict = classify_tail(lambda e: integral_I(profile, params, e, tol=tol) ** p, crit, tol=tol)
    except (Undecidable, QuadratureFailure) as exc:
        log.info("closure tail undecided (%s); arming the closure event", exc)
        return True, "undecided"
    return verdict.finite, verdict.rule


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def solve_eta(profile, params, t_end, tol=1e-9, max_step=0.02, quad_tol=QUAD_TOL, event_eps=EVENT_EPS,
              max_steps=200000):
    """Integrate eta' = I(eta)^-(a+1) from eta(0) = 0 up to t_end.

    Dormand-Prince 5(4) with rtol = atol = tol.  Terminates with status
    blowup when min B <= event_eps (t_star located by bisection on the step's
    Hermite interpolant to within tol) or when eta' exceeds 1e12.
    """
    if params.alpha is None:
        raise DomainError("solve_eta is undefined at a = -1")
    t_end = float(t_end)
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    crit = critical_eta(profile, params)
    reachable, rule = closure_reachable(profile, params) if math.isfinite(crit) else (False, "no-closure")
    clamp = crit * (1.0 - CLAMP) if math.isfinite(crit) else math.inf

    def rhs(y):
        return eta_rhs(profile, params, y, tol=quad_tol)

    def gap(y):
        return 1.0 - y / crit if math.isfinite(crit) else 1.0

    ts, ys, fs = [0.0], [0.0], [rhs(0.0)]
    t, y, f = 0.0, 0.0, fs[0]
    h = min(max_step, t_end, 0.1 * tol ** 0.2)
    n_rej = 0
    out = dict(status="reached_t_end")

    for _ in range(max_steps):
        if t >= t_end:
            break
        if not reachable and math.isfinite(crit) and gap(y) <= FREEZE:
            out["saturated_at"] = t
            break
        h = min(h, t_end - t, max_step)
        if h <= 1e-14 * max(1.0, t):
            out = dict(status="numerical_failure", reason=f"step size underflow at t={t!r}, eta={y!r}")
            break
        k = [f]
        try:
            for i in range(1, 7):
                yi = y + h * np.dot(_A[i], k)
                k.append(rhs(yi))
        except BracketNonpositive:
            n_rej += 1
            h = min(h / 4.0, 0.9 * (crit - y) / f)
            continue
        except QuadratureFailure as exc:
            out = dict(status="numerical_failure", reason=f"quadrature failure at eta={y!r}: {exc}")
            break
        y_new = y + h * np.dot(_B5, k)
        err = abs(h * np.dot(_E, k)) / (tol + tol * max(abs(y), abs(y_new)))
        if err > 1.0 or not math.isfinite(err):
            n_rej += 1
            h *= max(0.2, 0.9 * err ** -0.2) if math.isfinite(err) else 0.2
            continue
        if y_new > clamp:
            n_rej += 1
            h = min(h / 2.0, 0.9 * (clamp - y) / f)
            continue
        f_new = k[6]
        t_new = t + h
        if reachable and gap(y_new) <= event_eps:
            target = crit * (1.0 - event_eps)
            t_star = bisect(lambda s: _hermite(t, y, f, t_new, y_new, f_new, s) - target,
                            t, t_new, xtol=min(tol, 1e-12 * max(1.0, t_new)))
            eta_star = _hermite(t, y, f, t_new, y_new, f_new, t_star)
            if t_star > t:
                ts.append(t_star)
                ys.append(eta_star)
                fs.append(rhs(min(eta_star, target)))
            out = dict(status="blowup", t_star=t_star, eta_star=eta_star, mechanism="bracket_closure")
            break
        if f_new > ESCAPE:
            ts.append(t_new)
            ys.append(y_new)
            fs.append(f_new)
            out = dict(status="blowup", t_star=t_new, eta_star=y_new, mechanism="eta_escape")
            break
        t, y, f = t_new, y_new, f_new
        ts.append(t)
        ys.append(y)
        fs.append(f)
        h *= min(5.0, max(0.2, 0.9 * err ** -0.2)) if err > 0 else 5.0
    else:
        out = dict(status="numerical_failure", reason=f"step budget {max_steps} exhausted at t={t!r}")

    if len(ts) == 1:
        # no step taken (immediate failure); keep the dense output well-defined
        ts.append(ts[0] + 1e-300)
        ys.append(ys[0])
        fs.append(fs[0])
    log.debug("eta solve: %d accepted, %d rejected, status %s", len(ts) - 1, n_rej, out["status"])
    return EtaTrajectory(np.array(ts), np.array(ys), np.array(fs), crit, t_end=t_end,
                         closure_reachable=reachable, closure_rule=rule, n_rejected=n_rej, **out)


def min_bracket_along(profile, params, traj):
    """min_xi B at every stored node of a trajectory."""
    return np.array([min_bracket(profile, params, e) for e in traj.eta])
