"""Closed-form solutions and identity checks used as ground truth.

These functions deliberately avoid the package's own quadrature and ODE
code: integrals go through scipy.integrate.quad so that agreement with
the general pipeline is a genuine cross-check.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import BeyondBlowup, DomainError


@dataclass(frozen=True)
class OracleResult:
    """A closed-form value together with the interval on which it applies."""

    name: str
    value: float
    validity: tuple


def _quad(f, lo, hi, points=None):
    pts = None if points is None else [p for p in points if lo < p < hi] or None
    val, _ = quad(f, lo, hi, points=pts, epsabs=1e-14, epsrel=1e-13, limit=500)
    return val


def _ux_sq_norm(profile, upper=1.0):
    return _quad(lambda s: float(profile.ux(np.asarray(s))) ** 2, 0.0, upper, profile.split_points())


# -- a = -3: Burgers ----------------------------------------------------------

def burgers_tstar(profile):
    """t* = -1 / min u0_x = 1 / u_min (inf when u0_x >= 0)."""
    return 1.0 / profile.u_min if profile.u_min > 0 else math.inf


def burgers_flow(profile, xi, t):
    """Characteristics of Burgers' equation: F = xi + t u0(xi)."""
    if t >= burgers_tstar(profile):
        raise BeyondBlowup(f"t={t!r} is past the Burgers shock time")
    return float(xi + t * profile.u(np.asarray(xi, dtype=float)))


# -- a = -2: Hunter-Saxton ----------------------------------------------------

def hs_tstar(profile):
    """t* = (2/n) arctan(n / u_min), n = ||u0_x||_2."""
    n = math.sqrt(_ux_sq_norm(profile))
    if profile.u_min == 0:
        return math.inf
    return 2.0 / n * math.atan(n / profile.u_min)


def hs_eta(profile, t):
    """eta(t) = (2/n) tan(n t / 2)."""
    if t >= hs_tstar(profile):
        raise BeyondBlowup(f"t={t!r} is past the Hunter-Saxton blow-up time")
    n = math.sqrt(_ux_sq_norm(profile))
    if n == 0:
        return float(t)
    return 2.0 / n * math.tan(0.5 * n * t)


def hs_flow(profile, xi, t):
    """F = [xi + eta u0(xi) + eta^2/4 * int_0^xi u0_x^2] / eta'."""
    eta = hs_eta(profile, t)
    n2 = _ux_sq_norm(profile)
    eta_p = 1.0 + 0.25 * n2 * eta**2
    part = _ux_sq_norm(profile, xi) if xi > 0 else 0.0
    return (xi + eta * float(profile.u(np.asarray(xi, dtype=float))) + 0.25 * eta**2 * part) / eta_p


# -- a = 0, parabola: constant curvature ---------------------------------------

def cc_eta(gamma, t):
    """eta(t) = (2/gamma) tanh(gamma t / 2) for the parabola at a = 0."""
    if gamma == 0:
        return float(t)
    return 2.0 / gamma * math.tanh(0.5 * gamma * t)


def cc_flow(gamma, xi, t):
    """F = xi (coth(g t/2) - 1) / (1 - 2 xi + coth(g t/2)); F -> xi as t -> 0."""
    if t == 0 or gamma == 0:
        return float(xi)
    # coth - 1 = 2 / (exp(g t) - 1), evaluated without cancellation
    c_minus = 2.0 / math.expm1(gamma * t)
    return xi * c_minus / (2.0 - 2.0 * xi + c_minus)


def cc_flow_xi(gamma, xi, t):
    """Label derivative of cc_flow."""
    if t == 0 or gamma == 0:
        return 1.0
    c_minus = 2.0 / math.expm1(gamma * t)
    den = 2.0 - 2.0 * xi + c_minus
    return c_minus * (2.0 + c_minus) / den**2


# -- a = 1, parabola: Proudman-Johnson ------------------------------------------

def _pj_integrand(gamma, y):
    # (1/(4 g^2 y^2)) log^2 |(1 - g y)/(1 + g y)| written with atanh
    x = gamma * y
    if x < 1e-4:
        # atanh(x)/x = 1 + x^2/3 + x^4/5 + ...
        r = 1.0 + x * x / 3.0 + x**4 / 5.0
        return r * r
    if x < 1.0:
        v = math.atanh(x)
    elif x > 1.0:
        v = math.atanh(1.0 / x)
    else:
        return math.inf
    return (v / x) ** 2


def pj_psi_of_eta(gamma, eta):
    """Psi(eta) = (1/(4 g^2)) int_0^eta y^-2 log^2|(1 - g y)/(1 + g y)| dy.

    Along the a = 1 parabola solution t = Psi(eta(t)).
    """
    if eta < 0:
        raise DomainError("eta must be nonnegative")
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if eta == 0:
        return 0.0
    if math.isinf(eta):
        pts = [1.0 / gamma, 2.0 / gamma]
        return _quad(lambda y: _pj_integrand(gamma, y), 0.0, 2.0 / gamma, pts) + \
            _quad(lambda y: _pj_integrand(gamma, y), 2.0 / gamma, math.inf)
    return _quad(lambda y: _pj_integrand(gamma, y), 0.0, eta, [1.0 / gamma])


def pj_tstar(gamma):
    """Time at which the bracket closes, Psi(1/gamma) (= pi^2 / (6 gamma))."""
    return pj_psi_of_eta(gamma, 1.0 / gamma)


# -- piecewise-linear and cosine examples --------------------------------------

def zigzag_eta_rhs_closed(gamma, a, eta):
    """eta' for a slope uniformly distributed on [-gamma, gamma].

    With X = (a+1) gamma eta / 2 and p = (a-1)/(a+1),
    I = ((1+X)^p - (1-X)^p) / (2 X p), or log((1+X)/(1-X)) / (2X) at a = 1,
    and eta' = I^-(a+1).  At a = 1 this is [(a+1) gamma eta / log((1+X)/(1-X))]^2.
    Applies to the zigzag and to the parabola alike.
    """
    if abs(a + 1) <= 1e-9:
        raise DomainError("undefined at a = -1")
    X = 0.5 * (a + 1) * gamma * eta
    if not abs(X) < 1:
        raise DomainError(f"(a+1) gamma eta / 2 = {X!r} must lie in (-1, 1)")
    if X == 0:
        return 1.0
    p = (a - 1) / (a + 1)
    if p == 0:
        integral = math.atanh(X) / X
    else:
        lp, lm = math.log1p(X), math.log1p(-X)
        integral = (math.expm1(p * lp) - math.expm1(p * lm)) / (2.0 * X * p)
    return integral ** (-(a + 1))


def cosine_eta_closed(gamma, t):
    """eta(t) = tanh(c t) / c with c = 8 gamma / pi^2 (a = 1, cosine profile)."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    c = 8.0 * gamma / math.pi**2
    if c == 0:
        return float(t)
    return math.tanh(c * t) / c


def cosine_psi_closed(gamma, eta):
    """int_0^1 ds / (1 - c eta cos 2 pi s) = (1 - (c eta)^2)^-1/2."""
    beta = 8.0 * gamma / math.pi**2 * eta
    if not abs(beta) < 1:
        raise DomainError("c eta must lie in (-1, 1)")
    return 1.0 / math.sqrt(1.0 - beta * beta)


# -- three-dimensional ansatz -------------------------------------------------

def a_of_beta(beta):
    """Exponent a = -(1 + 2 beta) produced by the stretched 3-D ansatz."""
    return -(1.0 + 2.0 * beta)


@dataclass(frozen=True)
class AnsatzResidual:
    """Finite-difference residuals of the 3-D ansatz identities.

    div_residual: max |div U - (1 + beta) u0_x|.
    curl_residual: max |omega_3 - beta u0_xx y| with omega = curl U.
    flipped_sign_gap: max |omega_3 + beta u0_xx y|, the residual against the
    opposite orientation (2 |beta u0_xx y| up to differencing error).
    """

    div_residual: float
    curl_residual: float
    flipped_sign_gap: float


def ansatz_check(profile, beta, fd_step=1e-4, n_x=32, ys=(0.1, 0.5, 1.0)):
    """Check divergence and vorticity of U = (u0(x), beta u0_x(x) y, 0) by centered differences."""
    h = float(fd_step)
    if not 0 < h <= 1e-2:
        raise DomainError("fd_step must lie in (0, 1e-2]")
    # keep x +- h inside [0, 1] and away from breakpoints
    x = np.linspace(2 * h, 1 - 2 * h, n_x)
    for b in profile.breakpoints:
        x = x[np.abs(x - b) > 2 * h]
    y = np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(x, y, indexing="ij")

    def U1(x, y):
        return profile.u(x) + 0.0 * y

    def U2(x, y):
        return beta * profile.ux(x) * y

    div = (U1(X + h, Y) - U1(X - h, Y)) / (2 * h) + (U2(X, Y + h) - U2(X, Y - h)) / (2 * h)
    curl = (U2(X + h, Y) - U2(X - h, Y)) / (2 * h) - (U1(X, Y + h) - U1(X, Y - h)) / (2 * h)
    target = beta * profile.uxx(X) * Y
    return AnsatzResidual(
        float(np.max(np.abs(div - (1 + beta) * profile.ux(X)), initial=0.0)),
        float(np.max(np.abs(curl - target), initial=0.0)),
        float(np.max(np.abs(curl + target), initial=0.0)),
    )


# -- Liouville relation -----------------------------------------------------

_D1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))  # fourth-order first derivative, / 12h


def liouville_residual(Fxi, a, uxx, xi_points, t_points, h=1e-3, k=1e-3):
    """max |d2/dt dxi log f - (a+1) u0_xx f| with f = F_xi^(a+1).

    The mixed derivative is the tensor product of fourth-order central
    differences in xi (step h) and t (step k), so the truncation error is
    well below the tolerances used with it.  `Fxi(xi, t)` is any callable
    giving the label derivative of a flow map and `uxx(xi)` the initial
    curvature.  At a = -1 the relation reads d2/dt dxi log F_xi = u0_xx.
    """
    minus_one = abs(a + 1) <= 1e-9
    worst = 0.0
    for t in t_points:
        for xi in xi_points:
            def L(s, tau):
                v = Fxi(s, tau)
                return math.log(v) if minus_one else (a + 1) * math.log(v)
            mixed = sum(ci * cj * L(xi + i * h, t + j * k) for i, ci in _D1 for j, cj in _D1)
            mixed /= 144.0 * h * k
            if minus_one:
                rhs = float(uxx(xi))
            else:
                rhs = (a + 1) * float(uxx(xi)) * Fxi(xi, t) ** (a + 1)
            worst = max(worst, abs(mixed - rhs))
    return worst
