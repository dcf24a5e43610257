"""Integrals of the bracket B(xi; eta) = 1 - eta (a+1)/2 u0_x(xi).

All flow quantities for a != -1 reduce to integrals of powers of B over
the Lagrangian label.  Near the critical eta the integrands develop sharp
peaks at the arg-extremum of u0_x, so B is evaluated in gap form

    B = b + (1 - b) * (u_max - u0_x) / u_max,   b = 1 - eta / eta_crit

(for a > -1; the a < -1 form uses u_min), which keeps full relative
accuracy even when min B is many orders of magnitude below one.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketNonpositive, DomainError
from .quadrature import DEFAULT_TOL, classify_tail, cumulative_integrate, graded_points, integrate

BCS = ("dirichlet", "periodic_meanfree")
A_EPS = 1e-9
GRADED_BELOW = 1e-3


def _regime(a):
    if a < -3:
        return "a<-3"
    if a < -1 - A_EPS:
        return "-3<=a<-1"
    if abs(a + 1) <= A_EPS:
        return "a=-1"
    if a < 0:
        return "-1<a<0"
    if a == 0:
        return "a=0"
    if a < 1:
        return "0<a<1"
    if a == 1:
        return "a=1"
    return "a>1"


@dataclass(frozen=True)
class ModelParams:
    """The exponent a, alpha = -2/(a+1) and the boundary-condition tag.

    alpha is None when |a + 1| <= 1e-9; those parameters are served by
    the dedicated a = -1 path in `flowmap`.  The regime tag follows the
    ranges a<-3, -3<=a<-1, a=-1, -1<a<0, 0<a<1, a>1 plus the points a=0, a=1.
    """

    a: float
    bc: str = "dirichlet"
    alpha: float | None = field(init=False)
    regime: str = field(init=False)

    def __post_init__(self):
        a = float(self.a)
        if not math.isfinite(a):
            raise DomainError("a must be finite")
        if self.bc not in BCS:
            raise DomainError(f"bc must be one of {BCS}, got {self.bc!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "alpha", None if abs(a + 1) <= A_EPS else -2.0 / (a + 1))
        object.__setattr__(self, "regime", _regime(a))

    @property
    def is_minus_one(self):
        return self.alpha is None


def _require_alpha(params):
    if params.alpha is None:
        raise DomainError("bracket integrals are undefined at a = -1 (alpha undefined)")


def critical_eta(profile, params):
    """Smallest eta > 0 at which min_xi B vanishes; inf if B never closes."""
    _require_alpha(params)
    a = params.a
    if a > -1:
        return 2.0 / ((a + 1) * profile.u_max) if profile.u_max > 0 else math.inf
    return -2.0 / ((a + 1) * profile.u_min) if profile.u_min > 0 else math.inf


class _Bracket:
    """B(.; eta) for one (profile, params, eta), with its minimum and peak locations."""

    def __init__(self, profile, params, eta):
        _require_alpha(params)
        self.profile = profile
        self.alpha = params.alpha
        self.eta = float(eta)
        self.k = 0.5 * (params.a + 1.0)
        crit = critical_eta(profile, params)
        self.eta_crit = crit
        if math.isinf(crit) or self.eta < 0:
            # no closing side (or eta negative): plain form is accurate
            self.gap = None
            self.b = 1.0 if profile.is_zero else float(np.min(self(np.linspace(0.0, 1.0, 257))))
            self.peaks = []
        else:
            self.b = 1.0 - self.eta / crit
            if params.a > -1:
                self.gap, self.scale, self.peaks = profile.gap_max, profile.u_max, list(profile.argmax_ux)
            else:
                self.gap, self.scale, self.peaks = profile.gap_min, profile.u_min, list(profile.argmin_ux)
        if self.b <= 0.0:
            raise BracketNonpositive(self.eta, self.b)

    def __call__(self, xi):
        if self.gap is None:
            return 1.0 - self.eta * self.k * self.profile.ux(xi)
        return self.b + (1.0 - self.b) * (self.gap(xi) / self.scale)

    def splits(self):
        pts = list(self.profile.split_points())
        if self.b < GRADED_BELOW:
            for c in self.peaks:
                pts.extend(graded_points(c, 0.0, 1.0, self.b * 1e-2))
        return pts

    def integrate(self, power, upper=1.0, weighted=False, tol=DEFAULT_TOL):
        if upper == 0.0:
            return 0.0
        ux = self.profile.ux

        if weighted:
            def f(s):
                return self(s) ** power * ux(s)
        else:
            def f(s):
                return self(s) ** power

        val, _ = integrate(f, 0.0, upper, tol=tol, rtol=tol, splits=self.splits())
        return val


def _check_xi(xi):
    xi = float(xi)
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi must lie in [0, 1], got {xi!r}")
    return xi


def bracket_value(profile, params, eta, xi):
    """B(xi; eta) = 1 - eta (a+1)/2 u0_x(xi)."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any((xi_arr < 0.0) | (xi_arr > 1.0)):
        raise DomainError("xi must lie in [0, 1]")
    _require_alpha(params)
    out = 1.0 - float(eta) * 0.5 * (params.a + 1.0) * profile.ux(xi_arr)
    return float(out) if out.ndim == 0 else out


def min_bracket(profile, params, eta):
    """min over xi of B(xi; eta); may be <= 0 (no error raised)."""
    try:
        return _Bracket(profile, params, eta).b
    except BracketNonpositive as exc:
        return exc.min_bracket


def integral_I(profile, params, eta, tol=DEFAULT_TOL):
    """Integral over [0, 1] of B^alpha."""
    return _Bracket(profile, params, eta).integrate(params.alpha, tol=tol)


def integral_J(profile, params, eta, xi, tol=DEFAULT_TOL):
    """Integral over [0, xi] of B^alpha; integral_J(., 1) equals integral_I."""
    xi = _check_xi(xi)
    return _Bracket(profile, params, eta).integrate(params.alpha, upper=xi, tol=tol)


def integral_W(profile, params, eta, xi, tol=DEFAULT_TOL):
    """Integral over [0, xi] of B^(alpha - 1) u0_x, the eta-derivative of integral_J."""
    xi = _check_xi(xi)
    return _Bracket(profile, params, eta).integrate(params.alpha - 1.0, upper=xi, weighted=True, tol=tol)


def bracket_columns(profile, params, eta, xi, tol=DEFAULT_TOL):
    """(J, W, B) on a sorted label grid `xi` starting at 0, via cumulative quadrature."""
    br = _Bracket(profile, params, eta)
    xi = np.asarray(xi, dtype=float)
    ux = profile.ux
    alpha = params.alpha
    splits = br.splits()
    J = cumulative_integrate(lambda s: br(s) ** alpha, xi, tol=tol, rtol=tol, splits=splits)
    W = cumulative_integrate(lambda s: br(s) ** (alpha - 1.0) * ux(s), xi, tol=tol, rtol=tol, splits=splits)
    return J, W, br(xi)


def psi_value(profile, params, eta, tol=DEFAULT_TOL):
    """psi(eta) = integral over [0, 1] of 1 / B(s; eta); psi(0) = 1."""
    if params.a < 1:
        raise DomainError("psi is defined for a >= 1")
    return _Bracket(profile, params, eta).integrate(-1.0, tol=tol)


def psi_sq_integrable(profile, params, tol=1e-9, k_max=20, ratio=0.9, cap=1e6):
    """Decide whether psi^2 is integrable over [0, eta_max], eta_max = 2/((a+1) u_max).

    Returns a TailVerdict (finite flag, value when finite, partial sums and
    increment ratios as evidence); raises Undecidable when the dyadic test
    reaches no verdict by k_max.
    """
    if params.a < 1:
        raise DomainError("psi square-integrability is a condition for a >= 1")
    if not profile.u_max > 0:
        raise DomainError("psi square-integrability needs u_max > 0")
    eta_max = critical_eta(profile, params)
    return classify_tail(lambda e: psi_value(profile, params, e, tol=tol) ** 2, eta_max,
                         tol=tol, k_max=k_max, ratio=ratio, cap=cap)
