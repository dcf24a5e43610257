"""Initial velocity profiles u0 on [0, 1] and their calculus.

Every profile vanishes at both ends, so its slope u0_x has zero mean.  The
analytic kinds are written as u0_x = gamma * g(xi) with a fixed shape g
whose extrema and arg-extrema are known in closed form; this also gives
cancellation-free expressions for u_max - u0_x and u0_x + u_min, which
the bracket integrals need when the flow is close to losing injectivity.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError
from .quadrature import QuadratureFailure, integrate

KINDS = ("parabola", "zigzag", "fourier_zigzag", "cosine", "samples", "fourier")

_PROFILE_TOL = 1e-13
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _pin_ends(xi, u):
    # sine series leave rounding residue at the endpoints; u0 vanishes there exactly
    return np.where((xi == 0.0) | (xi == 1.0), 0.0, u)


def _odd_modes(n_modes):
    return np.arange(1, 2 * n_modes, 2, dtype=float)


@dataclass(frozen=True, eq=False)
class InitialProfile:
    """An initial velocity u0 with evaluable u0_x and u0_xx.

    Build instances with `make_profile`.  `breakpoints` lists the interior
    points where u0_xx jumps (or, for sampled data, the spline knots);
    every quadrature over the profile splits there.
    """

    kind: str
    gamma: float = 1.0
    n_modes: int | None = None
    samples: tuple | None = None
    coeffs: tuple | None = None
    breakpoints: tuple = ()
    _spline: object = field(default=None, repr=False)
    _ext: dict = field(default_factory=dict, repr=False)

    # -- pointwise evaluation -------------------------------------------------

    def u(self, xi):
        xi = np.asarray(xi, dtype=float)
        g = self.gamma
        if self.kind == "parabola":
            return g * xi * (xi - 1.0)
        if self.kind == "zigzag":
            return np.where(xi <= 0.5, g * (xi - 2.0 * xi**2), g * (2.0 * xi**2 - 3.0 * xi + 1.0))
        if self.kind in ("cosine", "fourier_zigzag"):
            n = _odd_modes(self.n_modes)
            s = np.sin(2.0 * np.pi * xi[..., None] * n) / n**3
            return _pin_ends(xi, (4.0 * g / np.pi**3) * s.sum(axis=-1))
        if self.kind == "fourier":
            c, sn, n = self._fourier_arrays()
            arg = 2.0 * np.pi * xi[..., None] * n
            terms = (c * np.sin(arg) + sn * (1.0 - np.cos(arg))) / (2.0 * np.pi * n)
            return _pin_ends(xi, g * terms.sum(axis=-1))
        return self._spline(xi)

    def ux(self, xi):
        xi = np.asarray(xi, dtype=float)
        g = self.gamma
        if self.kind == "parabola":
            return g * (2.0 * xi - 1.0)
        if self.kind == "zigzag":
            return np.where(xi <= 0.5, g * (1.0 - 4.0 * xi), g * (4.0 * xi - 3.0))
        if self.kind in ("cosine", "fourier_zigzag"):
            n = _odd_modes(self.n_modes)
            s = np.cos(2.0 * np.pi * xi[..., None] * n) / n**2
            return (8.0 * g / np.pi**2) * s.sum(axis=-1)
        if self.kind == "fourier":
            c, sn, n = self._fourier_arrays()
            arg = 2.0 * np.pi * xi[..., None] * n
            return g * (c * np.cos(arg) + sn * np.sin(arg)).sum(axis=-1)
        return self._spline(xi, 1)

    def uxx(self, xi, side="right"):
        """Second derivative; at a breakpoint the one-sided value from `side`."""
        xi = np.asarray(xi, dtype=float)
        g = self.gamma
        if self.kind == "parabola":
            return np.full_like(xi, 2.0 * g)
        if self.kind == "zigzag":
            left = (xi < 0.5) | ((xi == 0.5) & (side == "left"))
            return np.where(left, -4.0 * g, 4.0 * g)
        if self.kind in ("cosine", "fourier_zigzag"):
            n = _odd_modes(self.n_modes)
            s = np.sin(2.0 * np.pi * xi[..., None] * n) / n
            return (-16.0 * g / np.pi) * s.sum(axis=-1)
        if self.kind == "fourier":
            c, sn, n = self._fourier_arrays()
            arg = 2.0 * np.pi * xi[..., None] * n
            return g * (2.0 * np.pi * n * (sn * np.cos(arg) - c * np.sin(arg))).sum(axis=-1)
        if side == "left":
            # CubicSpline is right-continuous at knots; nudge for the left limit
            xs = np.asarray(self.samples[0])
            at_knot = np.isin(xi, xs[1:])
            shifted = np.where(at_knot, np.nextafter(xi, -np.inf), xi)
            return self._spline(shifted, 2)
        return self._spline(xi, 2)

    def eval(self, order, xi, side="right"):
        """u0 (order 0), u0_x (order 1) or u0_xx (order 2) at xi in [0, 1]."""
        xi_arr = np.asarray(xi, dtype=float)
        if np.any(~np.isfinite(xi_arr)) or np.any((xi_arr < 0.0) | (xi_arr > 1.0)):
            raise DomainError(f"xi must lie in [0, 1], got {xi!r}")
        if order == 0:
            out = self.u(xi_arr)
        elif order == 1:
            out = self.ux(xi_arr)
        elif order == 2:
            if side not in ("left", "right"):
                raise DomainError("side must be 'left' or 'right'")
            out = self.uxx(xi_arr, side=side)
        else:
            raise DomainError(f"order must be 0, 1 or 2, got {order!r}")
        return float(out) if np.ndim(out) == 0 else out

    # -- extrema of the slope -------------------------------------------------

    @property
    def u_min(self):
        return self._ext["u_min"]

    @property
    def u_max(self):
        return self._ext["u_max"]

    @property
    def argmin_ux(self):
        return self._ext["argmin"]

    @property
    def argmax_ux(self):
        return self._ext["argmax"]

    @property
    def is_zero(self):
        return self.u_min == 0.0 and self.u_max == 0.0

    def gap_max(self, xi):
        """u_max - u0_x(xi) >= 0, free of cancellation near the maximum."""
        xi = np.asarray(xi, dtype=float)
        shape = self._shape_gaps(xi)
        if shape is None:
            return np.maximum(self.u_max - self.ux(xi), 0.0)
        below, above = shape
        return self.gamma * below if self.gamma >= 0 else -self.gamma * above

    def gap_min(self, xi):
        """u0_x(xi) + u_min >= 0, free of cancellation near the minimum."""
        xi = np.asarray(xi, dtype=float)
        shape = self._shape_gaps(xi)
        if shape is None:
            return np.maximum(self.ux(xi) + self.u_min, 0.0)
        below, above = shape
        return self.gamma * above if self.gamma >= 0 else -self.gamma * below

    def _shape_gaps(self, xi):
        # (g_max - g, g - g_min) for the unit-amplitude shape, or None
        if self.kind == "parabola":
            return 2.0 * (1.0 - xi), 2.0 * xi
        if self.kind == "zigzag":
            first = xi <= 0.5
            return (np.where(first, 4.0 * xi, 4.0 * (1.0 - xi)),
                    np.where(first, 2.0 - 4.0 * xi, 4.0 * xi - 2.0))
        if self.kind in ("cosine", "fourier_zigzag"):
            n = _odd_modes(self.n_modes)
            arg = np.pi * xi[..., None] * n
            c = 16.0 / np.pi**2
            return (c * (np.sin(arg) ** 2 / n**2).sum(axis=-1),
                    c * (np.cos(arg) ** 2 / n**2).sum(axis=-1))
        return None

    def _fourier_arrays(self):
        c = np.array([p[0] for p in self.coeffs], dtype=float)
        s = np.array([p[1] for p in self.coeffs], dtype=float)
        return c, s, np.arange(1, len(self.coeffs) + 1, dtype=float)

    def split_points(self):
        """Interior breakpoints plus the arg-extrema of u0_x."""
        pts = set(self.breakpoints) | set(self.argmin_ux) | set(self.argmax_ux)
        return sorted(p for p in pts if 0.0 < p < 1.0)

    def describe(self):
        d = {"kind": self.kind, "gamma": self.gamma}
        if self.n_modes is not None and self.kind == "fourier_zigzag":
            d["n_modes"] = self.n_modes
        if self.coeffs is not None:
            d["coeffs"] = [list(c) for c in self.coeffs]
        if self.samples is not None:
            d["n_samples"] = len(self.samples[0])
        return d


def _golden_max(f, lo, hi, tol=1e-13):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def numeric_extrema(ux, n_grid=4096):
    """(u_min, u_max, argmin, argmax) of a slope function by grid scan and golden-section polish."""
    x = np.linspace(0.0, 1.0, n_grid + 1)
    y = np.asarray(ux(x), dtype=float)

    def polish(values, sign):
        i = int(np.argmax(sign * values))
        if i in (0, n_grid):
            return x[i], sign * values[i]
        xm, vm = _golden_max(lambda s: sign * float(ux(np.array(s))), x[i - 1], x[i + 1])
        if vm < sign * values[i]:
            return x[i], sign * values[i]
        return xm, vm

    xmax, vmax = polish(y, 1.0)
    xmin, vmin = polish(y, -1.0)
    # vmin holds max(-ux) = u_min
    return max(float(vmin), 0.0), max(float(vmax), 0.0), float(xmin), float(xmax)


def make_profile(kind, gamma=1.0, n_modes=None, samples=None, coeffs=None):
    """Construct an InitialProfile.

    kind: parabola (u0 = gamma xi (xi - 1)), zigzag (piecewise-linear slope
    gamma - 4 gamma xi / 4 gamma xi - 3 gamma), fourier_zigzag (odd-cosine
    triangle-wave series of the zigzag slope truncated to `n_modes` terms),
    cosine (one-term series), samples (C1 cubic interpolation of (xi, u0)
    pairs) or fourier (slope gamma * sum_n c_n cos 2 pi n xi + s_n sin 2 pi n xi
    from `coeffs` = [(c_1, s_1), ...]).
    """
    if kind not in KINDS:
        raise DomainError(f"unknown profile kind {kind!r}; expected one of {KINDS}")
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise DomainError("gamma must be finite")

    if kind == "fourier_zigzag":
        if n_modes is None or int(n_modes) < 1:
            raise DomainError("fourier_zigzag requires n_modes >= 1")
        n_modes = int(n_modes)
    elif kind == "cosine":
        n_modes = 1
    else:
        n_modes = None

    spline = None
    breakpoints = ()
    if kind == "zigzag":
        breakpoints = (0.5,)
    elif kind == "samples":
        xs, us = _check_samples(samples)
        spline = CubicSpline(xs, us, bc_type="not-a-knot")
        breakpoints = tuple(float(v) for v in xs[1:-1])
        samples = (tuple(xs.tolist()), tuple(us.tolist()))
    elif kind == "fourier":
        if not coeffs:
            raise DomainError("fourier requires a non-empty coeffs list")
        coeffs = tuple((float(c), float(s)) for c, s in coeffs)
        if not all(math.isfinite(v) for pair in coeffs for v in pair):
            raise DomainError("fourier coefficients must be finite")

    prof = InitialProfile(kind, gamma, n_modes, samples if kind == "samples" else None,
                          coeffs if kind == "fourier" else None, breakpoints, spline, {})
    prof._ext.update(_extrema(prof))
    return prof


def _check_samples(samples):
    if samples is None:
        raise DomainError("samples kind requires (xi, u0) pairs")
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise DomainError("samples must be a sequence of at least 3 (xi, u0) pairs")
    xs, us = arr[:, 0], arr[:, 1]
    if not np.all(np.isfinite(arr)):
        raise DomainError("samples must be finite")
    if np.any(np.diff(xs) <= 0):
        raise DomainError("sample xi values must be strictly increasing")
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise DomainError("samples must include the endpoints xi=0 and xi=1")
    if us[0] != 0.0 or us[-1] != 0.0:
        raise DomainError("sampled u0 must vanish at xi=0 and xi=1")
    return xs, us


def _extrema(p):
    g = p.gamma
    if g == 0.0:
        return {"u_min": 0.0, "u_max": 0.0, "argmin": (), "argmax": ()}
    if p.kind == "parabola":
        lo_at, hi_at, g_min, g_max = (0.0,), (1.0,), -1.0, 1.0
    elif p.kind == "zigzag":
        lo_at, hi_at, g_min, g_max = (0.5,), (0.0, 1.0), -1.0, 1.0
    elif p.kind in ("cosine", "fourier_zigzag"):
        peak = (8.0 / np.pi**2) * float(np.sum(1.0 / _odd_modes(p.n_modes) ** 2))
        lo_at, hi_at, g_min, g_max = (0.5,), (0.0, 1.0), -peak, peak
    else:
        u_min, u_max, xmin, xmax = numeric_extrema(p.ux)
        return {"u_min": u_min, "u_max": u_max, "argmin": (xmin,), "argmax": (xmax,)}
    if g > 0:
        return {"u_min": -g * g_min, "u_max": g * g_max, "argmin": lo_at, "argmax": hi_at}
    return {"u_min": -g * g_max, "u_max": g * g_min, "argmin": hi_at, "argmax": lo_at}


def extrema_ux(profile):
    """(u_min, u_max) with -u_min <= u0_x <= u_max, both >= 0."""
    return profile.u_min, profile.u_max


def _sup_uxx(profile):
    k = profile.kind
    g = abs(profile.gamma)
    if k == "parabola":
        return 2.0 * g
    if k == "zigzag":
        return 4.0 * g
    if k == "cosine":
        return 16.0 * g / np.pi
    if k == "samples":
        xs = np.asarray(profile.samples[0])
        # piecewise-linear second derivative: extremes sit at knots
        return float(np.max(np.abs(np.concatenate([profile.uxx(xs), profile.uxx(xs, side="left")]))))
    a_min, a_max, _, _ = numeric_extrema(profile.uxx)
    return max(a_min, a_max)


def norm(profile, derivative, p):
    """L^p(0, 1) norm of u0_x (derivative=1) or u0_xx (derivative=2).

    Returns inf when the quadrature refinement diverges.
    """
    if derivative not in (1, 2):
        raise DomainError("derivative must be 1 or 2")
    p = float(p)
    if not p > 0:
        raise DomainError("p must be positive")
    if math.isinf(p):
        if derivative == 1:
            return max(profile.u_min, profile.u_max)
        return _sup_uxx(profile)
    f = profile.ux if derivative == 1 else profile.uxx
    try:
        val, _ = integrate(lambda s: np.abs(f(s)) ** p, 0.0, 1.0, tol=_PROFILE_TOL,
                           splits=profile.split_points())
    except QuadratureFailure:
        return math.inf
    if not math.isfinite(val) or val > 1e8:
        return math.inf
    return val ** (1.0 / p)


def moment_ux(profile, k):
    """Integral over (0, 1) of u0_x^k for integer 1 <= k <= 16."""
    if int(k) != k or not 1 <= k <= 16:
        raise DomainError("moment order k must be an integer in [1, 16]")
    k = int(k)
    val, _ = integrate(lambda s: profile.ux(s) ** k, 0.0, 1.0, tol=_PROFILE_TOL,
                       splits=profile.split_points())
    return val


def partial_moment_ux(profile, k, xi):
    """Integral over (0, xi) of u0_x^k."""
    val, _ = integrate(lambda s: profile.ux(s) ** k, 0.0, float(xi), tol=_PROFILE_TOL,
                       splits=profile.split_points())
    return val
