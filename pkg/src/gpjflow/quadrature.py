"""Adaptive composite Gauss-Legendre quadrature.

Every panel is integrated with a 15-point Gauss-Legendre rule and compared
against the sum of the same rule on its two halves; the disagreement is
the panel's error estimate, and the worst panels are bisected until the
total falls below the goal.  All panels of a refinement round are
evaluated in one vectorized call, so integrands must accept numpy arrays
of any shape.

The divergence classifier `classify_tail` decides whether an integral with
a possible endpoint singularity is finite by watching how the increments
over the dyadic truncations [0, L(1 - 2^-k)] decay.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import QuadratureFailure, Undecidable

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)

DEFAULT_TOL = 1e-10
MAX_PANELS = 20000


def _gl(f, lo, hi):
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * _NODES[None, :]
    return half * (f(x) @ _WEIGHTS)


def _initial_edges(a, b, splits):
    edges = [a, b]
    if splits is not None:
        s = np.asarray(splits, dtype=float).ravel()
        edges.extend(s[(s > a) & (s < b)].tolist())
    return np.unique(np.asarray(edges, dtype=float))


def _refine(f, edges, tol, rtol, max_panels):
    """Adaptively integrate over the panels defined by `edges`.

    Global strategy: while the summed error estimate exceeds the goal, the
    panels carrying the largest errors (enough of them to account for all
    but half the goal) are bisected.  Returns (lo, value, err) of the final
    panels; lo identifies where a panel starts so callers can bin values.
    """
    a, b = edges[0], edges[-1]
    lo, hi = edges[:-1], edges[1:]
    whole = _gl(f, lo, hi)
    mid = 0.5 * (lo + hi)
    left, right = _gl(f, lo, mid), _gl(f, mid, hi)
    n_panels = lo.size
    resolution = 8.0 * np.finfo(float).eps
    while True:
        val = left + right
        err = np.abs(whole - val)
        goal = max(tol, rtol * abs(val.sum()))
        # panels at floating-point resolution cannot be split further
        live = np.where(hi - lo > resolution * np.maximum(1.0, np.abs(lo)), err, 0.0)
        total = live.sum()
        if not np.isfinite(total) or not np.isfinite(err.sum()):
            raise QuadratureFailure(f"non-finite integrand on [{a}, {b}]")
        if total <= goal:
            stuck = err.sum() - total
            if stuck > goal:
                raise QuadratureFailure(
                    f"error {stuck:.3g} is concentrated in panels at floating-point "
                    f"resolution on [{a}, {b}]; the integrand is likely singular"
                )
            return lo, val, err
        order = np.argsort(-live, kind="stable")
        count = int(np.searchsorted(np.cumsum(live[order]), total - 0.5 * goal)) + 1
        sel = np.zeros(lo.size, dtype=bool)
        sel[order[:count]] = True
        n_panels += count
        if n_panels > max_panels:
            raise QuadratureFailure(
                f"tolerance {goal:.3g} unreachable within {max_panels} panels "
                f"on [{a}, {b}] (error estimate {total:.3g})"
            )
        c_lo = np.concatenate([lo[sel], mid[sel]])
        c_hi = np.concatenate([mid[sel], hi[sel]])
        c_whole = np.concatenate([left[sel], right[sel]])
        c_mid = 0.5 * (c_lo + c_hi)
        keep = ~sel
        lo = np.concatenate([lo[keep], c_lo])
        hi = np.concatenate([hi[keep], c_hi])
        mid = np.concatenate([mid[keep], c_mid])
        whole = np.concatenate([whole[keep], c_whole])
        left = np.concatenate([left[keep], _gl(f, c_lo, c_mid)])
        right = np.concatenate([right[keep], _gl(f, c_mid, c_hi)])


def integrate(f, a, b, tol=DEFAULT_TOL, rtol=None, splits=None, max_panels=MAX_PANELS):
    """Integrate a vectorized `f` over [a, b].

    `splits` are interior points where the integrand is not smooth (kinks,
    jumps, near-singular peaks); they always become panel edges.  The
    accepted error is max(tol, rtol * |value|) with rtol defaulting to tol.

    Returns (value, error_estimate).
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0, 0.0
    if b < a:
        v, e = integrate(f, b, a, tol, rtol, splits, max_panels)
        return -v, e
    rtol = tol if rtol is None else rtol
    _, val, err = _refine(f, _initial_edges(a, b, splits), tol, rtol, max_panels)
    return float(val.sum()), float(err.sum())


def cumulative_integrate(f, nodes, tol=DEFAULT_TOL, rtol=None, splits=None, max_panels=MAX_PANELS):
    """Return the integrals of `f` from nodes[0] to each entry of `nodes`.

    `nodes` must be strictly increasing.  All node intervals are refined
    together, so the cost is that of a single adaptive integration over
    [nodes[0], nodes[-1]].
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size < 2:
        return np.zeros_like(nodes)
    if np.any(np.diff(nodes) <= 0):
        raise ValueError("nodes must be strictly increasing")
    rtol = tol if rtol is None else rtol
    extra = [] if splits is None else list(np.ravel(splits))
    edges = _initial_edges(nodes[0], nodes[-1], np.concatenate([nodes[1:-1], extra]))
    lo, val, _ = _refine(f, edges, tol, rtol, max_panels)
    bins = np.searchsorted(nodes, lo, side="right") - 1
    per_interval = np.zeros(nodes.size - 1)
    np.add.at(per_interval, np.clip(bins, 0, nodes.size - 2), val)
    return np.concatenate([[0.0], np.cumsum(per_interval)])


def graded_points(center, lo, hi, finest, ratio=0.5):
    """Split points accumulating geometrically at `center` from both sides."""
    pts = [center]
    d = ratio * max(center - lo, hi - center)
    while d >= finest:
        if center - d > lo:
            pts.append(center - d)
        if center + d < hi:
            pts.append(center + d)
        d *= ratio
    return pts


@dataclass
class TailVerdict:
    """Outcome of `classify_tail`.

    `finite` is the verdict; `value` is the integral estimate (partial sum
    plus geometric remainder) when finite, else None.  `partials` and
    `ratios` record the evidence for reports.
    """

    finite: bool
    value: float | None
    partials: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    rule: str = ""


def classify_tail(
    g,
    upper,
    tol=1e-9,
    k_min=4,
    k_max=20,
    ratio=0.9,
    stall=0.95,
    window=4,
    cap=1e6,
):
    """Decide whether the integral of `g` over [0, upper] is finite.

    `g` is a scalar function that may be singular at `upper`.  Partial
    integrals P_k over [0, upper(1 - 2^-k)], k = k_min..k_max, are
    accumulated; with d_k = P_k - P_{k-1}:

    * finite when `window` consecutive ratios d_k / d_{k-1} are <= `ratio`
      (geometric remainder d_k r / (1 - r) added to the returned value);
    * divergent when `window` consecutive ratios are >= `stall`
      (increments fail to decay) or a partial integral exceeds `cap`.

    Raises Undecidable when neither rule fires by k_max.
    """

    def gv(y):
        flat = np.ravel(y)
        return np.array([g(v) for v in flat]).reshape(np.shape(y))

    def piece(lo, hi):
        val, _ = integrate(gv, lo, hi, tol=tol, rtol=tol)
        return val

    x_prev = upper * (1.0 - 2.0 ** (-k_min))
    total = piece(0.0, x_prev)
    partials, increments, ratios = [total], [], []
    run_finite = run_div = 0
    for k in range(k_min + 1, k_max + 1):
        x = upper * (1.0 - 2.0 ** (-k))
        d = piece(x_prev, x)
        x_prev = x
        total += d
        partials.append(total)
        if total > cap:
            return TailVerdict(False, None, partials, ratios, "cap")
        if increments:
            r = d / increments[-1] if increments[-1] != 0 else (0.0 if d == 0 else np.inf)
            ratios.append(r)
            run_finite = run_finite + 1 if r <= ratio else 0
            run_div = run_div + 1 if r >= stall else 0
            if run_finite >= window:
                r_tail = max(ratios[-window:])
                return TailVerdict(True, total + d * r_tail / (1.0 - r_tail), partials, ratios, "ratio")
            if run_div >= window:
                return TailVerdict(False, None, partials, ratios, "stall")
        increments.append(d)
        if d == 0.0 and k > k_min + window:
            return TailVerdict(True, total, partials, ratios, "zero")
    raise Undecidable(f"tail classification undecided after k={k_max} (ratios {ratios[-window:]})")
