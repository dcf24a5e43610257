"""Sufficient conditions for global existence or finite-time blow-up.

Each clause is evaluated independently and reported with the numbers it
used.  Clause ids and their regimes:

    A1  a < -3        ||u0_x||_2 < sqrt((3a+5)/(a+3)) u_min          singular
    A2  a < -3        u0_xx in L^(2/(2+(a+1)q)) for some admissible q  singular
    B   -3 <= a < -1  always; t* < -2/((a+1) u_min)                    singular
    C   a = -1        always                                           global
    D   -1 < a < 0    u0_xx in L^(-1/a)                                global
    E   a > -1        u_max < ||u0_x||_2 / sqrt(1+a)                   global
    G   a > -1        eta* u_max < 2/(a+1), eta* the least root of p_n  global
    F   a >= 1        psi in L^2(0, 2/((a+1) u_max))                   singular

The verdict cites the first satisfied clause in the order A1, A2, B, C,
D, E, G, F.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect
from scipy.special import comb

from .bracket import critical_eta, psi_sq_integrable
from .errors import DomainError, GPJError
from .profiles import moment_ux, norm

log = logging.getLogger(__name__)

ORDER = ("A1", "A2", "B", "C", "D", "E", "G", "F")
KIND = {"A1": "singular", "A2": "singular", "B": "singular", "C": "global",
        "D": "global", "E": "global", "G": "global", "F": "singular"}
N_Q = 16
LP_CAP = 1e8


@dataclass
class Clause:
    id: str
    applicable: bool
    satisfied: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def kind(self):
        return KIND[self.id]


@dataclass
class CriteriaReport:
    """Per-clause results, the verdict and the consistency flag.

    consistency_flag is False exactly when a global and a singular clause
    are both satisfied.
    """

    a: float
    clauses: list
    verdict: str
    consistency_flag: bool
    time_bound: float | None = None
    decisive: str | None = None
    note: str | None = None

    def clause(self, cid):
        for c in self.clauses:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def to_dict(self):
        return {
            "a": self.a,
            "verdict": self.verdict,
            "decisive_clause": self.decisive,
            "time_bound": self.time_bound,
            "consistency_flag": self.consistency_flag,
            "note": self.note,
            "clauses": [dict(asdict(c), kind=c.kind) for c in self.clauses],
        }


def reverse_bernoulli_gap(x, alpha):
    """(1+x)^alpha - [alpha(alpha-1) x^2/2 + alpha x + alpha(3-alpha)/2], >= 0 for x > -1, 0 < alpha < 1."""
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if np.any(x <= -1) or np.any((alpha <= 0) | (alpha >= 1)):
        raise DomainError("need x > -1 and 0 < alpha < 1")
    rhs = 0.5 * alpha * (alpha - 1) * x * x + alpha * x + 0.5 * alpha * (3 - alpha)
    out = (1 + x) ** alpha - rhs
    return float(out) if out.ndim == 0 else out


def improved_polynomial(profile, params, n):
    """Coefficients c_0..c_n (ascending) of p_n(eta)."""
    a = params.a
    if not a > -1:
        raise DomainError("p_n is defined for a > -1")
    if int(n) != n or not 2 <= n <= 12:
        raise DomainError("n must be an integer in [2, 12]")
    n = int(n)
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    base = -2.0 / (a + 1)
    for k in range(2, n + 1):
        coeffs[k] = comb(n, k, exact=True) * base ** (1 - k) * moment_ux(profile, k) / n
    return coeffs


def improved_root(profile, params, n, n_scan=4096):
    """Least positive root of p_n on (0, 10 eta_crit], or None."""
    coeffs = improved_polynomial(profile, params, n)
    if np.all(coeffs[1:] == 0):
        return None
    crit = critical_eta(profile, params)
    if math.isinf(crit):
        return None

    def p(e):
        return float(np.polynomial.polynomial.polyval(e, coeffs))

    grid = np.linspace(0.0, 10.0 * crit, n_scan + 1)
    vals = np.polynomial.polynomial.polyval(grid, coeffs)
    for i in range(1, grid.size):
        if vals[i] == 0.0:
            return float(grid[i])
        if np.sign(vals[i]) != np.sign(vals[i - 1]):
            return float(bisect(p, grid[i - 1], grid[i], xtol=1e-12))
    return None


def _lp_member(profile, p):
    """Is u0_xx in L^p(0, 1)?  Bounded curvature short-circuits to yes."""
    sup = norm(profile, 2, math.inf)
    if math.isfinite(sup):
        return True, sup
    val = norm(profile, 2, p)
    return math.isfinite(val) and val < LP_CAP, val


def _guarded(clause, fn):
    try:
        fn(clause)
    except GPJError as exc:
        clause.satisfied = False
        clause.detail["undecidable"] = str(exc)
        log.info("clause %s undecidable: %s", clause.id, exc)
    return clause


def classify(profile, params, n_improved=4, psi_tol=1e-9):
    """Evaluate every clause and return a CriteriaReport."""
    if int(n_improved) != n_improved or n_improved < 2:
        raise DomainError("n_improved must be an integer >= 2")
    a = params.a
    u_min, u_max = profile.u_min, profile.u_max
    zero = u_min == 0.0 and u_max == 0.0
    l2 = norm(profile, 1, 2)
    minus_one = params.is_minus_one
    clauses = []

    def a1(c):
        bound = math.sqrt((3 * a + 5) / (a + 3)) * u_min
        c.detail.update(l2_ux=l2, u_min=u_min, bound=bound)
        c.satisfied = l2 < bound

    def a2(c):
        q_max = -2.0 / (a + 1)
        qs = q_max * np.geomspace(1e-3, 1 - 1e-3, N_Q)
        members = []
        for q in qs:
            p = 2.0 / (2.0 + (a + 1) * q)
            ok, _ = _lp_member(profile, p)
            members.append(bool(ok))
        hits = [float(q) for q, ok in zip(qs, members) if ok]
        c.detail.update(q_grid=[float(q) for q in qs], members=members,
                        witness=max(hits) if hits else None)
        c.satisfied = bool(hits)

    def b(c):
        bound = -2.0 / ((a + 1) * u_min)
        c.detail.update(u_min=u_min, time_bound=bound)
        c.satisfied = True

    def d(c):
        p = -1.0 / a
        ok, val = _lp_member(profile, p)
        c.detail.update(p=p, norm_uxx=val)
        c.satisfied = bool(ok)

    def e(c):
        rhs = l2 / math.sqrt(1 + a)
        c.detail.update(u_max=u_max, l2_ux=l2, bound=rhs)
        c.satisfied = u_max < rhs

    def g(c):
        root = improved_root(profile, params, n_improved)
        limit = 2.0 / (a + 1)
        c.detail.update(n=int(n_improved), root=root, limit=limit,
                        product=None if root is None else root * u_max)
        c.satisfied = root is not None and root * u_max < limit

    def f(c):
        verdict = psi_sq_integrable(profile, params, tol=psi_tol)
        c.detail.update(finite=verdict.finite, value=verdict.value, rule=verdict.rule,
                        ratios=[float(r) for r in verdict.ratios][-6:],
                        thresholds={"ratio": 0.9, "stall": 0.95, "cap": 1e6, "k_max": 20})
        c.satisfied = bool(verdict.finite)

    table = [
        ("A1", a < -3 and u_min > 0, a1),
        ("A2", a < -3 and not zero, a2),
        ("B", -3 <= a < -1 and not minus_one and u_min > 0, b),
        ("C", minus_one, lambda c: setattr(c, "satisfied", True)),
        ("D", a > -1 and a < 0 and not minus_one and not zero, d),
        ("E", a > -1 and not minus_one and not zero, e),
        ("G", a > -1 and not minus_one and not zero, g),
        ("F", a >= 1 and u_max > 0, f),
    ]
    for cid, applicable, fn in table:
        c = Clause(cid, bool(applicable))
        if applicable:
            _guarded(c, fn)
        clauses.append(c)

    satisfied = [c for c in clauses if c.satisfied]
    consistent = not (any(c.kind == "global" for c in satisfied) and any(c.kind == "singular" for c in satisfied))
    time_bound = note = None
    if satisfied:
        first = satisfied[0]
        label = "GlobalByTheorem" if first.kind == "global" else "SingularByTheorem"
        verdict = f"{label}({first.id})"
        decisive = first.id
        if first.id == "B":
            time_bound = first.detail["time_bound"]
    elif zero:
        verdict, decisive, note = "GlobalByTheorem(C-analogue)", None, "stationary solution"
    else:
        verdict, decisive = "Inconclusive", None
    return CriteriaReport(a, clauses, verdict, consistent, time_bound, decisive, note)
