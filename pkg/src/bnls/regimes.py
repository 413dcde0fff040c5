"""Exponent algebra and well-/ill-posedness classification.

Everything here is exact arithmetic on rationals.  Float inputs are snapped
to the nearest small-denominator rational when that rational is within
1e-12 (so 1/3 entered as a float is treated as 1/3); otherwise the float's
exact binary value is used.  This keeps the classifier's truth table exact
at boundary cases such as gamma equal to the critical exponent or nu equal
to the mass-subcritical endpoint 1 + 8/d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

Rat = Union[int, float, Fraction]

#: Snap tolerance for float inputs and the denominator cap of the snap.
FLOAT_SNAP_TOL = 1e-12
_SNAP_DENOMINATOR = 10**9

INF = math.inf

# Verdicts ------------------------------------------------------------------

LOCAL_SUBCRITICAL = "local-WP-subcritical"
LOCAL_CRITICAL = "local-WP-critical"
LOCAL_HALF_D = "local-WP-H(d/2)"
LOCAL_ABOVE_HALF_D = "local-WP-above-d/2"
GLOBAL = "global-WP"
GLOBAL_CONDITIONAL = "global-WP-conditional"
REGULARITY = "regularity-persists"
ILL_DISCONTINUOUS = "ill-posed-discontinuous"
ILL_NOT_UNIFORMLY_CONTINUOUS = "ill-posed-not-uniformly-continuous"
UNCOVERED = "uncovered"

VERDICTS = (
    LOCAL_SUBCRITICAL, LOCAL_CRITICAL, LOCAL_HALF_D, LOCAL_ABOVE_HALF_D,
    GLOBAL, GLOBAL_CONDITIONAL, REGULARITY,
    ILL_DISCONTINUOUS, ILL_NOT_UNIFORMLY_CONTINUOUS, UNCOVERED,
)


def as_rational(x: Rat) -> Fraction:
    """Exact rational for ints/Fractions; snapped rational for floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if not math.isfinite(x):
        raise ValueError(f"expected a finite number, got {x}")
    exact = Fraction(x)
    snapped = exact.limit_denominator(_SNAP_DENOMINATOR)
    if abs(snapped - exact) <= FLOAT_SNAP_TOL:
        return snapped
    return exact


def _inv(x: Rat) -> Fraction:
    """1/x with x = inf allowed (symbolic endpoint of [2, inf])."""
    if x == INF:
        return Fraction(0)
    return 1 / as_rational(x)


def critical_exponent(d: int, nu: Rat) -> Fraction:
    """Scaling-critical Sobolev exponent d/2 - 4/(nu - 1)."""
    nu = as_rational(nu)
    if nu <= 1:
        raise ValueError("nu must exceed 1")
    return Fraction(d, 2) - 4 / (nu - 1)


def gamma_pq(d: int, p: Rat, q: Rat) -> Fraction:
    """Mixed-norm scaling weight d/2 - d/q - 4/p (p, q may be inf)."""
    return Fraction(d, 2) - d * _inv(q) - 4 * _inv(p)


def is_admissible(d: int, p: Rat, q: Rat, *, strict: bool = False) -> bool:
    """Admissibility of a time-space pair.

    The defining condition is the inequality 2/p + d/q <= d/2 together with
    p, q in [2, inf] and the excluded endpoint (p, q, d) = (2, inf, 2).
    ``strict=True`` switches to the sharp variant 2/p + d/q = d/2 used by
    the classical Schroedinger-admissible family.
    """
    ip, iq = _inv(p), _inv(q)
    if not (0 <= ip <= Fraction(1, 2) and 0 <= iq <= Fraction(1, 2)):
        return False
    if d == 2 and p == 2 and q == INF:
        return False
    lhs = 2 * ip + d * iq
    if strict:
        return lhs == Fraction(d, 2)
    return lhs <= Fraction(d, 2)


def conjugate(p: Rat) -> Rat:
    """Holder conjugate p' with 1/p + 1/p' = 1 (conjugate of 1 is inf)."""
    ip = _inv(p)
    if ip == 1:
        return INF
    ipp = 1 - ip
    if ipp == 0:
        return INF
    return 1 / ipp


def strichartz_scaling_check(d: int, p: Rat, q: Rat, a: Rat, b: Rat) -> bool:
    """Whether gamma_{p,q} = gamma_{a',b'} + 4 for two admissible pairs."""
    if not (is_admissible(d, p, q) and is_admissible(d, a, b)):
        return False
    return gamma_pq(d, p, q) == gamma_pq(d, conjugate(a), conjugate(b)) + 4


def smoothness_condition(nu: Rat, gamma: Rat, beta: Rat | None = None) -> bool:
    """Regularity demanded of |z|^(nu-1) z for fractional-order estimates.

    Vacuous when nu is an odd integer; otherwise the ceiling of the working
    exponent (gamma, and beta when given) must not exceed nu.
    """
    nu = as_rational(nu)
    if nu.denominator == 1 and nu.numerator % 2 == 1:
        return True
    exps = [as_rational(gamma)]
    if beta is not None:
        exps.append(as_rational(beta))
    return all(math.ceil(e) <= nu for e in exps)


def illposedness_smoothness(d: int, nu: Rat) -> bool:
    """Nonlinearity hypothesis of the ill-posedness statement.

    Vacuous for odd-integer nu; otherwise nu >= k + 1 must hold for some
    integer k > d/2, i.e. nu >= floor(d/2) + 2.
    """
    nu = as_rational(nu)
    if nu.denominator == 1 and nu.numerator % 2 == 1:
        return True
    return nu >= d // 2 + 2


# Queries and reports --------------------------------------------------------

@dataclass(frozen=True)
class RegimeQuery:
    """One classification request.

    ``beta`` (when given, must exceed gamma) asks whether H^beta regularity
    persists along the H^gamma flow.  The small-data flags assert smallness
    of the initial data in L^2, in H^2, and in the homogeneous critical
    space respectively.
    """

    d: int
    nu: Rat
    gamma: Rat
    mu: int = 1
    beta: Rat | None = None
    small_l2: bool = False
    small_h2: bool = False
    small_critical: bool = False

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("d must be a positive integer")
        if as_rational(self.nu) <= 1:
            raise ValueError("nu must exceed 1")
        if self.mu not in (1, -1):
            raise ValueError("mu must be +1 or -1")
        if self.beta is not None and as_rational(self.beta) <= as_rational(self.gamma):
            raise ValueError("beta must exceed gamma")


@dataclass(frozen=True)
class ExponentReport:
    """Derived exponents for a query (exact rationals)."""

    d: int
    nu: Fraction
    gamma: Fraction
    gamma_c: Fraction
    theta: Fraction
    smoothness_ok: bool
    applicable: bool
    reason: str = ""
    p: Fraction | None = None
    q: Fraction | None = None
    m: Fraction | None = None
    n: Fraction | None = None
    gamma_pq_check: Fraction | None = None
    admissible_ok: bool | None = None

    def as_dict(self) -> dict:
        def conv(v):
            if isinstance(v, Fraction):
                return float(v)
            return v
        return {
            "d": self.d, "nu": conv(self.nu), "gamma": conv(self.gamma),
            "gamma_c": conv(self.gamma_c), "theta": conv(self.theta),
            "p": conv(self.p), "q": conv(self.q),
            "m": conv(self.m), "n": conv(self.n),
            "gamma_pq_check": conv(self.gamma_pq_check),
            "smoothness_ok": self.smoothness_ok,
            "admissible_ok": self.admissible_ok,
            "applicable": self.applicable,
            "reason": self.reason,
        }


def working_exponents(query: RegimeQuery) -> ExponentReport:
    """Exponent bookkeeping of the local theory below d/2.

    Valid on the window 0 <= gamma < d/2 with gamma >= Gamma_c; outside it
    the report is returned flagged inapplicable.  gamma = d/2 makes the
    defining formulas degenerate and is rejected outright.
    """
    d = query.d
    nu = as_rational(query.nu)
    gamma = as_rational(query.gamma)
    gc = critical_exponent(d, nu)
    theta = 1 - (nu - 1) * (d - 2 * gamma) / 8
    smooth = smoothness_condition(nu, gamma)

    if gamma == Fraction(d, 2):
        raise ValueError("gamma = d/2 is degenerate for this pathway")
    base = dict(d=d, nu=nu, gamma=gamma, gamma_c=gc, theta=theta,
                smoothness_ok=smooth)
    if gamma < 0 or gamma > Fraction(d, 2):
        return ExponentReport(applicable=False,
                              reason="gamma outside [0, d/2)", **base)
    if gamma < gc:
        return ExponentReport(applicable=False,
                              reason="gamma below the critical exponent", **base)

    p = Fraction(8 * (nu + 1), 1) / ((nu - 1) * (d - 2 * gamma))
    q = Fraction(d, 1) * (nu + 1) / (d + (nu - 1) * gamma)
    # 1/p' = 1/m + (nu-1)/p  and the Sobolev-embedding exponent n.
    inv_m = 1 - nu / p
    m = 1 / inv_m if inv_m != 0 else None
    n = d * q / (d - gamma * q)
    check = gamma_pq(d, p, q)
    if check != 0:
        raise AssertionError("gamma_pq of the generated pair must vanish")
    if q > n:
        raise AssertionError("Sobolev embedding requires q <= n")
    return ExponentReport(
        applicable=True, p=p, q=q, m=m, n=n, gamma_pq_check=check,
        admissible_ok=is_admissible(d, p, q), **base,
    )


@dataclass(frozen=True)
class RegimeVerdict:
    """Classification outcome: exactly one verdict, with the hypotheses
    that fired and the derived exponents."""

    verdict: str
    statement: str
    conditions: tuple[str, ...]
    exponents: ExponentReport

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "theorem_tag": self.statement,
            "conditions": list(self.conditions),
            "exponents": self.exponents.as_dict(),
        }


def _fmt(x: Fraction) -> str:
    return str(x) if x.denominator != 1 else str(x.numerator)


def classify(query: RegimeQuery) -> RegimeVerdict:
    """Deterministic regime verdict for (d, nu, gamma, mu, flags).

    The decision order is: ill-posedness range, regularity-persistence
    queries (when beta is given), global statements, local statements,
    otherwise ``uncovered``.  All covered ranges are mutually exclusive by
    the gamma >= Gamma_c / gamma < Gamma_c split, so the order only
    resolves which refinement is reported first.
    """
    d = query.d
    nu = as_rational(query.nu)
    gamma = as_rational(query.gamma)
    gc = critical_exponent(d, nu)
    half_d = Fraction(d, 2)
    report = working_exponents(query) if gamma != half_d else ExponentReport(
        d=d, nu=nu, gamma=gamma, gamma_c=gc,
        theta=1 - (nu - 1) * (d - 2 * gamma) / 8,
        smoothness_ok=smoothness_condition(nu, gamma),
        applicable=False, reason="gamma = d/2 pathway",
    )
    conds: list[str] = []

    # Ill-posedness window: ((-inf,-d/2] inter (-inf,Gamma_c)) union [0,Gamma_c).
    in_low = gamma <= -half_d and gamma < gc
    in_high = 0 <= gamma < gc
    if (in_low or in_high) and illposedness_smoothness(d, nu):
        conds.append("gamma < Gamma_c = " + _fmt(gc))
        conds.append("gamma <= -d/2" if in_low else "0 <= gamma")
        conds.append("nonlinearity smooth enough (odd nu or nu >= k+1, k > d/2)")
        if gamma == 0:
            conds.append("Gamma_c > 0, uniform discontinuity on L^2")
            return RegimeVerdict(ILL_NOT_UNIFORMLY_CONTINUOUS,
                                 "illposed-supercritical", tuple(conds), report)
        return RegimeVerdict(ILL_DISCONTINUOUS,
                             "illposed-supercritical", tuple(conds), report)

    # Regularity persistence is its own query type.
    if query.beta is not None:
        beta = as_rational(query.beta)
        if gamma >= 0 and gamma > gc and smoothness_condition(nu, gamma, beta):
            conds += [
                f"beta = {_fmt(beta)} > gamma >= 0",
                "gamma > Gamma_c = " + _fmt(gc),
                "smoothness holds for beta",
            ]
            return RegimeVerdict(REGULARITY, "regularity-persistence",
                                 tuple(conds), report)
        return RegimeVerdict(
            UNCOVERED, "none",
            ("regularity persistence needs beta > gamma >= 0, gamma > Gamma_c "
             "and the smoothness condition",),
            report,
        )

    smooth = smoothness_condition(nu, gamma)
    if gamma >= 0 and smooth:
        # Global statements first (they refine the local ones).
        if nu < 1 + Fraction(8, d):
            conds += [f"nu = {_fmt(nu)} in (1, 1 + 8/d)", "gamma >= 0"]
            tag = "global-mass-subcritical"
            return RegimeVerdict(GLOBAL, tag, tuple(conds), report)
        if gamma >= 2:
            energy_window = d <= 4 or nu < 1 + Fraction(8, d - 4)
            if energy_window:
                tag = "global-energy" if gamma == 2 else "global-above-energy"
                if query.mu == 1:
                    conds += ["mu = +1 (defocusing)", "gamma >= 2",
                              "nu inside the energy-space window"]
                    return RegimeVerdict(GLOBAL, tag, tuple(conds), report)
                if nu == 1 + Fraction(8, d) and query.small_l2:
                    conds += ["mu = -1, nu = 1 + 8/d, small L^2 data",
                              "gamma >= 2"]
                    return RegimeVerdict(GLOBAL_CONDITIONAL, tag,
                                         tuple(conds), report)
                if query.small_h2:
                    conds += ["mu = -1, small H^2 data", "gamma >= 2"]
                    return RegimeVerdict(GLOBAL_CONDITIONAL, tag,
                                         tuple(conds), report)
        if gamma == gc and query.small_critical:
            conds += ["gamma = Gamma_c", "small critical-norm data",
                      "global existence and scattering"]
            return RegimeVerdict(GLOBAL_CONDITIONAL,
                                 "small-data-critical-scattering",
                                 tuple(conds), report)
        # Local statements.
        if gamma < half_d and gamma >= gc:
            if gamma == gc:
                conds += ["gamma = Gamma_c", "0 <= gamma < d/2"]
                return RegimeVerdict(LOCAL_CRITICAL, "lwp-below-half-d",
                                     tuple(conds), report)
            conds += ["Gamma_c < gamma < d/2", "gamma >= 0"]
            return RegimeVerdict(LOCAL_SUBCRITICAL, "lwp-below-half-d",
                                 tuple(conds), report)
        if gamma == half_d:
            conds += ["gamma = d/2",
                      "some p > max(nu-1, 4) (d = 1) or > max(nu-1, 2) (d >= 2)"]
            return RegimeVerdict(LOCAL_HALF_D, "lwp-at-half-d",
                                 tuple(conds), report)
        if gamma > half_d:
            conds += ["gamma > d/2"]
            return RegimeVerdict(LOCAL_ABOVE_HALF_D, "lwp-above-half-d",
                                 tuple(conds), report)

    return RegimeVerdict(UNCOVERED, "none",
                         ("no statement covers this query",), report)


def classify_many(queries: Iterable[RegimeQuery]) -> list[RegimeVerdict]:
    return [classify(q) for q in queries]


__all__ = [
    "FLOAT_SNAP_TOL", "INF", "VERDICTS",
    "LOCAL_SUBCRITICAL", "LOCAL_CRITICAL", "LOCAL_HALF_D",
    "LOCAL_ABOVE_HALF_D", "GLOBAL", "GLOBAL_CONDITIONAL", "REGULARITY",
    "ILL_DISCONTINUOUS", "ILL_NOT_UNIFORMLY_CONTINUOUS", "UNCOVERED",
    "as_rational", "critical_exponent", "gamma_pq", "is_admissible",
    "conjugate", "strichartz_scaling_check", "smoothness_condition",
    "illposedness_smoothness", "RegimeQuery", "ExponentReport",
    "RegimeVerdict", "working_exponents", "classify", "classify_many",
]
