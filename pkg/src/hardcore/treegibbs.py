"""Fixed points of the hardcore tree recursions.

For degree bound d and fugacity lam the model on the infinite (d-1)-ary tree
has root densities q+ >= q- obtained as the two-cycle of the recursion

    q  ->  lam (1-q)^(d-1) / (1 + lam (1-q)^(d-1)),

started from a fully occupied boundary.  Above the critical fugacity

    lambda_c(d) = (d-1)^(d-1) / (d-2)^d

the cycle is genuine (q+ > q-); at or below it the iteration collapses to the
unique symmetric root density.  The d-regular-tree densities p+, p- follow
from q+- via q = p / (1 - p') for the opposite-parity density p', and the
symmetric density p* is the fixed point of the map

    h(x) = (1-x) [1 - (x / (lam (1-x)))^(1/d)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError

ITERATION_CAP = 10 ** 6


@dataclass(frozen=True)
class ModelParams:
    """Degree bound d (>= 3) and fugacity lam (> 0)."""

    d: int
    lam: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 3:
            raise DomainError(f"degree bound must be an integer >= 3, got {self.d}")
        if not self.lam > 0:
            raise DomainError(f"fugacity must be positive, got {self.lam}")


@dataclass(frozen=True)
class TreeFixedPoints:
    """All tree-measure densities for one (d, lam)."""

    p_plus: float
    p_minus: float
    p_star: float
    q_plus: float
    q_minus: float
    lambda_c: float


def critical_fugacity(d: int) -> Fraction:
    """Critical fugacity (d-1)^(d-1) / (d-2)^d as an exact rational."""
    if int(d) != d or d < 3:
        raise DomainError(f"degree bound must be an integer >= 3, got {d}")
    d = int(d)
    return Fraction((d - 1) ** (d - 1), (d - 2) ** d)


def h_map(x: float, params: ModelParams) -> float:
    """The d-regular fixed-point map h(x) = (1-x)[1 - (x/(lam(1-x)))^(1/d)]."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"h_map argument must lie in (0,1), got {x}")
    return (1.0 - x) * (1.0 - (x / (params.lam * (1.0 - x))) ** (1.0 / params.d))


def h_map_mp(x, params: ModelParams, dps: int = 50):
    """Arbitrary-precision evaluation of h_map (cross-check path)."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        if not 0 < x < 1:
            raise DomainError(f"h_map argument must lie in (0,1), got {x}")
        lam = mpmath.mpf(params.lam)
        return (1 - x) * (1 - (x / (lam * (1 - x))) ** (mpmath.mpf(1) / params.d))


def q_step(q: float, params: ModelParams) -> float:
    """One level of the (d-1)-ary root-density recursion."""
    u = params.lam * (1.0 - q) ** (params.d - 1)
    return u / (1.0 + u)


def _two_step(q: float, params: ModelParams) -> float:
    return q_step(q_step(q, params), params)


def _two_step_derivative(q: float, params: ModelParams) -> float:
    d, lam = params.d, params.lam

    def fprime(x):
        u = lam * (1.0 - x) ** (d - 1)
        return -lam * (d - 1) * (1.0 - x) ** (d - 2) / (1.0 + u) ** 2

    return fprime(q_step(q, params)) * fprime(q)


def solve_fixed_points(params: ModelParams, tol: float = 1e-12,
                       damping: float = 1.0) -> TreeFixedPoints:
    """Solve for all tree densities by alternating iteration from q = 1.

    The even iterates of the one-level recursion converge to q+ and the odd
    ones to q-; iteration stops when the two-step residual |T(q) - q| drops
    below tol (T = two levels of the recursion), after which a few Newton
    steps polish the root to machine precision.  `damping` blends q with T(q)
    and is only useful very close to criticality where T' approaches 1.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if not 0 < damping <= 1:
        raise DomainError(f"damping must lie in (0,1], got {damping}")

    q = 1.0
    residual = math.inf
    for _ in range(ITERATION_CAP):
        nxt = _two_step(q, params)
        residual = abs(nxt - q)
        q = q + damping * (nxt - q)
        if residual < tol:
            break
    else:
        raise ConvergenceError(
            f"alternating iteration did not reach tol={tol} within "
            f"{ITERATION_CAP} two-level steps", residual=residual)

    # Newton polish on T(q) - q; the derivative stays below 1 in magnitude
    # away from criticality so this converges quadratically.
    for _ in range(50):
        g = _two_step(q, params) - q
        gp = _two_step_derivative(q, params) - 1.0
        if gp == 0.0:
            break
        step = g / gp
        q -= step
        if abs(step) < 1e-16:
            break

    q_plus = q
    q_minus = q_step(q_plus, params)
    if q_minus > q_plus:
        q_plus, q_minus = q_minus, q_plus

    denom = 1.0 - q_plus * q_minus
    p_plus = q_plus * (1.0 - q_minus) / denom
    p_minus = q_minus * (1.0 - q_plus) / denom

    p_star = _solve_p_star(params)
    return TreeFixedPoints(
        p_plus=p_plus, p_minus=p_minus, p_star=p_star,
        q_plus=q_plus, q_minus=q_minus,
        lambda_c=float(critical_fugacity(params.d)),
    )


def _solve_p_star(params: ModelParams) -> float:
    # h(x) - x is positive near 0 and negative near 1; the symmetric root is
    # unique in (0,1).
    f = lambda x: h_map(x, params) - x
    return brentq(f, 1e-12, 1.0 - 1e-12, xtol=1e-15, rtol=8.9e-16)


@dataclass(frozen=True)
class ExtraConditionsReport:
    """Truth values and margins for q+ q- (d-1) < 1 and q+ < 3/5."""

    product_condition: bool
    product_value: float
    product_margin: float
    qplus_condition: bool
    qplus_value: float
    qplus_margin: float

    @property
    def all_hold(self) -> bool:
        return self.product_condition and self.qplus_condition


def check_extra_conditions(fp: TreeFixedPoints, d: int) -> ExtraConditionsReport:
    """Evaluate the two side conditions used alongside the second-moment work."""
    prod = fp.q_plus * fp.q_minus * (d - 1)
    return ExtraConditionsReport(
        product_condition=prod < 1.0,
        product_value=prod,
        product_margin=1.0 - prod,
        qplus_condition=fp.q_plus < 0.6,
        qplus_value=fp.q_plus,
        qplus_margin=0.6 - fp.q_plus,
    )


def fixed_point_residuals(fp: TreeFixedPoints, params: ModelParams) -> dict:
    """Residuals of the defining identities at the solved point."""
    lam, d = params.lam, params.d
    return {
        "h(p+) - p-": h_map(fp.p_plus, params) - fp.p_minus,
        "h(p-) - p+": h_map(fp.p_minus, params) - fp.p_plus,
        "h(p*) - p*": h_map(fp.p_star, params) - fp.p_star,
        "q+ relation": fp.q_plus / (1 - fp.q_plus) - lam * (1 - fp.q_minus) ** (d - 1),
        "q- relation": fp.q_minus / (1 - fp.q_minus) - lam * (1 - fp.q_plus) ** (d - 1),
        "q+ = p+/(1-p-)": fp.q_plus - fp.p_plus / (1 - fp.p_minus),
        "q- = p-/(1-p+)": fp.q_minus - fp.p_minus / (1 - fp.p_plus),
    }
