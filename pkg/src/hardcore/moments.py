"""First- and second-moment exponent functions for the hardcore model on
random bipartite graphs, and the scalar machinery behind the second-moment
maximization check.

Notation (all densities; d is the degree bound, lam the fugacity):

  H1(x, y)  = y log y - x log x - (y-x) log(y-x)        (0 <= x <= y)
  H(x)      = H1(x, 1)                                   binary entropy
  Phi1      = first-moment exponent over pair densities (alpha, beta)
  f         = second-moment exponent over (alpha, beta, gamma, delta, eps)
  ehat      = the eps value maximizing f for fixed (alpha, beta, gamma, delta)
  ghat      = f evaluated at eps = ehat
  f1 + f2   = separable upper envelope of f (their sum dominates f - the
              fugacity term, since the difference is the log of a probability)
  tau       = limiting second-moment to squared-first-moment ratio
  h1        = the (delta, delta) entry of the reduced 2x2 Hessian of ghat
  Psi       = certified upper bound for the (gamma, gamma) entry, with the
              two terms that blow up at gamma -> {0, alpha} replaced by
              -1/max(1/10000, .) clamps
  Phi_cert  = Psi * h1-entry - (mixed entry)^2, a lower-bound surrogate for
              det D^2 ghat wherever h1 < 0 and the clamps are valid

The maximization property being certified elsewhere: for (alpha, beta) near
(p-, p+), ghat attains its unique maximum over 0 <= gamma <= alpha,
0 <= delta <= beta at the product-overlap point (alpha^2, beta^2), whose eps
coordinate is alpha (1 - alpha - beta).

All functions here work in double precision.  The rigorous certification
re-implements the same expressions over intervals in a separate module with
no shared floating-point code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError
from .treegibbs import ModelParams

log = math.log
sqrt = math.sqrt

SINGULARITY_CLAMP = 1.0 / 10000.0


class OccupancyPair(NamedTuple):
    """A pair of per-side occupation densities (alpha, beta)."""

    alpha: float
    beta: float

    def in_region(self) -> bool:
        return self.alpha >= 0 and self.beta >= 0 and self.alpha + self.beta <= 1

    def interior(self) -> bool:
        return self.alpha > 0 and self.beta > 0 and self.alpha + self.beta < 1


class OverlapPoint(NamedTuple):
    """Overlap densities (gamma, delta, epsilon) of a pair of configurations."""

    gamma: float
    delta: float
    epsilon: float

    def feasible(self, pt: OccupancyPair) -> bool:
        a, b = pt
        g, dd, e = self
        return (min(g, dd, e) >= 0 and a - g - e >= 0 and b - dd >= 0
                and 1 - 2 * b + dd - g - e >= 0)


def star_overlap(pt: OccupancyPair) -> OverlapPoint:
    """The product-overlap point (alpha^2, beta^2, alpha(1-alpha-beta))."""
    a, b = pt
    return OverlapPoint(a * a, b * b, a * (1 - a - b))


def entropy_h1(x: float, y: float) -> float:
    """H1(x, y) with the 0 log 0 := 0 convention on the boundary."""
    if x < 0 or x > y:
        raise DomainError(f"entropy_h1 requires 0 <= x <= y, got x={x}, y={y}")
    total = 0.0
    if y > 0:
        total += y * log(y)
    if x > 0:
        total -= x * log(x)
    if y - x > 0:
        total -= (y - x) * log(y - x)
    return total


def binary_entropy(x: float) -> float:
    return entropy_h1(x, 1.0)


def phi1(pt: OccupancyPair, params: ModelParams) -> float:
    """First-moment exponent Phi1(alpha, beta)."""
    if not pt.in_region():
        raise DomainError(f"{pt} outside the admissible triangle")
    a, b = pt
    d, lam = params.d, params.lam
    total = (a + b) * log(lam)
    if a > 0:
        total -= a * log(a)
    if b > 0:
        total -= b * log(b)
    if 1 - a - b > 0:
        total -= d * (1 - a - b) * log(1 - a - b)
    if 1 - a > 0:
        total += (d - 1) * (1 - a) * log(1 - a)
    if 1 - b > 0:
        total += (d - 1) * (1 - b) * log(1 - b)
    return total


def second_moment_f(pt: OccupancyPair, ov: OverlapPoint, params: ModelParams) -> float:
    """Second-moment exponent f(alpha, beta, gamma, delta, epsilon)."""
    if not pt.in_region():
        raise DomainError(f"{pt} outside the admissible triangle")
    if not ov.feasible(pt):
        raise DomainError(f"{ov} infeasible for {pt}")
    a, b = pt
    g, dd, e = ov
    d, lam = params.d, params.lam
    return (2 * (a + b) * log(lam)
            + binary_entropy(a) + entropy_h1(g, a) + entropy_h1(a - g, 1 - a)
            + binary_entropy(b) + entropy_h1(dd, b) + entropy_h1(b - dd, 1 - b)
            + d * (entropy_h1(g, 1 - 2 * b + dd)
                   - binary_entropy(g)
                   + entropy_h1(e, 1 - 2 * b + dd - g)
                   + entropy_h1(a - g - e, b - dd)
                   - entropy_h1(a - g, 1 - g)
                   + entropy_h1(a - g, 1 - b - g - e)
                   - entropy_h1(a - g, 1 - a)))


def epsilon_hat(pt: OccupancyPair, gamma: float, delta: float) -> float:
    """The epsilon maximizing f for fixed (alpha, beta, gamma, delta)."""
    a, b = pt
    rad = (1 - a - b) ** 2 + 4 * (a - gamma) * (b - delta)
    if rad < 0:
        raise DomainError(f"negative radicand {rad} in epsilon_hat")
    return 0.5 * (1 + a - b - 2 * gamma - sqrt(rad))


def ghat(pt: OccupancyPair, gamma: float, delta: float, params: ModelParams) -> float:
    """f evaluated at the maximizing epsilon."""
    e = epsilon_hat(pt, gamma, delta)
    # Tiny negative values of ehat (order machine eps, at gamma ~ alpha) are
    # clipped so the overlap stays feasible.
    if -1e-12 < e < 0.0:
        e = 0.0
    return second_moment_f(pt, OverlapPoint(gamma, delta, e), params)


def fstar_split(pt: OccupancyPair, gamma: float, delta: float) -> tuple:
    """The separable summands f1(alpha, gamma), f2(beta, delta)."""
    a, b = pt
    if not (0 <= gamma <= a and 0 <= delta <= b):
        raise DomainError("fstar_split requires 0 <= gamma <= alpha, 0 <= delta <= beta")
    f1 = binary_entropy(a) + entropy_h1(gamma, a) + entropy_h1(a - gamma, 1 - a)
    f2 = binary_entropy(b) + entropy_h1(delta, b) + entropy_h1(b - delta, 1 - b)
    return f1, f2


def tau(pt: OccupancyPair, d: int) -> float:
    """Limiting ratio of the second moment to the squared first moment.

    The numerator is (1 - alpha - beta + alpha beta)^d; a minus sign on the
    alpha beta term would put the ratio below 1, impossible for
    E Z^2 / (E Z)^2.  The exact finite-n moment formulas in the measure
    module converge to this expression (a test pins the limit).
    """
    a, b = pt
    s = 1 - a - b
    factors = {
        "1-a-b+ab": s + a * b,
        "1-a-b+2ab": s + 2 * a * b,
        "1-a-b": s,
        "1-a-b+dab": s + d * a * b,
        "1-a-b-(d-2)ab": s - (d - 2) * a * b,
    }
    bad = [k for k, v in factors.items() if v <= 0]
    if bad:
        raise DomainError(f"nonpositive tau factors at {pt}: {bad}")
    num = factors["1-a-b+ab"] ** d
    den = ((factors["1-a-b+2ab"] * factors["1-a-b"]) ** ((d - 1) / 2)
           * (factors["1-a-b+dab"] * factors["1-a-b-(d-2)ab"]) ** 0.5)
    return num / den


@dataclass(frozen=True)
class SecondPartials:
    """Analytic second partials of f, plus the ehat gradient.

    f_gg, f_ge, f_dd, f_de, f_gd are the entries needed for the reduced
    Hessian of ghat; f_de == f_gd identically.  ehat_dgamma / ehat_ddelta are
    the partials of the maximizing epsilon.
    """

    f_gg: float
    f_ge: float
    f_dd: float
    f_de: float
    f_gd: float
    ehat_dgamma: float
    ehat_ddelta: float


def partials_f(pt: OccupancyPair, ov: OverlapPoint, d: int) -> SecondPartials:
    """Second partials of f at an interior point, for general degree bound d.

    The coefficients follow from differentiating the H1 terms of f twice:
    a term H1(x(v), y(v)) contributes -1/x - 1/(y-x), 1/(y-x), and
    1/y - 1/(y-x) through x-, mixed and y-derivatives respectively (chain
    rule signs included below).  The d = 6 specialization carries the
    coefficients (6, 5, 4).
    """
    a, b = pt
    g, dd, e = ov
    A = 1 - 2 * b + dd - g - e
    B = a - g - e
    C = 1 - 2 * a + g
    D = b - dd - (a - g - e)
    E = 1 - b - g - e
    S = 1 - 2 * b + dd
    for name, v in (("1-2b+d-g-e", A), ("a-g-e", B), ("1-2a+g", C),
                    ("b-d-(a-g-e)", D), ("1-b-g-e", E), ("1-2b+d", S),
                    ("a-g", a - g), ("gamma", g), ("b-d", b - dd), ("delta", dd)):
        if v <= 0:
            raise DomainError(f"partials_f requires strict interior; {name} = {v}")
    f_gg = (-d / A - d / B + (d - 1) / C - d / D + d / E
            + (d - 2) / (a - g) - 1 / g)
    f_ge = -d / A - d / B - d / D + d / E
    f_dd = -d / A + (d - 1) / S - d / D + (d - 2) / (b - dd) - 1 / dd
    f_de = d / A + d / D
    rad = (1 - a - b) ** 2 + 4 * (a - g) * (b - dd)
    sq = sqrt(rad)
    return SecondPartials(
        f_gg=f_gg, f_ge=f_ge, f_dd=f_dd, f_de=f_de, f_gd=f_de,
        ehat_dgamma=-1 + (b - dd) / sq,
        ehat_ddelta=(a - g) / sq,
    )


def _h1_pieces(pt: OccupancyPair, gamma: float, delta: float, d: int) -> tuple:
    """(f_dd, f_de, ehat_dgamma, ehat_ddelta) at eps = ehat.

    Unlike partials_f this only validates the factors these entries divide
    by, so it stays defined on the whole gamma range [0, alpha] where h1 and
    Phi_cert are regular.
    """
    a, b = pt
    e = epsilon_hat(pt, gamma, delta)
    A = 1 - 2 * b + delta - gamma - e
    D = b - delta - (a - gamma - e)
    S = 1 - 2 * b + delta
    for name, v in (("1-2b+d-g-ehat", A), ("b-d-(a-g-ehat)", D), ("1-2b+d", S),
                    ("b-d", b - delta), ("delta", delta)):
        if v <= 0:
            raise DomainError(f"h1 outside region; {name} = {v}")
    f_dd = -d / A + (d - 1) / S - d / D + (d - 2) / (b - delta) - 1 / delta
    f_de = d / A + d / D
    rad = (1 - a - b) ** 2 + 4 * (a - gamma) * (b - delta)
    sq = sqrt(rad)
    return f_dd, f_de, -1 + (b - delta) / sq, (a - gamma) / sq


def h1_bound(pt: OccupancyPair, gamma: float, delta: float, d: int) -> float:
    """The (delta, delta) entry of the reduced Hessian, at eps = ehat."""
    f_dd, f_de, _, ed = _h1_pieces(pt, gamma, delta, d)
    return f_dd + ed * f_de


def hessian_det_ghat(pt: OccupancyPair, gamma: float, delta: float, d: int) -> float:
    """det D^2 ghat via the chain-rule composition with the ehat gradient."""
    e = epsilon_hat(pt, gamma, delta)
    p = partials_f(pt, OverlapPoint(gamma, delta, e), d)
    first = p.f_gg + p.ehat_dgamma * p.f_ge
    second = p.f_dd + p.ehat_ddelta * p.f_de
    mixed = p.f_gd + p.ehat_dgamma * p.f_de
    return first * second - mixed ** 2


def psi_upper(pt: OccupancyPair, gamma: float, delta: float, d: int) -> float:
    """Certified upper bound for the (gamma, gamma) reduced-Hessian entry.

    The exact entry contains -d/(alpha-gamma-ehat) and the -1/gamma,
    (d-2)/(alpha-gamma) pair, all singular at the gamma boundary.  The
    combination (d-2)/(alpha-gamma) - [terms through ehat] is dominated by
    -1/(alpha-gamma) near (p-, p+) (this uses 4 alpha beta/(1-alpha-beta)^2
    <= 0.19 and (1 + 2y/5)^2 <= 1 + y, valid for d = 6), and the two
    reciprocals are clamped at 1/10000, which keeps Psi finite on the closed
    region.
    """
    a, b = pt
    e = epsilon_hat(pt, gamma, delta)
    A = 1 - 2 * b + delta - gamma - e
    C = 1 - 2 * a + gamma
    D = b - delta - (a - gamma - e)
    E = 1 - b - gamma - e
    for name, v in (("1-2b+d-g-ehat", A), ("1-2a+g", C), ("b-d-(a-g-ehat)", D),
                    ("1-b-g-ehat", E)):
        if v <= 0:
            raise DomainError(f"psi_upper outside region; {name} = {v}")
    rad = (1 - a - b) ** 2 + 4 * (a - gamma) * (b - delta)
    eg = -1 + (b - delta) / sqrt(rad)
    return (-d / A + (d - 1) / C - d / D + d / E
            - 1 / max(SINGULARITY_CLAMP, a - gamma)
            - 1 / max(SINGULARITY_CLAMP, gamma)
            + eg * (-d / A - d / D + d / E))


def phi_cert(pt: OccupancyPair, gamma: float, delta: float, d: int) -> float:
    """Psi times the h1 entry minus the squared mixed entry.

    Lower-bounds det D^2 ghat wherever h1 < 0 and the Psi clamps are
    inactive, since there Psi >= the true (gamma, gamma) entry.
    """
    f_dd, f_de, eg, ed = _h1_pieces(pt, gamma, delta, d)
    h1 = f_dd + ed * f_de
    mixed = f_de + eg * f_de
    return psi_upper(pt, gamma, delta, d) * h1 - mixed ** 2
