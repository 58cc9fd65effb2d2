"""Rigorous certification that the second-moment exponent is maximized at the
product-overlap point for d = 6 at fugacity 1.

The certified statement (per grid cell, with (alpha, beta) tiny intervals
around (p-, p+)):

    upper bound of h1   < -17      and      lower bound of Phi > 1500

where h1 is the (delta, delta) entry of the reduced Hessian of the
second-moment exponent and Phi = Psi * h1 - (mixed entry)^2 lower-bounds the
Hessian determinant wherever h1 < 0 (Psi is a finite upper bound for the
(gamma, gamma) entry, with the gamma-singular reciprocals clamped at
1/10000).  Every numeric step runs in outward-rounded interval arithmetic, so
cell verdicts are mathematically rigorous up to the platform's IEEE
semantics.

A sound pointwise reading is enforced: every cell must satisfy both bounds,
which is stronger than (and implies) the displayed max-over-grid
inequalities.  Cells whose first-pass enclosure is too loose are bisected
adaptively; a refined bound (max over subcells) is still a rigorous bound
for the cell.

Expressions are evaluated in dependency-reduced groupings that are
algebraically identical to the defining formulas, for example

    h1 = -[(1 - d t)/A + (d-1) u/(A S)] - [(2 - d t)/D + (d-2) B/(D w)] - 1/delta

with w = beta-delta, s = sqrt((1-alpha-beta)^2 + 4(alpha-gamma) w),
u = gamma + ehat = ((1+alpha-beta) - s)/2, B = alpha-gamma-ehat =
(s - (1-alpha-beta))/2, A = (1-2 beta+delta) - u, D = w - B and
t = (alpha-gamma)/s.  Naive term-by-term evaluation is several times wider
and cannot clear the -17 bound at the native 100 x 32 granularity near the
binding corner (gamma -> 0, delta ~ 0.18), where the true supremum of h1 is
about -17.08.  Enclosure tests against the independent double-precision
implementations guard the regrouping algebra.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, IntervalDomainError
from .interval import Interval, interval_union
from .treegibbs import ModelParams, TreeFixedPoints, solve_fixed_points

H1_BOUND = -17.0
PHI_BOUND = 1500.0
_CLAMP = Interval.from_fraction(Fraction(1, 10000)).hi  # upper float of 1/10000


# ---------------------------------------------------------------------------
# Rigorous enclosure of the tree fixed points
# ---------------------------------------------------------------------------

def _iF(q: Interval, lam: Interval, d: int) -> Interval:
    u = lam * (Interval(1.0) - q).power(d - 1)
    return u / (Interval(1.0) + u)


def _iFprime(q: Interval, lam: Interval, d: int) -> Interval:
    one_minus = Interval(1.0) - q
    u = lam * one_minus.power(d - 1)
    return -(lam * (d - 1) * one_minus.power(d - 2)) / (Interval(1.0) + u).sqr()


@dataclass(frozen=True)
class FixedPointEnclosure:
    q_plus: Interval
    q_minus: Interval
    p_plus: Interval
    p_minus: Interval
    verified: bool


def enclose_fixed_points(d: int, lam: Fraction, guess_q_plus: float,
                         radius: float = 1e-6) -> FixedPointEnclosure:
    """Interval-Newton enclosure of (q+, q-, p+, p-).

    Runs the Newton operator for g(q) = F(F(q)) - q on a small box around
    the floating guess for q+.  If the operator maps the box strictly into
    itself the root is validated and tightened; otherwise the guess is
    wrapped as a point interval and flagged unverified (the grid sweep will
    then fail honestly on corrupted inputs instead of erroring out).
    """
    ilam = Interval.from_fraction(Fraction(lam))
    X = Interval(guess_q_plus - radius, guess_q_plus + radius)
    verified = False
    for _ in range(6):
        m = Interval(X.mid)
        gm = _iF(_iF(m, ilam, d), ilam, d) - m
        gp = _iFprime(_iF(X, ilam, d), ilam, d) * _iFprime(X, ilam, d) - Interval(1.0)
        try:
            N = m - gm / gp
        except IntervalDomainError:
            break
        if X.lo < N.lo and N.hi < X.hi:
            verified = True
        inter_lo, inter_hi = max(X.lo, N.lo), min(X.hi, N.hi)
        if inter_lo > inter_hi:
            verified = False
            break
        X = Interval(inter_lo, inter_hi)
        if X.width < 5e-16:
            break
    if not verified:
        X = Interval(guess_q_plus)
    q_plus = X
    q_minus = _iF(q_plus, ilam, d)
    denom = Interval(1.0) - q_plus * q_minus
    p_plus = q_plus * (Interval(1.0) - q_minus) / denom
    p_minus = q_minus * (Interval(1.0) - q_plus) / denom
    return FixedPointEnclosure(q_plus, q_minus, p_plus, p_minus, verified)


# ---------------------------------------------------------------------------
# Interval builds of the certified functions (independent of the float path)
# ---------------------------------------------------------------------------

def _cell_geometry(alpha: Interval, beta: Interval, gamma: Interval,
                   delta: Interval, d: int):
    """Shared intermediates: returns (A, D, E, S, w, u, B, t, r, delta)."""
    one = Interval(1.0)
    c = one - alpha - beta
    w = beta - delta
    ag = alpha - gamma
    R = c.sqr() + Interval(4.0) * ag * w
    s = R.sqrt()
    u = ((one + alpha - beta) - s) * Interval(0.5)      # gamma + ehat
    B = (s - c) * Interval(0.5)                          # alpha - gamma - ehat
    S = one - Interval(2.0) * beta + delta
    A = S - u
    D = w - B
    t = ag / s                                           # d ehat / d delta
    r = w / s                                            # 1 + d ehat / d gamma
    for name, v in (("A", A), ("D", D), ("S", S), ("w", w), ("delta", delta)):
        if v.lo <= 0.0:
            raise IntervalDomainError(f"cell leaves the region: {name} = {v}")
    return A, D, S, w, u, B, t, r


def h1_interval(alpha: Interval, beta: Interval, gamma: Interval,
                delta: Interval, d: int) -> Interval:
    A, D, S, w, u, B, t, _ = _cell_geometry(alpha, beta, gamma, delta, d)
    one = Interval(1.0)
    dt = Interval(float(d)) * t
    term_a = (one - dt) / A + Interval(float(d - 1)) * u / (A * S)
    term_d = (Interval(2.0) - dt) / D + Interval(float(d - 2)) * B / (D * w)
    return -term_a - term_d - one / delta


def psi_phi_interval(alpha: Interval, beta: Interval, gamma: Interval,
                     delta: Interval, d: int) -> tuple:
    """(Psi, Phi) on a cell; Phi uses the same h1 enclosure as h1_interval."""
    A, D, S, w, u, B, t, r = _cell_geometry(alpha, beta, gamma, delta, d)
    one = Interval(1.0)
    E = (one - beta) - u
    C = one - Interval(2.0) * alpha + gamma
    for name, v in (("E", E), ("C", C)):
        if v.lo <= 0.0:
            raise IntervalDomainError(f"cell leaves the region: {name} = {v}")
    dd = Interval(float(d))
    psi = (r * (-(dd / A) - dd / D + dd / E)
           + Interval(float(d - 1)) / C
           - one / (alpha - gamma).max_const(_CLAMP)
           - one / gamma.max_const(_CLAMP))
    dt = dd * t
    term_a = (one - dt) / A + Interval(float(d - 1)) * u / (A * S)
    term_d = (Interval(2.0) - dt) / D + Interval(float(d - 2)) * B / (D * w)
    h1 = -term_a - term_d - one / delta
    mixed = r * (dd / A + dd / D)
    phi = psi * h1 - mixed.sqr()
    return psi, phi


def _iH1(x: Interval, y: Interval) -> Interval:
    """Interval H1(x, y) = y log y - x log x - (y-x) log(y-x).

    Exact-zero x (or x == y) uses the 0 log 0 limit; intervals that straddle
    zero are rejected, matching how the certified expressions are invoked.
    """
    total = y * y.log()
    if not (x.lo == 0.0 and x.hi == 0.0):
        total = total - x * x.log()
    yx = y - x
    if not (yx.lo == 0.0 and yx.hi == 0.0):
        if yx.lo <= 0.0:
            raise IntervalDomainError(f"H1 needs y - x > 0, got {yx}")
        total = total - yx * yx.log()
    return total


def _iH(x: Interval) -> Interval:
    return _iH1(x, Interval(1.0))


def f_interval(alpha: Interval, beta: Interval, gamma: Interval, delta: Interval,
               eps: Interval, d: int, log_lam: Interval) -> Interval:
    one = Interval(1.0)
    two = Interval(2.0)
    return (two * (alpha + beta) * log_lam
            + _iH(alpha) + _iH1(gamma, alpha) + _iH1(alpha - gamma, one - alpha)
            + _iH(beta) + _iH1(delta, beta) + _iH1(beta - delta, one - beta)
            + Interval(float(d)) * (
                _iH1(gamma, one - two * beta + delta)
                - _iH(gamma)
                + _iH1(eps, one - two * beta + delta - gamma)
                + _iH1(alpha - gamma - eps, beta - delta)
                - _iH1(alpha - gamma, one - gamma)
                + _iH1(alpha - gamma, one - beta - gamma - eps)
                - _iH1(alpha - gamma, one - alpha)))


def ehat_interval(alpha: Interval, beta: Interval, gamma: Interval,
                  delta: Interval) -> Interval:
    one = Interval(1.0)
    R = (one - alpha - beta).sqr() + Interval(4.0) * (alpha - gamma) * (beta - delta)
    return (one + alpha - beta - Interval(2.0) * gamma - R.sqrt()) * Interval(0.5)


def f1_interval(alpha: Interval, gamma: Interval) -> Interval:
    one = Interval(1.0)
    return _iH(alpha) + _iH1(gamma, alpha) + _iH1(alpha - gamma, one - alpha)


def f2_interval(beta: Interval, delta: Interval) -> Interval:
    one = Interval(1.0)
    return _iH(beta) + _iH1(delta, beta) + _iH1(beta - delta, one - beta)


def _star_hessian(alpha: Interval, beta: Interval, d: int) -> tuple:
    """(first entry, h1 entry, det) of the reduced Hessian at the star point."""
    one = Interval(1.0)
    gamma = alpha.sqr()
    delta = beta.sqr()
    eps = ehat_interval(alpha, beta, gamma, delta)
    A = one - Interval(2.0) * beta + delta - gamma - eps
    B = alpha - gamma - eps
    C = one - Interval(2.0) * alpha + gamma
    D = beta - delta - B
    E = one - beta - gamma - eps
    S = one - Interval(2.0) * beta + delta
    dd = Interval(float(d))
    f_gg = (-(dd / A) - dd / B + Interval(float(d - 1)) / C - dd / D + dd / E
            + Interval(float(d - 2)) / (alpha - gamma) - one / gamma)
    f_ge = -(dd / A) - dd / B - dd / D + dd / E
    f_dd = (-(dd / A) + Interval(float(d - 1)) / S - dd / D
            + Interval(float(d - 2)) / (beta - delta) - one / delta)
    f_de = dd / A + dd / D
    R = (one - alpha - beta).sqr() + Interval(4.0) * (alpha - gamma) * (beta - delta)
    s = R.sqrt()
    eg = (beta - delta) / s - one
    ed = (alpha - gamma) / s
    first = f_gg + eg * f_ge
    h1 = f_dd + ed * f_de
    mixed = f_de + eg * f_de
    det = first * h1 - mixed.sqr()
    return first, h1, det


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class CellResult:
    i: int
    j: int
    h1_upper: float
    phi_lower: float
    depth: int
    passed: bool
    note: str = ""


@dataclass
class CertificationReport:
    verdict: bool
    d: int
    lam: str
    nbhd: float
    grid: tuple
    alpha: Interval
    beta: Interval
    enclosure_verified: bool
    refine_limit: int
    cells: list = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def failing_cells(self):
        return [c for c in self.cells if not c.passed]

    @property
    def max_h1_upper(self):
        return max(self.cells, key=lambda c: c.h1_upper)

    @property
    def min_phi_lower(self):
        return min(self.cells, key=lambda c: c.phi_lower)

    @property
    def refined_cells(self):
        return sum(1 for c in self.cells if c.depth > 0)

    def content_lines(self):
        worst_h1 = self.max_h1_upper
        worst_phi = self.min_phi_lower
        lines = [
            "# hardcore certification report",
            f"verdict: {'PASS' if self.verdict else 'FAIL'}",
            f"d: {self.d}",
            f"lambda: {self.lam}",
            f"nbhd: {self.nbhd!r}",
            f"grid: {self.grid[0]}x{self.grid[1]}",
            f"alpha: [{self.alpha.lo!r}, {self.alpha.hi!r}]",
            f"beta: [{self.beta.lo!r}, {self.beta.hi!r}]",
            f"enclosure_verified: {self.enclosure_verified}",
            f"refine_limit: {self.refine_limit}",
            f"h1_bound: {H1_BOUND}",
            f"phi_bound: {PHI_BOUND}",
            f"max_h1_upper: {worst_h1.h1_upper!r} at ({worst_h1.i}, {worst_h1.j})",
            f"min_phi_lower: {worst_phi.phi_lower!r} at ({worst_phi.i}, {worst_phi.j})",
            f"refined_cells: {self.refined_cells}",
            f"failing_cells: {len(self.failing_cells)}",
            "# cell: i j h1_upper phi_lower depth pass note",
        ]
        for c in self.cells:
            note = c.note.replace(" ", "_") if c.note else "-"
            lines.append(f"cell: {c.i} {c.j} {c.h1_upper!r} {c.phi_lower!r} "
                         f"{c.depth} {int(c.passed)} {note}")
        return lines

    def to_text(self) -> str:
        return "\n".join(self.content_lines()
                         + [f"wall_time_s: {self.wall_time_s:.3f}", ""])

    def content_fingerprint(self) -> str:
        """Hash of everything except wall time (determinism checks)."""
        payload = "\n".join(self.content_lines()).encode()
        return hashlib.sha256(payload).hexdigest()


@dataclass
class InequalityCheck:
    name: str
    value: Interval
    bound: float
    direction: str          # "<" or ">"
    passed: bool
    margin: float


@dataclass
class PreliminariesReport:
    verdict: bool
    checks: list
    alpha: Interval
    beta: Interval

    def to_text(self) -> str:
        lines = ["# certification preliminaries",
                 f"verdict: {'PASS' if self.verdict else 'FAIL'}"]
        for c in self.checks:
            lines.append(f"{c.name}: value=[{c.value.lo!r}, {c.value.hi!r}] "
                         f"{c.direction} {c.bound} pass={c.passed} margin={c.margin!r}")
        return "\n".join(lines + [""])


# ---------------------------------------------------------------------------
# The grid sweep
# ---------------------------------------------------------------------------

def _delta_interval(j_lo: Fraction, j_hi: Fraction) -> Interval:
    return Interval(Interval.from_fraction(j_lo).lo, Interval.from_fraction(j_hi).hi)


def _gamma_interval(alpha: Interval, f_lo: Fraction, f_hi: Fraction) -> Interval:
    frac = Interval(Interval.from_fraction(f_lo).lo, Interval.from_fraction(f_hi).hi)
    return alpha * frac


def _certify_cell(alpha: Interval, beta: Interval, d: int,
                  g_lo: Fraction, g_hi: Fraction, d_lo: Fraction, d_hi: Fraction,
                  refine_limit: int) -> tuple:
    """Adaptively refined (h1_upper, phi_lower, depth, note) for one cell.

    Failing boxes are bisected along their wider axis; the cell bound is the
    worst bound over the leaf boxes, which is still a rigorous bound for the
    whole cell.
    """
    worst_h1 = -math.inf
    worst_phi = math.inf
    max_depth = 0
    note = ""
    stack = [(g_lo, g_hi, d_lo, d_hi, 0)]
    while stack:
        gl, gh, dl, dh, depth = stack.pop()
        max_depth = max(max_depth, depth)
        try:
            gamma = _gamma_interval(alpha, gl, gh)
            delta = _delta_interval(dl, dh)
            h1 = h1_interval(alpha, beta, gamma, delta, d)
            _, phi = psi_phi_interval(alpha, beta, gamma, delta, d)
            ok = h1.hi < H1_BOUND and phi.lo > PHI_BOUND
            box_h1, box_phi = h1.hi, phi.lo
        except IntervalDomainError as exc:
            ok = False
            box_h1, box_phi = math.inf, -math.inf
            if depth >= refine_limit:
                note = str(exc)
        if ok:
            worst_h1 = max(worst_h1, box_h1)
            worst_phi = min(worst_phi, box_phi)
            continue
        if depth >= refine_limit:
            worst_h1 = max(worst_h1, box_h1)
            worst_phi = min(worst_phi, box_phi)
            continue
        # split the wider axis (gamma width measured in absolute units)
        g_width = float(gh - gl) * alpha.hi
        d_width = float(dh - dl)
        if g_width >= d_width:
            gm = (gl + gh) / 2
            stack.append((gl, gm, dl, dh, depth + 1))
            stack.append((gm, gh, dl, dh, depth + 1))
        else:
            dm = (dl + dh) / 2
            stack.append((gl, gh, dl, dm, depth + 1))
            stack.append((gl, gh, dm, dh, depth + 1))
    return worst_h1, worst_phi, max_depth, note


def _cell_worker(args):
    (i, j, alpha, beta, d, g_lo, g_hi, d_lo, d_hi, refine) = args
    h1u, phil, depth, note = _certify_cell(alpha, beta, d, g_lo, g_hi,
                                           d_lo, d_hi, refine)
    passed = h1u < H1_BOUND and phil > PHI_BOUND
    return CellResult(i, j, h1u, phil, depth, passed, note)


def certification_inputs(fp: TreeFixedPoints, nbhd: float, d: int = 6,
                         lam: Fraction = Fraction(1)) -> tuple:
    """(alpha, beta, enclosure_verified): rigorous (p-, p+) intervals widened
    to half-width at least nbhd."""
    enc = enclose_fixed_points(d, lam, fp.q_plus)
    if enc.verified:
        # sanity: the enclosure must be consistent with the supplied floats
        if not (enc.q_plus.widened(1e-9).contains(fp.q_plus)
                and enc.q_minus.widened(1e-9).contains(fp.q_minus)):
            enc = FixedPointEnclosure(
                Interval(fp.q_plus), Interval(fp.q_minus),
                Interval(fp.p_plus), Interval(fp.p_minus), False)
    if enc.verified:
        alpha = enc.p_minus.widened(nbhd)
        beta = enc.p_plus.widened(nbhd)
    else:
        alpha = Interval(fp.p_minus).widened(nbhd)
        beta = Interval(fp.p_plus).widened(nbhd)
    return alpha, beta, enc.verified


def certify_max_overlap(fp: TreeFixedPoints, nbhd: float = 1e-9,
                       grid: tuple = (100, 32), refine: int = 8,
                       threads: int = 1, d: int = 6,
                       lam: Fraction = Fraction(1)) -> CertificationReport:
    """Run the full grid certification at d = 6, fugacity 1.

    Cells are gamma in [alpha i/ni, alpha (i+1)/ni] for 0 <= i < ni and
    delta in 1/100 + 32/100 * [j/nj, (j+1)/nj] for 0 <= j < nj; the
    default (100, 32) grid sweeps [0, alpha] x [0.01, 0.33] in steps of
    alpha/100 and 1/100.  The delta range is deliberately the superset
    [0.01, 0.33] of the reduced region [0.015, 0.33]; the first column covers
    the overlap.
    """
    if d != 6 or Fraction(lam) != 1:
        raise DomainError("certification is specific to d = 6, lambda = 1")
    if not nbhd > 0:
        raise DomainError("nbhd must be positive")
    t0 = time.perf_counter()
    alpha, beta, verified = certification_inputs(fp, nbhd, d, lam)
    ni, nj = grid
    jobs = []
    lo_delta, span = Fraction(1, 100), Fraction(32, 100)
    for i in range(ni):
        for j in range(nj):
            jobs.append((i, j, alpha, beta, d,
                         Fraction(i, ni), Fraction(i + 1, ni),
                         lo_delta + span * Fraction(j, nj),
                         lo_delta + span * Fraction(j + 1, nj),
                         refine))
    if threads > 1:
        import multiprocessing as mp
        with mp.Pool(threads) as pool:
            cells = pool.map(_cell_worker, jobs, chunksize=32)
    else:
        cells = [_cell_worker(job) for job in jobs]
    report = CertificationReport(
        verdict=all(c.passed for c in cells),
        d=d, lam=str(Fraction(lam)), nbhd=nbhd, grid=(ni, nj),
        alpha=alpha, beta=beta, enclosure_verified=verified,
        refine_limit=refine, cells=cells,
        wall_time_s=time.perf_counter() - t0,
    )
    return report


def certify_preliminaries(fp: TreeFixedPoints, nbhd: float = 1e-9,
                          d: int = 6, lam: Fraction = Fraction(1)) -> PreliminariesReport:
    """Interval verification of the scalar inequalities that reduce the
    certification region: the star value of ghat beats the separable bounds
    at delta = 0.015 and delta = 0.330, the radicand-control bound
    4 alpha beta / (1-alpha-beta)^2 <= 0.19 holds, and the reduced Hessian is
    negative definite at the star point."""
    if d != 6 or Fraction(lam) != 1:
        raise DomainError("certification is specific to d = 6, lambda = 1")
    alpha, beta, _ = certification_inputs(fp, nbhd, d, lam)
    one = Interval(1.0)
    log_lam = Interval(0.0)
    gamma_star = alpha.sqr()
    delta_star = beta.sqr()
    eps_star = ehat_interval(alpha, beta, gamma_star, delta_star)
    ghat_star = f_interval(alpha, beta, gamma_star, delta_star, eps_star, d, log_lam)
    f1s = f1_interval(alpha, gamma_star)
    split_low = f1s + f2_interval(beta, Interval.from_fraction(Fraction(15, 1000)))
    split_high = f1s + f2_interval(beta, Interval.from_fraction(Fraction(33, 100)))
    rad_control = (Interval(4.0) * alpha * beta) / (one - alpha - beta).sqr()
    first, h1s, det = _star_hessian(alpha, beta, d)

    checks = [
        InequalityCheck("ghat_star_gt_1.430", ghat_star, 1.430, ">",
                        ghat_star.lo > 1.430, ghat_star.lo - 1.430),
        InequalityCheck("f1_plus_f2_at_0.015_lt_1.425", split_low, 1.425, "<",
                        split_low.hi < 1.425, 1.425 - split_low.hi),
        InequalityCheck("f1_plus_f2_at_0.330_lt_1.414", split_high, 1.414, "<",
                        split_high.hi < 1.414, 1.414 - split_high.hi),
        InequalityCheck("radicand_control_le_0.19", rad_control, 0.19, "<",
                        rad_control.hi <= 0.19, 0.19 - rad_control.hi),
        InequalityCheck("star_hessian_first_entry_lt_0", first, 0.0, "<",
                        first.hi < 0.0, -first.hi),
        InequalityCheck("star_hessian_det_gt_0", det, 0.0, ">",
                        det.lo > 0.0, det.lo),
        InequalityCheck("star_hessian_h1_entry_lt_0", h1s, 0.0, "<",
                        h1s.hi < 0.0, -h1s.hi),
    ]
    # The delta-region reduction to [0.015, 0.33] is justified exactly when
    # the star value beats both separable bounds.
    reduction_ok = checks[0].passed and checks[1].passed and checks[2].passed
    checks.append(InequalityCheck(
        "delta_region_reduction_justified",
        interval_union(split_low, split_high), ghat_star.lo, "<",
        reduction_ok, ghat_star.lo - max(split_low.hi, split_high.hi)))
    return PreliminariesReport(
        verdict=all(c.passed for c in checks),
        checks=checks, alpha=alpha, beta=beta)


def largest_passing_nbhd(fp: TreeFixedPoints, grid: tuple = (100, 32),
                         refine: int = 8, start: float = 1e-9,
                         factor: float = 10.0, max_steps: int = 6) -> float:
    """Geometric search for the largest tested neighbourhood half-width at
    which both the preliminaries and the grid sweep still pass.  Reported in
    lieu of a concrete constant for the neighbourhood radius, which the
    argument leaves existential."""
    passing = None
    nbhd = start
    for _ in range(max_steps):
        prelim = certify_preliminaries(fp, nbhd=nbhd)
        if prelim.verdict:
            report = certify_max_overlap(fp, nbhd=nbhd, grid=grid, refine=refine)
            if report.verdict:
                passing = nbhd
                nbhd *= factor
                continue
        break
    if passing is None:
        raise DomainError(f"certification fails already at nbhd = {start}")
    return passing


def solve_and_certify(nbhd: float = 1e-9, grid: tuple = (100, 32),
                      refine: int = 8, threads: int = 1) -> tuple:
    """Convenience: solve the d=6, lambda=1 fixed points, run preliminaries
    and the sweep; returns (fp, preliminaries, report)."""
    fp = solve_fixed_points(ModelParams(6, 1.0), tol=1e-14)
    prelim = certify_preliminaries(fp, nbhd=nbhd)
    report = certify_max_overlap(fp, nbhd=nbhd, grid=grid, refine=refine,
                                threads=threads)
    return fp, prelim, report
