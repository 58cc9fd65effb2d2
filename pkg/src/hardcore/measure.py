"""Exact hardcore-model computations on finite graphs.

Partition values are exact big rationals (Fraction) throughout; floats only
appear in diagnostics.  The workhorse is the deletion recursion

    Z(G) = Z(G - v) + lam * Z(G - N[v])

with connected-component factorization and memoization, optionally refined
by the occupancy counts on the W+ / W- core (which is what phases and the
closed-form moment checks need).  The closed forms for the expected
conditioned partition function and its square are assembled from the exact
avoidance probability of a single uniform perfect matching, so they are
exact at any finite size, not asymptotic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, Optional, Tuple

from .errors import ConsistencyError, DomainError, ResourceError
from .gadgets import GadgetSpec, Graph
from .treegibbs import TreeFixedPoints, q_step, ModelParams

MEMO_CAP = 1 << 24
DEFAULT_SIZE_CAP = 40


# ---------------------------------------------------------------------------
# Configurations and phases
# ---------------------------------------------------------------------------

def is_independent(g: Graph, occ) -> bool:
    return all(not (occ[u] and occ[v]) for u, v in g.edges())


def phase_of(g: Graph, occ, gadget: Optional[int] = None) -> int:
    """+1 if the W+ occupancy sum is >= the W- sum (ties to plus), else -1."""
    s_plus = sum(occ[v] for v in g.vertices_with_label("W+", gadget))
    s_minus = sum(occ[v] for v in g.vertices_with_label("W-", gadget))
    return 1 if s_plus >= s_minus else -1


# ---------------------------------------------------------------------------
# Exact partition functions (deletion recursion)
# ---------------------------------------------------------------------------

def _components(adj, active: frozenset):
    seen = set()
    for s in active:
        if s in seen:
            continue
        comp = {s}
        queue = [s]
        seen.add(s)
        while queue:
            u = queue.pop()
            for v in adj[u]:
                if v in active and v not in seen:
                    seen.add(v)
                    comp.add(v)
                    queue.append(v)
        yield frozenset(comp)


def exact_partition(g: Graph, lam: Fraction,
                    size_cap: int = DEFAULT_SIZE_CAP) -> Fraction:
    """Independence polynomial of g at lam, exactly."""
    lam = Fraction(lam)
    adj = g.adj
    active = frozenset(range(g.n_vertices))
    for comp in _components(adj, active):
        if len(comp) > size_cap:
            raise ResourceError(
                f"component of size {len(comp)} exceeds cap {size_cap}")
    memo: Dict[frozenset, Fraction] = {}

    def z_conn(s: frozenset) -> Fraction:
        if len(s) <= 1:
            return Fraction(1) + lam * len(s)
        cached = memo.get(s)
        if cached is not None:
            return cached
        v = max(s, key=lambda u: len(adj[u] & s))
        closed = (adj[v] & s) | {v}
        val = z_any(s - {v}) + lam * z_any(s - closed)
        if len(memo) < MEMO_CAP:
            memo[s] = val
        return val

    def z_any(s: frozenset) -> Fraction:
        out = Fraction(1)
        for comp in _components(adj, s):
            out *= z_conn(comp)
        return out

    return z_any(active)


def partition_by_counts(g: Graph, lam: Fraction,
                        size_cap: int = DEFAULT_SIZE_CAP,
                        active: Optional[frozenset] = None) -> Dict[Tuple[int, int], Fraction]:
    """Partition values refined by W+/W- occupancy counts.

    Returns {(a, b): weight} with weight the lam-weighted number of
    independent sets (restricted to `active` if given) having a occupied W+
    vertices and b occupied W- vertices.
    """
    lam = Fraction(lam)
    adj = g.adj
    if active is None:
        active = frozenset(range(g.n_vertices))
    for comp in _components(adj, active):
        if len(comp) > size_cap:
            raise ResourceError(
                f"component of size {len(comp)} exceeds cap {size_cap}")
    axis = [0] * g.n_vertices
    for v in range(g.n_vertices):
        if g.labels[v] == "W+":
            axis[v] = 1
        elif g.labels[v] == "W-":
            axis[v] = 2
    memo: Dict[frozenset, Dict[Tuple[int, int], Fraction]] = {}

    def convolve(p, q):
        out = {}
        for (a1, b1), w1 in p.items():
            for (a2, b2), w2 in q.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, Fraction(0)) + w1 * w2
        return out

    def z_conn(s: frozenset):
        if not s:
            return {(0, 0): Fraction(1)}
        cached = memo.get(s)
        if cached is not None:
            return cached
        v = max(s, key=lambda u: len(adj[u] & s))
        closed = (adj[v] & s) | {v}
        out = dict(z_any(s - {v}))
        shift = (1, 0) if axis[v] == 1 else (0, 1) if axis[v] == 2 else (0, 0)
        sa, sb = shift
        for (a, b), w in z_any(s - closed).items():
            key = (a + sa, b + sb)
            out[key] = out.get(key, Fraction(0)) + lam * w
        if len(memo) < MEMO_CAP:
            memo[s] = out
        return out

    def z_any(s: frozenset):
        out = {(0, 0): Fraction(1)}
        for comp in _components(adj, s):
            out = convolve(out, z_conn(comp))
        return out

    return z_any(active)


@dataclass(frozen=True)
class ConditionalPartition:
    value: Fraction
    eta_consistent: bool
    by_counts: Optional[dict] = None


def conditional_partition(g: Graph, lam: Fraction, eta: Dict[int, int],
                          phase: Optional[int] = None,
                          alpha_beta: Optional[Tuple[int, int]] = None,
                          size_cap: int = DEFAULT_SIZE_CAP,
                          with_counts: bool = False) -> ConditionalPartition:
    """Partition value restricted to sigma agreeing with eta.

    eta maps vertices to {0, 1}.  Optionally restrict further to the phase
    class (sign of the W+ minus W- occupancy comparison, ties plus) or to
    exact W occupancy counts alpha_beta = (a, b).  An eta occupying two
    adjacent vertices is inconsistent and yields 0 with a flag.
    """
    lam = Fraction(lam)
    occupied = {v for v, bit in eta.items() if bit}
    for v in occupied:
        if any(u in occupied for u in g.adj[v]):
            return ConditionalPartition(Fraction(0), False)
    removed = set(eta)
    blocked = set()
    for v in occupied:
        blocked |= g.adj[v]
    if blocked & occupied:
        return ConditionalPartition(Fraction(0), False)
    active = frozenset(range(g.n_vertices)) - removed - blocked
    base_a = sum(1 for v in occupied if g.labels[v] == "W+")
    base_b = sum(1 for v in occupied if g.labels[v] == "W-")
    prefactor = lam ** len(occupied)

    if phase is None and alpha_beta is None and not with_counts:
        val = prefactor * _partition_on(g, lam, active, size_cap)
        return ConditionalPartition(val, True)

    counts = partition_by_counts(g, lam, size_cap=size_cap, active=active)
    shifted = {(a + base_a, b + base_b): w * prefactor
               for (a, b), w in counts.items()}
    if alpha_beta is not None:
        val = shifted.get(tuple(alpha_beta), Fraction(0))
    elif phase is not None:
        if phase not in (1, -1):
            raise DomainError("phase must be +1 or -1")
        val = sum((w for (a, b), w in shifted.items()
                   if (a >= b) == (phase == 1)), Fraction(0))
    else:
        val = sum(shifted.values(), Fraction(0))
    return ConditionalPartition(val, True, by_counts=shifted if with_counts else None)


def _partition_on(g: Graph, lam: Fraction, active: frozenset, size_cap: int) -> Fraction:
    sub = Graph(g.n_vertices, g.d)
    sub.labels = list(g.labels)
    for u in active:
        sub.adj[u] = g.adj[u] & active
    # restrict to active vertices by zeroing the rest's adjacency; the
    # deletion recursion only ever visits `active`
    total = Fraction(1)
    for comp in _components(sub.adj, active):
        if len(comp) > size_cap:
            raise ResourceError(f"component of size {len(comp)} exceeds cap {size_cap}")
    memo: Dict[frozenset, Fraction] = {}

    def z_conn(s: frozenset) -> Fraction:
        if len(s) <= 1:
            return Fraction(1) + lam * len(s)
        cached = memo.get(s)
        if cached is not None:
            return cached
        v = max(s, key=lambda u: len(sub.adj[u] & s))
        closed = (sub.adj[v] & s) | {v}
        val = z_any(s - {v}) + lam * z_any(s - closed)
        if len(memo) < MEMO_CAP:
            memo[s] = val
        return val

    def z_any(s: frozenset) -> Fraction:
        out = Fraction(1)
        for comp in _components(sub.adj, s):
            out *= z_conn(comp)
        return out

    return z_any(active)


# ---------------------------------------------------------------------------
# Closed-form expected partition functions over the random gadget
# ---------------------------------------------------------------------------

def matching_avoidance_probability(N: int, a: int, b: int, g: int, h: int) -> Fraction:
    """Probability that one uniform perfect matching of [N] <-> [N] places no
    edge inside A1 x B1 nor A2 x B2, for |Ai| = a, |Bi| = b, |A1 n A2| = g,
    |B1 n B2| = h.  Exact for all sizes."""
    if not (0 <= g <= a <= N and 0 <= h <= b <= N):
        raise DomainError("need 0 <= g <= a <= N and 0 <= h <= b <= N")
    if N - 2 * b + h < g or N - 2 * a + g < 0 or N - 2 * b + h < 0:
        return Fraction(0)
    first = Fraction(comb(N - 2 * b + h, g), comb(N, g))
    total = Fraction(0)
    for e in range(0, a - g + 1):
        if a - g - e > b - h or e > N - 2 * b + h - g:
            continue
        total += (Fraction(comb(N - 2 * b + h - g, e) * comb(b - h, a - g - e),
                           comb(N - g, a - g))
                  * Fraction(comb(N - b - g - e, a - g), comb(N - a, a - g)))
    return first * total


def _as_count(x: Fraction, n: int, name: str) -> int:
    v = Fraction(x) * n
    if v.denominator != 1:
        raise DomainError(f"{name} * n = {v} is not an integer")
    if v < 0 or v > n:
        raise DomainError(f"{name} * n = {v} out of range [0, {n}]")
    return int(v)


@dataclass(frozen=True)
class FirstMomentResult:
    gadget: Fraction      # with ports
    no_ports: Fraction    # d-matching model on the core alone
    c_star: Fraction
    eta_ratio_prediction: Fraction  # C* times the per-eta weight factors


def expected_Z_formula(spec: GadgetSpec, alpha: Fraction, beta: Fraction,
                       eta_counts: Tuple[int, int],
                       lam: Fraction = Fraction(1)) -> FirstMomentResult:
    """Exact E Z^{alpha,beta}(eta) over the random gadget core, its analogue
    for the d-matching model without ports, and the proportionality constant
    relating them in the large-n limit."""
    n, mp, d = spec.n, spec.m_prime, spec.d
    ep, em = eta_counts
    if not (0 <= ep <= mp and 0 <= em <= mp):
        raise DomainError("eta counts out of range")
    lam = Fraction(lam)
    alpha, beta = Fraction(alpha), Fraction(beta)
    an = _as_count(alpha, n, "alpha")
    bn = _as_count(beta, n, "beta")
    N = n + mp
    gt = (lam ** (an + bn + ep + em) * comb(n, an) * comb(n, bn)
          * matching_avoidance_probability(N, an + ep, bn + em, an + ep, bn + em) ** (d - 1)
          * matching_avoidance_probability(n, an, bn, an, bn))
    mww = (lam ** (an + bn) * comb(n, an) * comb(n, bn)
           * Fraction(comb(n - bn, an), comb(n, an)) ** d)
    one = Fraction(1)
    # Each of the d-1 full-side matchings contributes the port factor once,
    # hence the exponent m' (d-1); the exact finite-n ratio pins this (a
    # smaller exponent leaves a constant-factor gap).
    c_star = ((one - alpha) * (one - beta) / (one - alpha - beta)) ** (mp * (d - 1))
    ratio = (c_star
             * (lam * ((one - alpha - beta) / (one - beta)) ** (d - 1)) ** em
             * (lam * ((one - alpha - beta) / (one - alpha)) ** (d - 1)) ** ep)
    return FirstMomentResult(gadget=gt, no_ports=mww, c_star=c_star,
                             eta_ratio_prediction=ratio)


@dataclass(frozen=True)
class SecondMomentResult:
    gadget: Fraction
    no_ports: Fraction


def expected_Z2_formula(spec: GadgetSpec, alpha: Fraction, beta: Fraction,
                        eta_counts: Tuple[int, int],
                        lam: Fraction = Fraction(1)) -> SecondMomentResult:
    """Exact E (Z^{alpha,beta}(eta))^2 as a finite sum over the integer
    overlap profile (gamma n, delta n), each term weighting the avoidance
    probability of the d-1 full-side matchings and the one W-only matching.

    The avoidance probability of each matching family carries its own
    internal overlap sum; the port count m' enters only the d-1 full-side
    matchings, the W-only matching sees none of it.
    """
    n, mp, d = spec.n, spec.m_prime, spec.d
    ep, em = eta_counts
    lam = Fraction(lam)
    alpha, beta = Fraction(alpha), Fraction(beta)
    an = _as_count(alpha, n, "alpha")
    bn = _as_count(beta, n, "beta")
    N = n + mp
    gt_sum = Fraction(0)
    mww_sum = Fraction(0)
    for gn in range(0, an + 1):
        if an - gn > n - an:
            continue
        for dn in range(0, bn + 1):
            if bn - dn > n - bn:
                continue
            ways = (comb(an, gn) * comb(n - an, an - gn)
                    * comb(bn, dn) * comb(n - bn, bn - dn))
            if ways == 0:
                continue
            p_w = matching_avoidance_probability(n, an, bn, gn, dn)
            p_full = matching_avoidance_probability(N, an + ep, bn + em, gn + ep, dn + em)
            gt_sum += ways * p_full ** (d - 1) * p_w
            mww_sum += ways * p_w ** d
    front = comb(n, an) * comb(n, bn)
    return SecondMomentResult(
        gadget=lam ** (2 * (an + bn + ep + em)) * front * gt_sum,
        no_ports=lam ** (2 * (an + bn)) * front * mww_sum)


def sample_conditional_z(spec: GadgetSpec, triples, samples: int,
                         seed: int) -> list:
    """Per-graph exact counts of configurations with given W occupancies and
    fixed eta patterns, over `samples` independently sampled cores.

    `triples` is a list of (an, bn, eta_plus, eta_minus); all are evaluated
    on the same sampled graphs and a list of per-triple count lists is
    returned.  Counts come directly from the bipartite structure: any subset
    of one side is independent, so Z^{a,b}(eta) = sum over a-subsets A of W+
    of C(#W- not blocked by A u eta+, b) whenever eta- stays unblocked.  At
    fugacity lam the partition value is lam^(a+b+|eta|) times the count.
    Serves as the Monte Carlo oracle against the closed forms.
    """
    n, mp, d = spec.n, spec.m_prime, spec.d
    N = n + mp
    rng = random.Random(seed)
    w_minus_mask = (1 << n) - 1  # minus side bits 0..N-1, W- first
    prepared = []
    for an, bn, ep, em in triples:
        if not (0 <= an <= n and 0 <= bn <= n and 0 <= ep <= mp and 0 <= em <= mp):
            raise DomainError(f"triple {(an, bn, ep, em)} out of range")
        occ_um = 0
        for j in range(n, n + em):
            occ_um |= 1 << j
        prepared.append((an, bn, ep, occ_um))
    out = [[] for _ in triples]
    for _ in range(samples):
        nbr = [0] * N
        perm = list(range(N))
        for _ in range(d - 1):
            rng.shuffle(perm)
            for i in range(N):
                nbr[i] |= 1 << perm[i]
        permw = list(range(n))
        rng.shuffle(permw)
        for i in range(n):
            nbr[i] |= 1 << permw[i]
        for t, (an, bn, ep, occ_um) in enumerate(prepared):
            base = 0
            for v in range(n, n + ep):
                base |= nbr[v]
            total = 0
            if not base & occ_um:
                for A in combinations(range(n), an):
                    nb = base
                    for v in A:
                        nb |= nbr[v]
                    if nb & occ_um:
                        continue
                    free = n - bin(nb & w_minus_mask).count("1")
                    if free >= bn:
                        total += comb(free, bn)
            out[t].append(total)
    return out


def binomial_perturb_check(a: int, b: int, x: int, y: int) -> Tuple[Fraction, Fraction]:
    """Exact ratio C(a+x, b+y) / C(a, b) and the product approximation
    (a/(a-b))^x ((a-b)/b)^y, valid when x^2 + y^2 <= min(b, a-b)."""
    if not 0 < b < a:
        raise DomainError("need 0 < b < a")
    if x * x + y * y > min(b, a - b):
        raise DomainError("need x^2 + y^2 <= min(b, a-b)")
    exact = Fraction(comb(a + x, b + y), comb(a, b))
    approx = (Fraction(a, a - b) ** x) * (Fraction(a - b, b) ** y)
    return exact, approx


# ---------------------------------------------------------------------------
# Product measures on the port sets
# ---------------------------------------------------------------------------

def product_measure_q(fp: TreeFixedPoints, phase: int,
                      sigma_plus, sigma_minus) -> float:
    """Q^phase probability of a configuration on the ports: iid Bernoulli
    q+ on the plus class and q- on the minus class when phase = +1, swapped
    when phase = -1."""
    if phase not in (1, -1):
        raise DomainError("phase must be +1 or -1")
    q_p = fp.q_plus if phase == 1 else fp.q_minus
    q_m = fp.q_minus if phase == 1 else fp.q_plus
    kp = sum(sigma_plus)
    km = sum(sigma_minus)
    return (q_p ** kp * (1 - q_p) ** (len(sigma_plus) - kp)
            * q_m ** km * (1 - q_m) ** (len(sigma_minus) - km))


# ---------------------------------------------------------------------------
# Phase statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseStats:
    p_plus: Fraction
    p_minus: Fraction
    v_marginals: dict            # vertex -> (P(occ | Y=+), P(occ | Y=-))
    max_ratio: Optional[dict]    # phase -> max_sigma |P(sigma|Y)/Q(sigma) - 1|


def phase_statistics(g: Graph, lam: Fraction, fp: Optional[TreeFixedPoints] = None,
                     size_cap: int = DEFAULT_SIZE_CAP,
                     port_labels: Tuple[str, str] = ("V+", "V-")) -> PhaseStats:
    """Exact phase probabilities and port marginals by refined elimination.

    One refined elimination per port pattern gives the joint law of
    (port configuration, phase); phase probabilities, per-port conditional
    marginals and, when fixed points are supplied, the worst-case relative
    gap to the product law with densities (q+, q-) all derive from it.
    """
    lam = Fraction(lam)
    v_plus = g.vertices_with_label(port_labels[0])
    v_minus = g.vertices_with_label(port_labels[1])
    ports = v_plus + v_minus
    if len(ports) > 16:
        raise ResourceError("port diagnostics capped at 16 ports")
    pattern_value: Dict[Tuple[int, int], Fraction] = {}
    for bits in range(1 << len(ports)):
        sigma = {v: (bits >> i) & 1 for i, v in enumerate(ports)}
        cp = conditional_partition(g, lam, sigma, with_counts=True,
                                   size_cap=size_cap)
        if not cp.eta_consistent:
            pattern_value[(bits, 1)] = Fraction(0)
            pattern_value[(bits, -1)] = Fraction(0)
            continue
        for sign in (1, -1):
            pattern_value[(bits, sign)] = sum(
                (w for (a, b), w in cp.by_counts.items()
                 if (a >= b) == (sign == 1)), Fraction(0))
    z_plus = sum((pattern_value[(b, 1)] for b in range(1 << len(ports))), Fraction(0))
    z_minus = sum((pattern_value[(b, -1)] for b in range(1 << len(ports))), Fraction(0))
    total = z_plus + z_minus
    marginals = {}
    for i, v in enumerate(ports):
        num = {}
        for sign, zden in ((1, z_plus), (-1, z_minus)):
            val = sum((pattern_value[(b, sign)] for b in range(1 << len(ports))
                       if (b >> i) & 1), Fraction(0))
            num[sign] = val / zden if zden else Fraction(0)
        marginals[v] = (num[1], num[-1])
    max_ratio = None
    if fp is not None:
        max_ratio = {}
        for sign, zden in ((1, z_plus), (-1, z_minus)):
            worst = 0.0
            for bits in range(1 << len(ports)):
                p_cond = float(pattern_value[(bits, sign)] / zden) if zden else 0.0
                q = product_measure_q(
                    fp, sign,
                    [(bits >> ports.index(v)) & 1 for v in v_plus],
                    [(bits >> ports.index(v)) & 1 for v in v_minus])
                worst = max(worst, abs(p_cond / q - 1.0))
            max_ratio[sign] = worst
    return PhaseStats(p_plus=z_plus / total, p_minus=z_minus / total,
                      v_marginals=marginals, max_ratio=max_ratio)


# ---------------------------------------------------------------------------
# Glauber dynamics
# ---------------------------------------------------------------------------

@dataclass
class GlauberTrajectory:
    sweeps: int
    w_plus: list
    w_minus: list
    phases: list
    final: list

    def rows(self):
        for t in range(len(self.w_plus)):
            yield (t + 1, self.w_plus[t], self.w_minus[t], self.phases[t])


def initial_configuration(g: Graph, kind: str) -> list:
    """empty / plus (all plus-side occupied) / minus starting states."""
    occ = [0] * g.n_vertices
    if kind == "empty":
        return occ
    if kind not in ("plus", "minus"):
        raise DomainError(f"unknown initial configuration {kind!r}")
    sign = "+" if kind == "plus" else "-"
    for v in range(g.n_vertices):
        if g.labels[v].endswith(sign):
            occ[v] = 1
    if not is_independent(g, occ):
        raise ConsistencyError("side-occupied start is not independent; "
                               "graph is not bipartite by labels")
    return occ


def glauber_run(g: Graph, lam: float, sweeps: int, init, seed: int,
                record_every: int = 1) -> GlauberTrajectory:
    """Heat-bath single-site dynamics.

    Each sweep is n_vertices uniform single-site updates: the chosen vertex
    becomes occupied with probability lam/(1+lam) if no neighbour is
    occupied, else vacant.  Records the W+- occupancy sums and the phase
    once per `record_every` sweeps.
    """
    if isinstance(init, str):
        occ = initial_configuration(g, init)
    else:
        occ = list(init)
        if len(occ) != g.n_vertices:
            raise DomainError("initial configuration has wrong length")
        if not is_independent(g, occ):
            raise DomainError("initial configuration is not an independent set")
    rng = random.Random(seed)
    p_occ = lam / (1.0 + lam)
    nv = g.n_vertices
    adj = [list(a) for a in g.adj]
    w_sign = [1 if g.labels[v] == "W+" else -1 if g.labels[v] == "W-" else 0
              for v in range(nv)]
    s_plus = sum(occ[v] for v in range(nv) if w_sign[v] == 1)
    s_minus = sum(occ[v] for v in range(nv) if w_sign[v] == -1)
    traj_p, traj_m, traj_phase = [], [], []
    randint = rng.randrange
    rand = rng.random
    for sweep in range(sweeps):
        for _ in range(nv):
            v = randint(nv)
            new = 0
            if all(not occ[u] for u in adj[v]) and rand() < p_occ:
                new = 1
            if new != occ[v]:
                if w_sign[v] == 1:
                    s_plus += new - occ[v]
                elif w_sign[v] == -1:
                    s_minus += new - occ[v]
                occ[v] = new
        if (sweep + 1) % record_every == 0:
            traj_p.append(s_plus)
            traj_m.append(s_minus)
            traj_phase.append(1 if s_plus >= s_minus else -1)
    return GlauberTrajectory(sweeps=sweeps, w_plus=traj_p, w_minus=traj_m,
                             phases=traj_phase, final=occ)


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------

def tree_partition_dp(g: Graph, lam: Fraction, root: int,
                      forced: Optional[Dict[int, int]] = None) -> Tuple[Fraction, Fraction]:
    """(Z, root occupation marginal) on an explicit tree by leaf-to-root DP.

    forced pins vertices to 0/1 (boundary conditioning).  Exact rationals.
    """
    lam = Fraction(lam)
    forced = forced or {}
    n = g.n_vertices
    parent = [-2] * n
    order = [root]
    parent[root] = -1
    for u in order:
        for v in g.adj[u]:
            if parent[v] == -2:
                parent[v] = u
                order.append(v)
            elif v != parent[u]:
                raise ConsistencyError("graph is not a tree")
    if len(order) != n:
        raise ConsistencyError("graph is not connected")
    z0 = [Fraction(1)] * n
    z1 = [lam] * n
    for u in reversed(order):
        # z1 needs every child unoccupied, z0 takes children either way
        prod0 = Fraction(1)
        prod_any = Fraction(1)
        for v in g.adj[u]:
            if parent[v] != u:
                continue
            prod0 *= z0[v]
            prod_any *= z0[v] + z1[v]
        pin = forced.get(u)
        z1[u] = Fraction(0) if pin == 0 else lam * prod0
        z0[u] = Fraction(0) if pin == 1 else prod_any
    z = z0[root] + z1[root]
    if z == 0:
        raise DomainError("forced boundary admits no configuration")
    return z, z1[root] / z


def uniform_tree_root_marginal(d: int, lam: float, depth: int,
                               boundary: str = "occupied") -> float:
    """Root marginal of the depth-`depth` (d-1)-ary tree with a fully
    occupied (or vacant) bottom boundary, via the per-level recursion.
    All vertices at one level share the same marginal, so no tree is built.
    """
    if boundary == "occupied":
        x = 1.0
    elif boundary == "vacant":
        x = 0.0
    else:
        raise DomainError(f"unknown boundary {boundary!r}")
    params = ModelParams(d, lam)
    for _ in range(depth):
        x = q_step(x, params)
    return x
