"""Desk-scale enactment of the gadget reduction to MAX-CUT.

Each vertex of an outer graph H is replaced by a copy of the bipartite
gadget; every H-edge gets k cross edges per sign class between the port sets
of its endpoint copies.  Anti-aligned phases pay the cross-edge penalty
(1 - q+ q-)^2 per cross pair instead of (1 - q+^2)(1 - q-^2), and the ratio

    rho = (1 - q+ q-)^2 / ((1 - q+^2)(1 - q-^2)) > 1

(its numerator minus denominator is (q+ - q-)^2) tilts the phase-vector law
toward maximum cuts of H.  At desk scale the asymptotic sizing constraints
(ports and cross-edge counts as powers of n) cannot hold; k and |H| are free
parameters here and reports flag the violation.

The exact phase-vector distribution factors through the per-copy partition
values refined by (port configuration, phase), which keeps the computation
polynomial in everything except the tiny port count.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .errors import DomainError, ResourceError
from .gadgets import GadgetSpec, Graph, build_gadget, build_hg
from .measure import conditional_partition
from .treegibbs import TreeFixedPoints


def brute_maxcut(h: Graph) -> Tuple[int, list]:
    """Exhaustive MAX-CUT: (max value, all maximizing sign vectors).

    Both orientations of each maximizer are returned.  Capped at 24
    vertices.
    """
    n = h.n_vertices
    if n > 24:
        raise ResourceError("brute-force MAX-CUT capped at 24 vertices")
    edges = list(h.edges())
    best = -1
    winners = []
    for bits in range(1 << max(n - 1, 0)):
        signs = tuple(1 if (bits >> i) & 1 else -1 for i in range(n - 1)) + (-1,)
        cut = sum(1 for u, v in edges if signs[u] != signs[v])
        if cut > best:
            best = cut
            winners = [signs]
        elif cut == best:
            winners.append(signs)
    mirrored = winners + [tuple(-s for s in w) for w in winners]
    return best, sorted(set(mirrored))


def cut_size(h: Graph, signs) -> int:
    return sum(1 for u, v in h.edges() if signs[u] != signs[v])


@dataclass(frozen=True)
class CutResult:
    phase_vector: tuple
    cut: int
    probability: float
    weight: Optional[Fraction] = None
    rank: int = 0


def cut_ratio_prediction(fp: TreeFixedPoints, k: int, delta_cut: int) -> float:
    """Predicted probability ratio rho^(k delta_cut) between phase vectors
    whose cuts differ by delta_cut edges."""
    rho = phase_advantage_ratio(fp)
    return rho ** (k * delta_cut)


def phase_advantage_ratio(fp: TreeFixedPoints) -> float:
    qp, qm = fp.q_plus, fp.q_minus
    return (1 - qp * qm) ** 2 / ((1 - qp ** 2) * (1 - qm ** 2))


def _extract_copy(hg: Graph, x: int) -> Tuple[Graph, dict]:
    """Compact subgraph of copy x with a vertex id remap (old -> new)."""
    old_ids = [v for v in range(hg.n_vertices) if hg.gadget_index[v] == x]
    remap = {v: i for i, v in enumerate(old_ids)}
    sub = Graph(len(old_ids), hg.d)
    for v in old_ids:
        sub.labels[remap[v]] = hg.labels[v]
    for v in old_ids:
        for u in hg.adj[v]:
            if hg.gadget_index[u] == x and u < v:
                sub.add_edge(remap[u], remap[v])
    return sub, remap


def _copy_tables(hg: Graph, h: Graph, lam: Fraction,
                 size_cap: int) -> Tuple[dict, dict]:
    """Per-copy refined partition values.

    Returns (tables, ports): tables[x][(sigma_V bits, phase)] = partition
    value of copy x conditioned on its port configuration, restricted to the
    phase class; ports[x] is the ordered port vertex list of copy x (ids of
    the wired graph).
    """
    tables = {}
    ports = {}
    for x in range(h.n_vertices):
        vx = (hg.vertices_with_label("V+", gadget=x)
              + hg.vertices_with_label("V-", gadget=x))
        if len(vx) > 10:
            raise ResourceError("exact mode capped at 10 ports per copy")
        ports[x] = vx
        sub, remap = _extract_copy(hg, x)
        table = {}
        for bits in range(1 << len(vx)):
            sigma = {remap[v]: (bits >> i) & 1 for i, v in enumerate(vx)}
            cp = conditional_partition(sub, lam, sigma, with_counts=True,
                                       size_cap=size_cap)
            if not cp.eta_consistent:
                for ph in (1, -1):
                    table[(bits, ph)] = Fraction(0)
                continue
            for ph in (1, -1):
                val = sum((w for (a, b), w in cp.by_counts.items()
                           if (a >= b) == (ph == 1)), Fraction(0))
                table[(bits, ph)] = val
        tables[x] = table
    return tables, ports


def phase_vector_distribution(hg: Graph, h: Graph, lam: Fraction,
                              mode: str = "exact", size_cap: int = 80,
                              sweeps: int = 2000, seed: int = 0,
                              burn_in: int = 100) -> list:
    """Distribution of the per-copy phase vector, most probable first.

    Exact mode sums, over all joint port configurations compatible with the
    cross edges, the product of per-copy refined partition values.  Glauber
    mode estimates the distribution from the empirical phase trace of a
    single long run started from the empty configuration.
    """
    lam = Fraction(lam)
    copies = h.n_vertices
    if mode == "glauber":
        return _glauber_distribution(hg, h, float(lam), sweeps, seed, burn_in)
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    tables, ports = _copy_tables(hg, h, lam, size_cap)
    cross = hg.cross_edges()
    port_index = {}
    for x in range(copies):
        for i, v in enumerate(ports[x]):
            port_index[v] = (x, i)
    total_ports = sum(len(p) for p in ports.values())
    if total_ports > 20:
        raise ResourceError("exact mode capped at 20 ports total")
    weights: Dict[tuple, Fraction] = {}
    port_counts = [len(ports[x]) for x in range(copies)]
    for phase_vec in itertools.product((1, -1), repeat=copies):
        total = Fraction(0)
        for joint in itertools.product(*(range(1 << c) for c in port_counts)):
            ok = True
            for u, v in cross:
                xu, iu = port_index[u]
                xv, iv = port_index[v]
                if (joint[xu] >> iu) & 1 and (joint[xv] >> iv) & 1:
                    ok = False
                    break
            if not ok:
                continue
            term = Fraction(1)
            for x in range(copies):
                term *= tables[x][(joint[x], phase_vec[x])]
                if term == 0:
                    break
            total += term
        weights[phase_vec] = total
    z = sum(weights.values(), Fraction(0))
    if z == 0:
        raise DomainError("empty phase-vector distribution")
    results = [CutResult(phase_vector=pv, cut=cut_size(h, pv),
                         probability=float(w / z), weight=w)
               for pv, w in weights.items()]
    results.sort(key=lambda r: (-r.probability, r.phase_vector))
    return [CutResult(r.phase_vector, r.cut, r.probability, r.weight, rank=i)
            for i, r in enumerate(results)]


def _glauber_distribution(hg: Graph, h: Graph, lam: float, sweeps: int,
                          seed: int, burn_in: int) -> list:
    """Empirical phase-vector frequencies from one heat-bath chain, recording
    the per-copy phases once per sweep after burn-in."""
    import random as _random
    rng = _random.Random(seed)
    counts: Dict[tuple, int] = {}
    occ = [0] * hg.n_vertices
    nv = hg.n_vertices
    adj = [list(a) for a in hg.adj]
    p_occ = lam / (1.0 + lam)
    w_class = [(hg.gadget_index[v], hg.labels[v]) for v in range(nv)]
    sums = {}
    for x in range(h.n_vertices):
        sums[(x, "W+")] = 0
        sums[(x, "W-")] = 0
    for sweep in range(sweeps):
        for _ in range(nv):
            v = rng.randrange(nv)
            new = 0
            if all(not occ[u] for u in adj[v]) and rng.random() < p_occ:
                new = 1
            if new != occ[v]:
                key = w_class[v]
                if key[1] in ("W+", "W-"):
                    sums[key] += new - occ[v]
                occ[v] = new
        if sweep >= burn_in:
            pv = tuple(1 if sums[(x, "W+")] >= sums[(x, "W-")] else -1
                       for x in range(h.n_vertices))
            counts[pv] = counts.get(pv, 0) + 1
    total = sum(counts.values())
    results = [CutResult(phase_vector=pv, cut=cut_size(h, pv),
                         probability=c / total)
               for pv, c in counts.items()]
    results.sort(key=lambda r: (-r.probability, r.phase_vector))
    return [CutResult(r.phase_vector, r.cut, r.probability, rank=i)
            for i, r in enumerate(results)]


@dataclass
class ReductionReport:
    n: int
    k: int
    lam: str
    mode: str
    maxcut_value: int
    maxcut_vectors: list
    argmax_vectors: list
    argmax_subset_of_maxcut: bool
    argmax_equals_maxcut: bool
    distribution: list
    log_ratio_per_cut_edge: Optional[float]
    predicted_log_ratio_per_cut_edge: float
    asymptotic_sizing_violated: bool
    roots_overridden: bool

    def to_text(self) -> str:
        lines = [
            "# reduction report",
            f"n: {self.n}",
            f"k: {self.k}",
            f"lambda: {self.lam}",
            f"mode: {self.mode}",
            f"maxcut_value: {self.maxcut_value}",
            f"maxcut_vectors: {sorted(self.maxcut_vectors)}",
            f"argmax_vectors: {sorted(self.argmax_vectors)}",
            f"argmax_subset_of_maxcut: {self.argmax_subset_of_maxcut}",
            f"argmax_equals_maxcut: {self.argmax_equals_maxcut}",
            f"log_ratio_per_cut_edge: {self.log_ratio_per_cut_edge}",
            f"predicted_log_ratio_per_cut_edge: {self.predicted_log_ratio_per_cut_edge}",
            f"asymptotic_sizing_violated: {self.asymptotic_sizing_violated}",
            f"roots_overridden: {self.roots_overridden}",
            "# phase_vector cut probability",
        ]
        for r in self.distribution:
            lines.append(f"{''.join('+' if s == 1 else '-' for s in r.phase_vector)} "
                         f"{r.cut} {r.probability!r}")
        return "\n".join(lines) + "\n"


def run_reduction(h: Graph, spec: GadgetSpec, lam: Fraction, k: int,
                  mode: str = "exact", fp: Optional[TreeFixedPoints] = None,
                  size_cap: int = 80, sweeps: int = 2000,
                  roots_overridden: bool = False) -> ReductionReport:
    """Build the wired graph, compute the phase-vector law, and compare its
    argmax set against the brute-force MAX-CUT maximizers."""
    gadget = build_gadget(spec)
    hg = build_hg(h, gadget, k)
    dist = phase_vector_distribution(hg, h, lam, mode=mode, size_cap=size_cap,
                                     sweeps=sweeps, seed=spec.seed)
    if dist[0].weight is not None:
        best_w = max(r.weight for r in dist)
        argmax = sorted(r.phase_vector for r in dist if r.weight == best_w)
    else:
        best_p = dist[0].probability
        argmax = sorted(r.phase_vector for r in dist
                        if math.isclose(r.probability, best_p, rel_tol=1e-9, abs_tol=0.0))
    mc_value, mc_vectors = brute_maxcut(h)
    # empirical per-cut-edge log ratio: regress log probability on cut size
    by_cut: Dict[int, float] = {}
    for r in dist:
        if r.probability > 0:
            by_cut.setdefault(r.cut, 0.0)
            by_cut[r.cut] += r.probability
    log_ratio = None
    cuts = sorted(by_cut)
    if len(cuts) >= 2:
        # average per-vector probability at the extreme cut sizes
        n_low = sum(1 for r in dist if r.cut == cuts[0])
        n_high = sum(1 for r in dist if r.cut == cuts[-1])
        p_low = by_cut[cuts[0]] / n_low
        p_high = by_cut[cuts[-1]] / n_high
        if p_low > 0 and p_high > 0:
            log_ratio = math.log(p_high / p_low) / (cuts[-1] - cuts[0])
    predicted = math.nan
    if fp is not None:
        predicted = k * math.log(phase_advantage_ratio(fp))
    return ReductionReport(
        n=spec.n, k=k, lam=str(Fraction(lam)), mode=mode,
        maxcut_value=mc_value, maxcut_vectors=mc_vectors,
        argmax_vectors=argmax,
        argmax_subset_of_maxcut=set(argmax) <= set(mc_vectors),
        argmax_equals_maxcut=set(argmax) == set(mc_vectors),
        distribution=dist,
        log_ratio_per_cut_edge=log_ratio,
        predicted_log_ratio_per_cut_edge=predicted,
        asymptotic_sizing_violated=True,
        roots_overridden=roots_overridden)
